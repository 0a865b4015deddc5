#ifndef MCD_TYPES_H_
#define MCD_TYPES_H_

#include <cstdint>
#include <functional>
#include <utility>

namespace mcd {

using UserId = std::uint64_t;
using ActionId = std::uint64_t;
// Integer seconds since an arbitrary epoch.
using Timestamp = std::int64_t;

// Ordered pair (v, u): v is the influencer, u the receiver.
using UserPair = std::pair<UserId, UserId>;

struct UserPairHash {
  std::size_t operator()(const UserPair& p) const noexcept {
    std::uint64_t h = p.first * 0x9e3779b97f4a7c15ULL;
    h ^= p.second + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace mcd

#endif  // MCD_TYPES_H_
