#ifndef MCD_RANDOM_H_
#define MCD_RANDOM_H_

#include <cmath>
#include <cstdint>

namespace mcd {

// SplitMix64 (Steele, Lea, Flood 2014). Each output is a bijective mix of a
// Weyl-sequence counter, so streams are addressable by (seed, stream index)
// and reproducible on any platform. Distribution helpers below avoid the
// implementation-defined std:: distributions for the same reason.
class SplitMix64 {
 public:
  static constexpr const char* kAlgorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  // Independent substream `stream` of generator family `seed`.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Fisher-Yates shuffle driven by SplitMix64.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, SplitMix64& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace mcd

#endif  // MCD_RANDOM_H_
