#ifndef MCD_PARALLEL_H_
#define MCD_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace mcd {

// Hardware concurrency, at least 1.
unsigned default_threads();

// Calls fn(i) for every i in [0, n) on up to `threads` workers. Indices are
// claimed dynamically; fn must only write state owned by index i. The first
// exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace mcd

#endif  // MCD_PARALLEL_H_
