#pragma once

#include <cstddef>
#include <functional>

namespace bandlab {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically; callers write results into slot i so the outcome does
// not depend on scheduling. The first exception thrown is rethrown.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace bandlab
