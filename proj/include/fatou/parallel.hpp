#pragma once

#include <cstddef>
#include <functional>

namespace fatou {

// Worker cap for parallel_for; 0 means hardware concurrency.  Results must
// not depend on the cap: workers take contiguous index chunks and write to
// caller-owned slots, so merges happen in index order regardless of
// scheduling.
void set_worker_cap(int n);
int worker_cap();

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace fatou
