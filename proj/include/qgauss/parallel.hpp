#pragma once

#include <cstddef>
#include <functional>

namespace qgauss {

// Process-wide worker count for data-parallel loops. 1 means run inline.
void set_thread_count(unsigned threads);
unsigned thread_count();

// Calls body(begin, end) over disjoint chunks covering [0, n). Chunks write
// disjoint outputs, so results never depend on the thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace qgauss
