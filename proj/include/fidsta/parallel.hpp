#pragma once

#include <cstddef>
#include <functional>

namespace fidsta {

// Process-wide worker cap for trial scheduling. 0 means hardware concurrency.
// Outputs must be identical for every setting; workers only ever write into
// disjoint, index-addressed slots.
void set_max_threads(int n);
int max_threads();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace fidsta
