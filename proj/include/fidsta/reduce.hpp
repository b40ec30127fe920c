#pragma once

#include <cstddef>
#include <vector>

namespace fidsta {

// Pairwise reduction in a fixed tree order. Summation results must never
// depend on how work was scheduled, so every likelihood/statistic sum in the
// library funnels through this.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

} // namespace fidsta
