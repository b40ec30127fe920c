#pragma once

#include <functional>
#include <vector>

namespace fidsta {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated Kronrod error estimate
};

// Adaptive Gauss-Kronrod 7/15 on [a, b]. Recursion splits the worst panel
// until |err| <= max(abs_tol, rel_tol * |value|) summed over panels.
// Interval accumulation is in fixed (left-to-right) order so results do not
// depend on evaluation scheduling.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-12,
                     int max_depth = 60);

// Same, but the integration range is pre-split at the given interior points
// (kinks of the integrand; the rank pdfs have one at every 1/j).
QuadResult integrate_with_breakpoints(const std::function<double(double)>& f,
                                      double a, double b,
                                      const std::vector<double>& interior,
                                      double abs_tol = 1e-12, double rel_tol = 1e-12,
                                      int max_depth = 60);

} // namespace fidsta
