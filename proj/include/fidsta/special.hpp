#pragma once

#include <cstdint>
#include <vector>

namespace fidsta {

// Digamma and trigamma, implemented here so results are identical everywhere:
// upward recurrence pushes the argument to >= 10, then the asymptotic series.
// Absolute accuracy ~1e-13 on x >= 1e-4, verified against high-precision values.
double digamma(double x);
double trigamma(double x);

// ln(n!) with compensated accumulation. Exposed as a table because the series
// evaluator asks for every ln-binomial C(D-k, j-k) in a tight loop.
class LogFactorialTable {
  public:
    explicit LogFactorialTable(std::uint64_t n_max);

    double ln_factorial(std::uint64_t n) const { return lf_[n]; }

    // ln C(n, r); requires n <= n_max.
    double ln_binomial(std::uint64_t n, std::uint64_t r) const {
        return lf_[n] - lf_[r] - lf_[n - r];
    }

    std::uint64_t n_max() const { return lf_.size() - 1; }

  private:
    std::vector<double> lf_;
};

} // namespace fidsta
