#include "fidsta/special.hpp"

#include <cmath>

#include "fidsta/errors.hpp"

namespace fidsta {

// Asymptotic series coefficients: psi(x) ~ ln x - 1/2x - sum B_2n / (2n x^2n).
// Truncated where the term falls below 1e-16 for x >= 10.
double digamma(double x) {
    if (!(x > 0.0)) throw config_error("digamma requires x > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    // B_2/2, B_4/4, ... for psi: 1/12, -1/120, 1/252, -1/240, 1/132, -691/32760, 1/12
    double series = r * (1.0 / 12.0 -
                    r * (1.0 / 120.0 -
                    r * (1.0 / 252.0 -
                    r * (1.0 / 240.0 -
                    r * (1.0 / 132.0 -
                    r * (691.0 / 32760.0 -
                    r * (1.0 / 12.0)))))));
    return acc + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
    if (!(x > 0.0)) throw config_error("trigamma requires x > 0");
    double acc = 0.0;
    while (x < 10.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    // psi'(x) ~ 1/x + 1/2x^2 + sum_n B_2n / x^{2n+1} with B_2n = 1/6, -1/30, 1/42, ...
    const double r = 1.0 / (x * x);
    const double inv = 1.0 / x;
    double s = inv + 0.5 * r;
    double p = r * inv; // 1/x^3
    s += p * (1.0 / 6.0);
    p *= r;
    s += p * (-1.0 / 30.0);
    p *= r;
    s += p * (1.0 / 42.0);
    p *= r;
    s += p * (-1.0 / 30.0);
    p *= r;
    s += p * (5.0 / 66.0);
    p *= r;
    s += p * (-691.0 / 2730.0);
    p *= r;
    s += p * (7.0 / 6.0);
    return acc + s;
}

LogFactorialTable::LogFactorialTable(std::uint64_t n_max) {
    lf_.resize(n_max + 1);
    lf_[0] = 0.0;
    // Neumaier-compensated running sum of ln i; keeps ln(16384!) good to ~1e-12.
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t i = 1; i <= n_max; ++i) {
        const double term = std::log(static_cast<double>(i));
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        lf_[i] = sum + comp;
    }
}

} // namespace fidsta
