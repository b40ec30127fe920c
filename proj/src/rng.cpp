#include "fidsta/rng.hpp"

#include <cmath>

#include "fidsta/errors.hpp"

namespace fidsta {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double exp_variate(Engine& eng) {
    // -log(1-u), u in [0,1): argument stays in (2^-53, 1], result finite.
    return -std::log(1.0 - uniform53(eng));
}

std::uint64_t poisson_variate(Engine& eng, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw numeric_error("poisson_variate: bad mean");
    if (lambda == 0.0) return 0;
    if (lambda <= 30.0) {
        const double limit = std::exp(-lambda);
        std::uint64_t n = 0;
        double prod = uniform53(eng);
        while (prod > limit) {
            ++n;
            prod *= uniform53(eng);
        }
        return n;
    }
    const double half = 0.5 * lambda;
    return poisson_variate(eng, half) + poisson_variate(eng, lambda - half);
}

namespace {

// Inversion by upward recursion on the pmf, starting at 0. Only called with
// n*p moderate, so the expected step count is small; the loop is capped at n.
std::uint64_t binomial_inversion(Engine& eng, std::uint64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    double pmf = std::pow(q, static_cast<double>(n));
    double cdf = pmf;
    const double u = uniform53(eng);
    std::uint64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= s * (static_cast<double>(n - k + 1) / static_cast<double>(k));
        cdf += pmf;
    }
    return k;
}

} // namespace

std::uint64_t binomial_variate(Engine& eng, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw numeric_error("binomial_variate: bad p");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial_variate(eng, n, 1.0 - p);
    if (static_cast<double>(n) * p <= 300.0)
        return binomial_inversion(eng, n, p);
    const std::uint64_t h = n / 2;
    return binomial_variate(eng, h, p) + binomial_variate(eng, n - h, p);
}

} // namespace fidsta
