#pragma once

#include <cstdint>
#include <random>

namespace fidsta {

// All randomness flows through one engine type seeded by derive_seed so that
// every trial owns an independent, reproducible stream: stream identity
// depends only on (master seed, counter), never on scheduling.

std::uint64_t splitmix64(std::uint64_t& state);

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t s = master + 0x9E3779B97F4A7C15ull * (counter + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t counter) {
    return Engine(derive_seed(master, counter));
}

// Uniform in [0,1) with exactly 53 random bits; avoids distribution-object
// implementation differences between standard libraries.
inline double uniform53(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unit-rate exponential. Used for simplex (flat Dirichlet) sampling.
double exp_variate(Engine& eng);

// Poisson with arbitrary mean: multiplicative inversion for lambda <= 30,
// recursive halving above (sum of two independent halves is exact).
std::uint64_t poisson_variate(Engine& eng, double lambda);

// Binomial(n, p): inversion when n*min(p,1-p) is small, halving split on n
// otherwise. Exact distribution in both branches.
std::uint64_t binomial_variate(Engine& eng, std::uint64_t n, double p);

} // namespace fidsta
