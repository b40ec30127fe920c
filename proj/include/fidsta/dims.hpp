#pragma once

#include <cstdint>

#include "fidsta/errors.hpp"

namespace fidsta {

// System size. dim is always 2^n_qubits; both are kept because nearly every
// formula wants D as a double while the CLI and file headers speak in qubits.
struct Dims {
    int n_qubits = 0;
    std::uint64_t dim = 0;

    static Dims from_qubits(int n) {
        if (n < 1 || n > 63)
            throw config_error("n_qubits must be in [1, 63], got " + std::to_string(n));
        return Dims{n, std::uint64_t(1) << n};
    }

    double d() const { return static_cast<double>(dim); }
};

inline void check_rank(const Dims& dims, std::uint64_t k) {
    if (k < 1 || k > dims.dim)
        throw config_error("rank k must be in [1, D], got k=" + std::to_string(k) +
                           " with D=" + std::to_string(dims.dim));
}

} // namespace fidsta
