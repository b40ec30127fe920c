#pragma once

#include <memory>

#include "fidsta/dims.hpp"
#include "fidsta/orderstat.hpp"

namespace fidsta {

// Global depolarizing channel, parametrized by the fidelity f: every output
// probability is shifted affinely toward 1/D. f=1 is the identity; f=0 sends
// everything to the uniform value.
struct NoiseModel {
    double fidelity = 1.0;

    explicit NoiseModel(double f) : fidelity(f) {
        if (!(f >= 0.0 && f <= 1.0))
            throw config_error("fidelity must lie in [0,1]");
    }
};

inline double apply_noise(double p, const NoiseModel& noise, const Dims& dims) {
    // 1/D is the exact fixed point: f/D + (1-f)/D reassociates to 1/D only if
    // written this way, so keep the factored form.
    return noise.fidelity * p + (1.0 - noise.fidelity) / dims.d();
}

inline double noisy_mean(const Dims& dims, std::uint64_t k, const NoiseModel& noise) {
    return apply_noise(digamma_mean(dims, k), noise, dims);
}

enum class JacobianMode { WithJacobian, LiteralSubstitution };

// Noise-deformed rank distribution: the density of p_k(f) when p_k follows
// base. WithJacobian divides by f (the correct change-of-variables density);
// LiteralSubstitution omits the factor and integrates to f instead of 1.
class DeformedRankPdf {
  public:
    DeformedRankPdf(std::shared_ptr<const RankPdf> base, NoiseModel noise,
                    JacobianMode mode = JacobianMode::WithJacobian)
        : base_(std::move(base)), noise_(noise), mode_(mode) {
        if (noise_.fidelity == 0.0)
            throw config_error("degenerate channel: f=0 is a point mass at 1/D, "
                               "not a density");
    }

    double pdf(double x) const {
        const double f = noise_.fidelity;
        const double xf = (x - support_min()) / f;
        const double v = base_->pdf(xf);
        return mode_ == JacobianMode::WithJacobian ? v / f : v;
    }

    double support_min() const { return (1.0 - noise_.fidelity) / base_->dims().d(); }
    double support_max() const {
        return noise_.fidelity * base_->support_max() + support_min();
    }

    const RankPdf& base() const { return *base_; }
    const NoiseModel& noise() const { return noise_; }
    JacobianMode jacobian_mode() const { return mode_; }

    std::vector<double> quad_hints() const {
        std::vector<double> hints = base_->quad_hints();
        for (double& h : hints) h = noise_.fidelity * h + support_min();
        return hints;
    }

  private:
    std::shared_ptr<const RankPdf> base_;
    NoiseModel noise_;
    JacobianMode mode_;
};

QuadResult integrate_deformed_pdf(const DeformedRankPdf& pdf, double a, double b,
                                  double abs_tol = 1e-12, double rel_tol = 1e-12);

} // namespace fidsta
