#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fidsta/dims.hpp"
#include "fidsta/quadrature.hpp"
#include "fidsta/special.hpp"

namespace fidsta {

enum class PdfForm { ExactSeries, LargeDApprox };

struct MomentSet {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};

// Distribution of the k-th largest output probability of a Haar-random state.
//
// ExactSeries evaluates the alternating finite-difference series. The series
// cancels catastrophically away from small k (tens to thousands of decimal
// digits by D = 2^14), so evaluation is two-tier: a compensated double pass
// first, escalated to GMP/MPFR big floats whenever the double sum retains too
// few significant bits. Results smaller than floor_abs() (1e-14 of the peak
// scale) are reported as exactly 0.
//
// LargeDApprox is the low-rank exponential-family form; its normalization is
// fixed once at construction by adaptive quadrature in log space.
//
// Immutable after construction; concurrent pdf() calls are safe.
class RankPdf {
  public:
    static constexpr std::uint64_t kExactCeiling = std::uint64_t(1) << 14;

    // k_max_approx: guard for the approximate form (default 4N); pass 0 for
    // the default, anything >= D to disable the guard.
    RankPdf(Dims dims, std::uint64_t k, PdfForm form, std::uint64_t k_max_approx = 0);

    double pdf(double x) const;

    const Dims& dims() const { return dims_; }
    std::uint64_t rank() const { return k_; }
    PdfForm form() const { return form_; }
    double log_norm() const { return log_norm_; }
    double support_max() const;
    double floor_abs() const { return floor_abs_; }
    double mean() const { return mean_; }
    double variance() const { return var_; }

    // Split hints for quadrature over the support: the series has a kink at
    // every 1/j, and the mass concentrates at mean +- a few sigma.
    std::vector<double> quad_hints() const;

  private:
    Dims dims_;
    std::uint64_t k_;
    PdfForm form_;
    double log_norm_ = 0.0; // exact: ln(D(D-1)C(D-1,k-1)); approx: -ln integral
    double mean_ = 0.0, var_ = 0.0;
    double floor_abs_ = 0.0;
    std::shared_ptr<const LogFactorialTable> lf_;

    double exact_eval(double x) const;
    double exact_eval_mp(double x, double ln_term_max) const;
    double approx_exponent(double x) const;
};

// Convenience wrappers matching the operation list. Each constructs a
// throwaway RankPdf; hot paths should hold one and call pdf().
double exact_pdf(const Dims& dims, std::uint64_t k, double x);
double approx_pdf(const Dims& dims, std::uint64_t k, double x);

// <p_k> = (psi(D+1) - psi(k)) / D
double digamma_mean(const Dims& dims, std::uint64_t k);

// mean, <p_k^2> = D<p_k>^2/(D+1) + (psi'(k) - psi'(D+1)) / (D(D+1)), variance
MomentSet second_moment(const Dims& dims, std::uint64_t k);

// Marginal of a single output probability: (D-1)(1-x)^(D-2), log-space.
double pt_pdf(const Dims& dims, double x);

// Integral of pdf over [a, b] with the pdf's own split hints.
QuadResult integrate_pdf(const RankPdf& pdf, double a, double b,
                         double abs_tol = 1e-12, double rel_tol = 1e-12);

} // namespace fidsta
