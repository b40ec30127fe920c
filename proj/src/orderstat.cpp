#include "fidsta/orderstat.hpp"

#include <algorithm>
#include <cmath>

#include "fidsta/errors.hpp"

namespace fidsta {

namespace {

// Escalate the double pass when fewer than ~40 significant bits survive the
// cancellation: n_terms * eps / |sum_scaled| bounds the compensated-summation
// relative error, and we want pdf values good to ~1e-12 relative.
constexpr double kEscalationThreshold = 1e-12;

std::shared_ptr<const LogFactorialTable> shared_lf(std::uint64_t n_max) {
    return std::make_shared<LogFactorialTable>(n_max);
}

} // namespace

RankPdf::RankPdf(Dims dims, std::uint64_t k, PdfForm form, std::uint64_t k_max_approx)
    : dims_(dims), k_(k), form_(form) {
    check_rank(dims_, k_);
    const double D = dims_.d();
    const double m1 = (digamma(D + 1.0) - digamma(static_cast<double>(k_))) / D;
    const double m2 = D * m1 * m1 / (D + 1.0) +
                      (trigamma(static_cast<double>(k_)) - trigamma(D + 1.0)) / (D * (D + 1.0));
    mean_ = m1;
    var_ = m2 - m1 * m1;

    if (form_ == PdfForm::ExactSeries) {
        if (dims_.dim > kExactCeiling)
            throw config_error("exact series is limited to D <= 2^14; use LargeDApprox");
        lf_ = shared_lf(dims_.dim + 1);
        log_norm_ = std::log(D) + std::log(D - 1.0) + lf_->ln_binomial(dims_.dim - 1, k_ - 1);
        // peak height of a near-Gaussian bump is ~0.4/sigma; k=1 and k=D are
        // flatter but within an order of magnitude, which is all the clamp needs
        floor_abs_ = 1e-14 * (0.4 / std::sqrt(var_));
    } else {
        if (dims_.dim < 4)
            throw config_error("LargeDApprox requires D >= 4");
        const std::uint64_t cap = k_max_approx == 0 ? 4 * std::uint64_t(dims_.n_qubits)
                                                    : k_max_approx;
        if (k_ > cap)
            throw config_error("LargeDApprox guard: k=" + std::to_string(k_) +
                               " exceeds k_max=" + std::to_string(cap));
        floor_abs_ = 0.0;
        // Normalize in u = (D-2)x. The exponent h(u) = -k u + (D-k) ln(1-e^-u)
        // peaks at u* = ln(D/k); integrate exp(h - h*) and fold the shift back.
        const double kk = static_cast<double>(k_);
        const double u_star = std::log(D / kk);
        const double h_star = -kk * u_star + (D - kk) * std::log1p(-kk / D);
        const double u_hi = std::min(D - 2.0, u_star + 5.0 + 80.0 / kk);
        auto h = [&](double u) {
            if (u <= 0.0) return 0.0;
            return std::exp(-kk * u + (D - kk) * std::log1p(-std::exp(-u)) - h_star);
        };
        const std::vector<double> hints{0.25 * u_star, 0.5 * u_star, u_star,
                                        std::min(u_hi, u_star + 2.0)};
        QuadResult q = integrate_with_breakpoints(h, 0.0, u_hi, hints, 1e-13, 1e-13);
        if (!(q.value > 0.0) || !std::isfinite(q.value))
            throw numeric_error("approx normalization quadrature failed");
        log_norm_ = -(h_star + std::log(q.value) - std::log(D - 2.0));
    }
}

double RankPdf::support_max() const {
    if (form_ == PdfForm::ExactSeries)
        return std::min(1.0, 1.0 / static_cast<double>(k_));
    return 1.0;
}

double RankPdf::approx_exponent(double x) const {
    const double D = dims_.d();
    const double kk = static_cast<double>(k_);
    const double u = (D - 2.0) * x;
    if (u <= 0.0) return -HUGE_VAL;
    return -kk * u + (D - kk) * std::log1p(-std::exp(-u));
}

double RankPdf::pdf(double x) const {
    if (!(x >= 0.0) || x > 1.0) return 0.0;
    if (form_ == PdfForm::LargeDApprox) {
        const double e = approx_exponent(x);
        return e == -HUGE_VAL ? 0.0 : std::exp(log_norm_ + e);
    }
    const double kk = static_cast<double>(k_);
    if (kk * x > 1.0) return 0.0;
    const double D = dims_.d();
    if (x == 0.0) return k_ == dims_.dim ? D * (D - 1.0) : 0.0;
    return exact_eval(x);
}

double RankPdf::exact_eval(double x) const {
    const std::uint64_t D = dims_.dim;
    const double Dm2 = static_cast<double>(D) - 2.0;

    // pdf = D(D-1) C(D-1,k-1) * sum_{j>=k} (-1)^(j-k) C(D-k, j-k) (1-jx)^(D-2).
    // Pass 1 finds the largest term in log space; pass 2 sums terms scaled by
    // it with Neumaier compensation. The scaled sum's magnitude tells how many
    // bits the cancellation destroyed.
    thread_local std::vector<double> ln_terms;
    thread_local std::vector<int> signs;
    ln_terms.clear();
    signs.clear();

    double ln_max = -HUGE_VAL;
    bool boundary_unit = false; // a (1-jx)==0 term contributes 1 only for D==2
    for (std::uint64_t j = k_; j <= D; ++j) {
        const double t = std::fma(-static_cast<double>(j), x, 1.0);
        if (t < 0.0) break;
        if (t == 0.0) {
            if (D == 2) boundary_unit = true;
            continue;
        }
        const double lt = lf_->ln_binomial(D - k_, j - k_) + Dm2 * std::log(t);
        ln_terms.push_back(lt);
        signs.push_back(((j - k_) & 1) ? -1 : 1);
        if (lt > ln_max) ln_max = lt;
    }
    if (boundary_unit) {
        ln_terms.push_back(0.0);
        signs.push_back(((dims_.dim - k_) & 1) ? -1 : 1);
        if (0.0 > ln_max) ln_max = 0.0;
    }
    if (ln_terms.empty()) return 0.0;

    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < ln_terms.size(); ++i) {
        const double term = signs[i] * std::exp(ln_terms[i] - ln_max);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    sum += comp;

    const double n_eps = static_cast<double>(ln_terms.size()) * 2.220446049250313e-16;
    if (std::abs(sum) * kEscalationThreshold <= n_eps)
        return exact_eval_mp(x, ln_max);

    const double value = sum * std::exp(ln_max + log_norm_);
    if (std::abs(value) < floor_abs_) return 0.0;
    if (value < 0.0) return exact_eval_mp(x, ln_max);
    return value;
}

double exact_pdf(const Dims& dims, std::uint64_t k, double x) {
    return RankPdf(dims, k, PdfForm::ExactSeries).pdf(x);
}

double approx_pdf(const Dims& dims, std::uint64_t k, double x) {
    return RankPdf(dims, k, PdfForm::LargeDApprox).pdf(x);
}

double digamma_mean(const Dims& dims, std::uint64_t k) {
    check_rank(dims, k);
    const double D = dims.d();
    return (digamma(D + 1.0) - digamma(static_cast<double>(k))) / D;
}

MomentSet second_moment(const Dims& dims, std::uint64_t k) {
    check_rank(dims, k);
    const double D = dims.d();
    const double m1 = digamma_mean(dims, k);
    const double m2 = D * m1 * m1 / (D + 1.0) +
                      (trigamma(static_cast<double>(k)) - trigamma(D + 1.0)) / (D * (D + 1.0));
    return MomentSet{m1, m2, m2 - m1 * m1};
}

double pt_pdf(const Dims& dims, double x) {
    if (!(x >= 0.0) || x > 1.0) return 0.0;
    const double D = dims.d();
    if (x == 1.0) return dims.dim == 2 ? 1.0 : 0.0;
    return std::exp(std::log(D - 1.0) + (D - 2.0) * std::log1p(-x));
}

std::vector<double> RankPdf::quad_hints() const {
    std::vector<double> hints;
    const double sig = std::sqrt(var_);
    for (double s : {-32.0, -16.0, -8.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
        const double p = mean_ + s * sig;
        if (p > 0.0 && p < support_max()) hints.push_back(p);
    }
    if (form_ == PdfForm::ExactSeries) {
        // kinks at 1/j matter near the support edge where few terms are live
        const std::uint64_t j_hi = std::min(dims_.dim, k_ + 64);
        for (std::uint64_t j = k_; j <= j_hi; ++j) {
            const double p = 1.0 / static_cast<double>(j);
            if (p < support_max()) hints.push_back(p);
        }
    }
    std::sort(hints.begin(), hints.end());
    return hints;
}

QuadResult integrate_pdf(const RankPdf& pdf, double a, double b,
                         double abs_tol, double rel_tol) {
    b = std::min(b, pdf.support_max());
    if (b <= a) return QuadResult{0.0, 0.0};
    return integrate_with_breakpoints([&](double x) { return pdf.pdf(x); }, a, b,
                                      pdf.quad_hints(), abs_tol, rel_tol);
}

} // namespace fidsta
