// Big-float fallback for the exact series. The alternating sum loses
// (ln_term_max + log_norm - ln floor)/ln 2 bits to cancellation; we simply
// grant that many bits plus guard and evaluate term by term. Binomials are
// exact integers built incrementally, so the only rounding is in the powers
// and the accumulation, both at full working precision.

#include <cmath>
#include <string>

#include <gmp.h>
#include <mpfr.h>

#include "fidsta/errors.hpp"
#include "fidsta/orderstat.hpp"

namespace fidsta {

double RankPdf::exact_eval_mp(double x, double ln_term_max) const {
    const std::uint64_t D = dims_.dim;
    double need_ln = ln_term_max + log_norm_ - std::log(floor_abs_);
    if (need_ln < 0.0) need_ln = 0.0;
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(need_ln / 0.6931471805599453) + 96;
    if (prec < 128) prec = 128;
    if (prec > 80000) throw numeric_error("exact series: precision demand out of range");

    mpfr_t xm, t, term, acc;
    mpfr_init2(xm, prec);
    mpfr_init2(t, prec);
    mpfr_init2(term, prec);
    mpfr_init2(acc, prec);
    mpz_t bin, nb;
    mpz_init_set_ui(bin, 1);
    mpz_init(nb);

    mpfr_set_d(xm, x, MPFR_RNDN); // doubles embed exactly
    mpfr_set_ui(acc, 0, MPFR_RNDN);

    for (std::uint64_t j = k_; j <= D; ++j) {
        mpfr_mul_ui(t, xm, static_cast<unsigned long>(j), MPFR_RNDN);
        mpfr_ui_sub(t, 1, t, MPFR_RNDN);
        const int sgn = mpfr_sgn(t);
        if (sgn < 0) break;
        const bool negative = ((j - k_) & 1) != 0;
        if (sgn == 0) {
            if (D == 2) { // (1-jx)^0 = 1 at the support edge
                if (negative) mpfr_sub_z(acc, acc, bin, MPFR_RNDN);
                else mpfr_add_z(acc, acc, bin, MPFR_RNDN);
            }
        } else {
            mpfr_pow_ui(term, t, static_cast<unsigned long>(D - 2), MPFR_RNDN);
            mpfr_mul_z(term, term, bin, MPFR_RNDN);
            if (negative) mpfr_sub(acc, acc, term, MPFR_RNDN);
            else mpfr_add(acc, acc, term, MPFR_RNDN);
        }
        if (j < D) { // C(D-k, r) -> C(D-k, r+1)
            const std::uint64_t r = j - k_;
            mpz_mul_ui(bin, bin, static_cast<unsigned long>(D - k_ - r));
            mpz_divexact_ui(bin, bin, static_cast<unsigned long>(r + 1));
        }
    }

    mpz_bin_uiui(nb, static_cast<unsigned long>(D - 1), static_cast<unsigned long>(k_ - 1));
    mpfr_mul_z(acc, acc, nb, MPFR_RNDN);
    mpfr_mul_ui(acc, acc, static_cast<unsigned long>(D), MPFR_RNDN);
    mpfr_mul_ui(acc, acc, static_cast<unsigned long>(D - 1), MPFR_RNDN);
    const double value = mpfr_get_d(acc, MPFR_RNDN);

    mpfr_clear(xm);
    mpfr_clear(t);
    mpfr_clear(term);
    mpfr_clear(acc);
    mpz_clear(bin);
    mpz_clear(nb);

    if (std::abs(value) < floor_abs_) return 0.0;
    if (value < 0.0)
        throw numeric_error("exact series produced a negative density beyond the noise floor at x=" +
                            std::to_string(x));
    return value;
}

} // namespace fidsta
