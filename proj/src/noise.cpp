#include "fidsta/noise.hpp"

#include <algorithm>

#include "fidsta/quadrature.hpp"

namespace fidsta {

QuadResult integrate_deformed_pdf(const DeformedRankPdf& pdf, double a, double b,
                                  double abs_tol, double rel_tol) {
    a = std::max(a, pdf.support_min());
    b = std::min(b, pdf.support_max());
    if (b <= a) return QuadResult{0.0, 0.0};
    return integrate_with_breakpoints([&](double x) { return pdf.pdf(x); }, a, b,
                                      pdf.quad_hints(), abs_tol, rel_tol);
}

} // namespace fidsta
