#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "fidsta/errors.hpp"
#include "fidsta/noise.hpp"
#include "fidsta/quadrature.hpp"

using namespace fidsta;

namespace {

Dims dq(int n) { return Dims::from_qubits(n); }

void check_rel(double got, double want, double tol) {
    CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

std::shared_ptr<const RankPdf> base_pdf(int n, std::uint64_t k) {
    return std::make_shared<const RankPdf>(dq(n), k, PdfForm::ExactSeries);
}

} // namespace

TEST_CASE("fidelity domain") {
    CHECK_NOTHROW(NoiseModel(0.0));
    CHECK_NOTHROW(NoiseModel(1.0));
    CHECK_THROWS_AS(NoiseModel(-0.1), config_error);
    CHECK_THROWS_AS(NoiseModel(1.1), config_error);
    CHECK_THROWS_AS(NoiseModel(std::nan("")), config_error);
}

TEST_CASE("uniform probability is an exact fixed point") {
    const Dims d = dq(6);
    const double u = 1.0 / d.d();
    for (double f : {0.1, 0.3, 0.5, 0.9, 1.0})
        CHECK(apply_noise(u, NoiseModel(f), d) == u);
}

TEST_CASE("the channel preserves order and affinity") {
    const Dims d = dq(6);
    const NoiseModel noise(0.37);
    CHECK(apply_noise(0.2, noise, d) > apply_noise(0.1, noise, d));
    // affine: midpoint maps to midpoint
    const double a = apply_noise(0.1, noise, d);
    const double b = apply_noise(0.3, noise, d);
    check_rel(apply_noise(0.2, noise, d), 0.5 * (a + b), 1e-15);
    // f=1 is the identity
    CHECK(apply_noise(0.1234, NoiseModel(1.0), d) == 0.1234);
}

TEST_CASE("noisy mean reference") {
    check_rel(noisy_mean(dq(6), 8, NoiseModel(0.5)), 0.024617451256629892, 1e-12);
}

TEST_CASE("deformed pdf reference value") {
    DeformedRankPdf def(base_pdf(6, 8), NoiseModel(0.5));
    // y = 0.02 pulls back to x = (0.02 - 0.5/64) / 0.5 = 0.024375
    check_rel(def.pdf(0.02), 1.6569300844542655, 1e-11);
    // the literal (jacobian-free) convention is exactly f times smaller
    DeformedRankPdf lit(base_pdf(6, 8), NoiseModel(0.5), JacobianMode::LiteralSubstitution);
    check_rel(lit.pdf(0.02), 0.5 * 1.6569300844542655, 1e-11);
}

TEST_CASE("deformed support endpoints") {
    DeformedRankPdf def(base_pdf(6, 8), NoiseModel(0.25));
    const double lo = 0.75 / 64.0;
    check_rel(def.support_min(), lo, 1e-15);
    check_rel(def.support_max(), 0.25 / 8.0 + lo, 1e-15);
    CHECK(def.pdf(lo * 0.99) == 0.0);
    CHECK(def.pdf(def.support_max() + 1e-9) == 0.0);
}

TEST_CASE("deformed pdfs integrate to one with the jacobian") {
    for (double f : {0.1, 0.5, 0.9}) {
        for (const auto& [n, k] :
             {std::pair<int, std::uint64_t>{4, 3}, {6, 8}, {8, 16}}) {
            DeformedRankPdf def(base_pdf(n, k), NoiseModel(f));
            const auto q = integrate_deformed_pdf(def, def.support_min(), def.support_max());
            check_rel(q.value, 1.0, 1e-8);
        }
    }
}

TEST_CASE("the literal convention integrates to f instead") {
    DeformedRankPdf lit(base_pdf(6, 8), NoiseModel(0.5), JacobianMode::LiteralSubstitution);
    const auto q = integrate_deformed_pdf(lit, lit.support_min(), lit.support_max());
    check_rel(q.value, 0.5, 1e-8);
}

TEST_CASE("deformed first moment is the noisy mean") {
    DeformedRankPdf def(base_pdf(6, 8), NoiseModel(0.3));
    const auto q = integrate_with_breakpoints([&](double x) { return x * def.pdf(x); },
                                              def.support_min(), def.support_max(),
                                              def.quad_hints());
    check_rel(q.value, noisy_mean(dq(6), 8, NoiseModel(0.3)), 1e-9);
}

TEST_CASE("f=0 has no density") {
    CHECK_THROWS_AS(DeformedRankPdf(base_pdf(6, 8), NoiseModel(0.0)), config_error);
}

TEST_CASE("f=1 reduces to the base distribution") {
    auto base = base_pdf(6, 8);
    DeformedRankPdf def(base, NoiseModel(1.0));
    for (double x : {0.01, 0.02, 0.033609902513259784, 0.08})
        check_rel(def.pdf(x), base->pdf(x), 1e-13);
}
