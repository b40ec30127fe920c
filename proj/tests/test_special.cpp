#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fidsta/errors.hpp"
#include "fidsta/special.hpp"

using namespace fidsta;

namespace {
void check_rel(double got, double want, double tol) {
    const double scale = std::max(1.0, std::abs(want));
    CHECK(std::abs(got - want) <= tol * scale);
}
} // namespace

// Reference values computed with 60-digit arbitrary-precision arithmetic and
// rounded to 17 significant digits.
TEST_CASE("digamma matches high-precision references") {
    check_rel(digamma(1.0), -0.5772156649015328606, 1e-14);
    check_rel(digamma(2.0), 0.4227843350984671394, 1e-14);
    check_rel(digamma(0.5), -1.9635100260214234794, 1e-14);
    check_rel(digamma(10.25), 2.2777047906867239690, 1e-14);
    check_rel(digamma(17.0), 2.8035133283274603683, 1e-14);
    check_rel(digamma(500.0), 6.2136077650889917418, 1e-14);
    check_rel(digamma(16385.0), 9.7040910451069184744, 1e-14);
}

TEST_CASE("trigamma matches high-precision references") {
    check_rel(trigamma(1.0), 1.6449340668482264365, 1e-14);
    check_rel(trigamma(2.0), 0.6449340668482264365, 1e-14);
    check_rel(trigamma(0.5), 4.9348022005446793094, 1e-14);
    check_rel(trigamma(10.25), 0.10247452151799186680, 1e-14);
    check_rel(trigamma(17.0), 0.060587533403239361783, 1e-14);
    check_rel(trigamma(500.0), 0.0020020013333322666678, 1e-14);
    check_rel(trigamma(16385.0), 0.000061033293642746381590, 1e-14);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
    for (double x : {0.3, 1.7, 3.7, 11.9, 250.0}) {
        const double lhs = digamma(x + 1.0);
        const double rhs = digamma(x) + 1.0 / x;
        check_rel(lhs, rhs, 1e-13);
    }
}

TEST_CASE("trigamma recurrence psi1(x+1) = psi1(x) - 1/x^2") {
    for (double x : {0.3, 1.7, 3.7, 11.9, 250.0}) {
        const double lhs = trigamma(x + 1.0);
        const double rhs = trigamma(x) - 1.0 / (x * x);
        check_rel(lhs, rhs, 1e-13);
    }
}

TEST_CASE("digamma and trigamma reject the nonpositive axis") {
    CHECK_THROWS_AS(digamma(0.0), config_error);
    CHECK_THROWS_AS(digamma(-3.0), config_error);
    CHECK_THROWS_AS(trigamma(0.0), config_error);
    CHECK_THROWS_AS(trigamma(-0.5), config_error);
}

TEST_CASE("log-factorial table matches references") {
    const LogFactorialTable lf(16384);
    check_rel(lf.ln_factorial(0), 0.0, 1e-15);
    check_rel(lf.ln_factorial(1), 0.0, 1e-15);
    check_rel(lf.ln_factorial(2), 0.69314718055994530942, 1e-14);
    check_rel(lf.ln_factorial(10), 15.104412573075515295, 1e-14);
    check_rel(lf.ln_factorial(170), 706.57306224578734706, 1e-14);
    check_rel(lf.ln_factorial(1000), 5912.1281784881633489, 1e-14);
    check_rel(lf.ln_factorial(16384), 142613.09866200140264, 1e-14);
}

TEST_CASE("ln_binomial agrees with direct binomials and is symmetric") {
    const LogFactorialTable lf(200);
    check_rel(lf.ln_binomial(52, 5), std::log(2598960.0), 1e-13);
    check_rel(lf.ln_binomial(10, 0), 0.0, 1e-15);
    check_rel(lf.ln_binomial(10, 10), 0.0, 1e-15);
    check_rel(lf.ln_binomial(100, 37), lf.ln_binomial(100, 63), 1e-15);
}
