#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fidsta/quadrature.hpp"

using namespace fidsta;

TEST_CASE("polynomials are exact") {
    const auto r = integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-14);
    const auto r7 = integrate([](double x) { return std::pow(x, 7) - 3 * x; }, -1.0, 2.0);
    // exact: 255/8 - 3*3/2 = 27.375
    CHECK(std::abs(r7.value - 27.375) < 1e-12);
}

TEST_CASE("smooth transcendentals") {
    const double pi = 3.14159265358979323846;
    const auto s = integrate([](double x) { return std::sin(x); }, 0.0, pi);
    CHECK(std::abs(s.value - 2.0) < 1e-13);
    const auto c = integrate([](double x) { return std::cos(50.0 * x); }, 0.0, 1.0);
    CHECK(std::abs(c.value - std::sin(50.0) / 50.0) < 1e-12);
}

TEST_CASE("integrable endpoint singularity converges") {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                             1e-12, 1e-12, 60);
    CHECK(std::abs(r.value - 2.0) < 1e-8);
}

TEST_CASE("kinked integrand with a breakpoint hint") {
    const auto f = [](double x) { return std::abs(x - 1.0 / 3.0); };
    const auto r = integrate_with_breakpoints(f, 0.0, 1.0, {1.0 / 3.0});
    // int_0^1 |x - 1/3| dx = (1/9 + 4/9) / 2 = 5/18
    CHECK(std::abs(r.value - 5.0 / 18.0) < 1e-13);
}

TEST_CASE("error estimate is nonnegative and small for smooth f") {
    const auto r = integrate([](double x) { return std::exp(-x * x); }, -3.0, 3.0);
    CHECK(r.error >= 0.0);
    CHECK(r.error < 1e-9);
    CHECK(std::abs(r.value - 1.7724146965190425) < 1e-10); // sqrt(pi) erf(3)
}

TEST_CASE("orientation and degenerate range") {
    const auto fwd = integrate([](double x) { return x; }, 0.0, 2.0);
    CHECK(std::abs(fwd.value - 2.0) < 1e-13);
    const auto nil = integrate([](double x) { return x; }, 1.5, 1.5);
    CHECK(nil.value == 0.0);
}

TEST_CASE("breakpoints outside the range are ignored") {
    const auto f = [](double x) { return x * x; };
    const auto r = integrate_with_breakpoints(f, 0.0, 1.0, {-0.5, 0.25, 2.0});
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-13);
}
