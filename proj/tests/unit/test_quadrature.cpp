#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ulln/error.hpp"
#include "ulln/quadrature.hpp"

using namespace ulln;

TEST_CASE("polynomials and smooth functions") {
    const auto r = integrate([](double x) { return x * x * x - 2 * x; }, -1.0, 3.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(81.0 / 4 - 1.0 / 4 - 8.0).epsilon(1e-14));
    const auto s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));
    const auto o = integrate([](double x) { return std::exp(-x * x); }, -5.0, 5.0);
    CHECK(o.value == doctest::Approx(oracle::simpson([](double x) { return std::exp(-x * x); }, -5, 5, 20000)).epsilon(1e-12));
}

TEST_CASE("reversed limits flip the sign") {
    const auto f = [](double x) { return std::exp(x); };
    CHECK(integrate(f, 1.0, 0.0).value == doctest::Approx(-(std::exp(1.0) - 1)).epsilon(1e-14));
    CHECK(integrate(f, 2.0, 2.0).value == 0.0);
}

TEST_CASE("infinite ranges") {
    const auto r = integrate([](double x) { return std::exp(-std::abs(x)); }, -INFINITY, INFINITY,
                             std::array<double, 1>{0.0});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-11));
    const auto g = integrate([](double x) { return 1.0 / (1 + x * x); }, 0.0, INFINITY);
    CHECK(g.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
}

TEST_CASE("integrable log singularity at a break point") {
    const std::array<double, 1> br{0.0};
    const auto r = integrate([](double u) { return std::abs(std::log(std::abs(u))); }, -1.0, 1.0, br);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 2.0) < 1e-9);
    const auto fi = check_finite([](double u) { return std::abs(std::log(std::abs(u))); }, -1.0, 1.0, br, 1e-10);
    CHECK(fi.finite);
    CHECK(std::abs(fi.value - 2.0) < 1e-9);
}

TEST_CASE("inverse square root singularity") {
    const std::array<double, 1> br{0.0};
    const auto r = integrate([](double u) { return 1.0 / std::sqrt(std::abs(u)); }, -1.0, 1.0, br,
                             QuadOptions{1e-9, 0.0, 4000});
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("divergent integrals are detected") {
    const std::array<double, 1> br{0.0};
    const auto recip = [](double u) { return 1.0 / std::abs(u); };
    const auto fi = check_finite(recip, -1.0, 1.0, br, 1e-9);
    CHECK_FALSE(fi.finite);
    CHECK_FALSE(fi.reason.empty());
    CHECK_THROWS_AS(integrate_or_throw(recip, -1.0, 1.0, br, 1e-9, "1/|u|"), NonIntegrableError);
    CHECK_FALSE(check_finite([](double x) { return 1.0 / (1.0 + std::abs(x)); }, 0.0, INFINITY, {}, 1e-9).finite);
}

TEST_CASE("shrinking neighborhoods") {
    const auto log_levels = shrinking_neighborhood([](double u) { return std::abs(std::log(std::abs(u))); }, 0.0,
                                                   1.0, 6, 1e-10);
    REQUIRE(log_levels.size() == 6);
    for (int k = 1; k <= 6; ++k) {
        const double delta = std::pow(10.0, -k);
        CHECK(log_levels[k - 1] == doctest::Approx(2.0 - 2.0 * delta * (1.0 - std::log(delta))).epsilon(1e-9));
    }
    const auto recip_levels = shrinking_neighborhood([](double u) { return 1.0 / std::abs(u); }, 0.0, 1.0, 6, 1e-10);
    for (std::size_t k = 1; k < recip_levels.size(); ++k) {
        CHECK(recip_levels[k] - recip_levels[k - 1] == doctest::Approx(2 * std::log(10.0)).epsilon(1e-6));
    }
}
