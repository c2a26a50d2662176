#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "ulln/distributions.hpp"
#include "ulln/error.hpp"
#include "ulln/estimators.hpp"
#include "ulln/rng.hpp"

using namespace ulln;

namespace {
const DistributionSpec kLaplace{Family::laplace, 0.0, 1.0};
const EstimatorSpec kSign = make_estimator("sign-m");
const EstimatorSpec kMean = make_estimator("mean");
const EstimatorSpec kMedian = make_estimator("median");

std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& g) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[g() % i]);
    return p;
}
}  // namespace

TEST_CASE("registry") {
    CHECK(estimator_ids() == std::vector<std::string>{"median", "mean", "sign-m", "first-observation", "constant"});
    CHECK_THROWS_AS(make_estimator("bogus"), std::exception);
    CHECK(make_estimator("constant", 2.0, 1.0).constant_value == 3.0);
    CHECK_FALSE(make_estimator("first-observation").symmetric);
}

TEST_CASE("median examples") {
    CHECK(median(std::vector<double>{3, 1, 2}) == 2);
    CHECK(median(std::vector<double>{1, 2, 3, 4}) == 2.5);
    CHECK(median(std::vector<double>{7}) == 7);
    CHECK_THROWS(median(std::vector<double>{}));
}

TEST_CASE("m_estimate examples") {
    CHECK(m_estimate(std::vector<double>{0, 2, 4}, kMean) == doctest::Approx(2).epsilon(1e-12));
    CHECK(m_estimate(std::vector<double>{1, 2, 4}, kSign) == doctest::Approx(2).epsilon(1e-12));
    CHECK(m_estimate(std::vector<double>{1, 3}, kSign) == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("default tolerance") {
    CHECK(default_tolerance(std::vector<double>{0.1, 0.2}) == 1e-12);
    CHECK(default_tolerance(std::vector<double>{-300, 2}) == doctest::Approx(3e-10));
}

TEST_CASE("sign M-estimate equals the median") {
    SplitMix64 g(11);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto n = static_cast<std::size_t>(1 + g() % 40);
        const auto s = draw_sample(kLaplace, n, g());
        const double tol = default_tolerance(s);
        CHECK(std::abs(m_estimate(s, kSign) - oracle::sorted_median(s)) <= tol);
    }
}

TEST_CASE("mean M-estimate and score residual") {
    SplitMix64 g(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(1 + g() % 50);
        const auto s = draw_sample(kLaplace, n, g());
        const double t = m_estimate(s, kMean);
        double score = 0.0;
        for (double x : s) score += x - t;
        CHECK(std::abs(score) <= static_cast<double>(n) * 2 * default_tolerance(s));
        CHECK(t == doctest::Approx(oracle::mean(s)).epsilon(1e-10));
        const double ts = m_estimate(s, kSign);
        double sign_score = 0.0;
        for (double x : s) sign_score += psi_sign(x - ts);
        if (n % 2 == 0) CHECK(sign_score == 0.0);
        else CHECK(std::abs(sign_score) <= 1.0);
    }
}

TEST_CASE("translation equivariance") {
    const auto s = draw_sample(kLaplace, 17, 4);
    for (double c : {-5.0, 1.0, 100.0}) {
        std::vector<double> shifted(s);
        for (double& x : shifted) x += c;
        for (const auto* e : {&kSign, &kMean}) {
            const double tol = default_tolerance(shifted);
            CHECK(std::abs(m_estimate(shifted, *e) - (m_estimate(s, *e) + c)) <= 2 * tol);
        }
    }
}

TEST_CASE("check_psi") {
    CHECK_NOTHROW(check_psi(kSign, 10.0));
    CHECK_NOTHROW(check_psi(kMean, 10.0));
    EstimatorSpec bad = kSign;
    bad.psi = [](double y) { return -y; };
    CHECK_THROWS_AS(check_psi(bad, 5.0), InvalidPsiError);
    bad.psi = [](double y) { return y + 1.0; };
    CHECK_THROWS_AS(check_psi(bad, 5.0), InvalidPsiError);
}

TEST_CASE("leave_first_out") {
    CHECK(leave_first_out(std::vector<double>{100, 1, 2, 3}, kMedian) == 2);
    CHECK(leave_first_out(std::vector<double>{10, 0, 2, 4}, kMean) == doctest::Approx(2).epsilon(1e-12));
    SplitMix64 g(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = draw_sample(kLaplace, 2 + g() % 30, g());
        const std::vector<double> suffix(s.begin() + 1, s.end());
        CHECK(leave_first_out(s, kSign) == m_estimate(suffix, kSign));
        CHECK(leave_first_out(s, kMean) == m_estimate(suffix, kMean));
    }
    CHECK_THROWS(leave_first_out(std::vector<double>{1.0}, kMedian));
}

TEST_CASE("interpolate") {
    CHECK(interpolate(1, 5, 0) == 1);
    CHECK(interpolate(1, 5, 1) == 5);
    CHECK(interpolate(1, 5, 0.5) == 3);
    CHECK(interpolate(-2, 6, 0.25) == doctest::Approx(0.5 * (interpolate(-2, 6, 0) + interpolate(-2, 6, 0.5))));
    CHECK_THROWS_AS(interpolate(1, 5, 1.5), DomainError);
}

TEST_CASE("dispatch on kind") {
    const std::vector<double> s{4, -1, 2};
    CHECK(estimate(s, kMedian) == 2);
    CHECK(estimate(s, make_estimator("first-observation")) == 4);
    CHECK(estimate(s, make_estimator("constant", 0.0, 1.0)) == 1.0);
}

TEST_CASE("bracketing examples") {
    const auto a = check_bracketing(std::vector<double>{0, 10}, kSign);
    CHECK(a.verdict == Verdict::holds);
    CHECK(a.full == doctest::Approx(5));
    CHECK(a.suffix == doctest::Approx(10));
    const auto b = check_bracketing(std::vector<double>{6, 0, 0, 0}, kMean);
    CHECK(b.verdict == Verdict::holds);
    CHECK(b.full == doctest::Approx(1.5));
    CHECK(b.suffix == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("bracketing sweep") {
    SplitMix64 g(8);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(2 + g() % 19);
        const auto s = draw_sample(kLaplace, n, g());
        violations += check_bracketing(s, trial % 2 ? kSign : kMean).verdict == Verdict::violated;
    }
    CHECK(violations == 0);
}

TEST_CASE("permutation symmetry") {
    const std::vector<std::size_t> perm{1, 2, 0};
    CHECK(permutation_symmetry_check(std::vector<double>{3, 1, 2}, kMedian, perm) == Verdict::holds);
    SplitMix64 g(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(2 + g() % 30);
        const auto s = draw_sample(kLaplace, n, g());
        const auto p = random_permutation(n, g);
        CHECK(permutation_symmetry_check(s, kSign, p) == Verdict::holds);
        CHECK(permutation_symmetry_check(s, kMean, p) == Verdict::holds);
    }
    const std::vector<double> s{5, 1, 2};
    CHECK(permutation_symmetry_check(s, make_estimator("first-observation"), perm) == Verdict::violated);
    CHECK_THROWS(permutation_symmetry_check(s, kMedian, std::vector<std::size_t>{0, 0, 1}));
}
