#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ulln/distributions.hpp"
#include "ulln/engine.hpp"
#include "ulln/error.hpp"
#include "ulln/estimators.hpp"
#include "ulln/hfuncs.hpp"
#include "ulln/quadrature.hpp"

using namespace ulln;

namespace {

SimulationPlan flagship_plan() {
    SimulationPlan p;
    p.dist = {Family::laplace, 0.0, 1.0};
    p.h = make_h("signlog", flagship_envelope(1.0));
    p.estimator = make_estimator("median");
    p.estimator.tail = TailBound{1.0, 1.0, 8.0, 8};
    p.n_grid = {50, 200};
    p.v_grid = {0.0, 0.5, 1.0};
    p.replicates = 200;
    p.master_seed = 77;
    return p;
}

// E|h(X - theta)| for signlog under Laplace(0, 1) by Simpson on a split range.
double abs_signlog_moment() {
    const auto f = [](double x) { return std::abs(std::log(x)) * std::exp(-x / 2) / 4; };
    // 2 * int_0^inf; substitute x = s^2 near 0 to tame the log.
    const double near = oracle::simpson([&](double s) { return s > 0 ? 2 * s * f(s * s) : 0.0; }, 0.0, 1.0, 200000);
    const double far = oracle::simpson(f, 1.0, 120.0, 400000);
    return 2 * (near + far);
}

}  // namespace

TEST_CASE("plan validation") {
    auto p = flagship_plan();
    CHECK_NOTHROW(p.validate());
    p.v_grid = {0.0, 0.5};
    CHECK_THROWS(p.validate());
    p.v_grid = {0.0};
    CHECK_NOTHROW(p.validate());
    p = flagship_plan();
    p.n_grid = {200, 50};
    CHECK_THROWS(p.validate());
    p = flagship_plan();
    p.replicates = 0;
    CHECK_THROWS(p.validate());
}

TEST_CASE("seed derivation") {
    const auto a = replicate_seed(1, Stream::l1, 50, 0);
    CHECK(a == replicate_seed(1, Stream::l1, 50, 0));
    CHECK(a != replicate_seed(1, Stream::l1, 50, 1));
    CHECK(a != replicate_seed(1, Stream::l1, 51, 0));
    CHECK(a != replicate_seed(2, Stream::l1, 50, 0));
    CHECK(a != replicate_seed(1, Stream::audit, 50, 0));
}

TEST_CASE("empirical_h_mean examples") {
    const auto& h = flagship_plan().h;
    CHECK(std::abs(empirical_h_mean(std::vector<double>{std::numbers::e, 1 / std::numbers::e}, 0, h)) < 1e-15);
    CHECK(empirical_h_mean(std::vector<double>{5}, 5, h) == 0.0);
    CHECK(empirical_h_mean(std::vector<double>{1 + std::numbers::e}, 1, h) == doctest::Approx(1.0));
}

TEST_CASE("target expectation") {
    const DistributionSpec d{Family::laplace, 0.0, 1.0};
    CHECK(std::abs(target_expectation(d, make_h("signlog", flagship_envelope(1)), 1e-10)) < 1e-10);
    CHECK(std::abs(target_expectation(d, make_h("identity", flagship_envelope(1)), 1e-10)) < 1e-10);
    CHECK_THROWS_AS(target_expectation(d, make_h("reciprocal", flagship_envelope(1)), 1e-10), NonIntegrableError);
    // identity shifted by theta: E(X - 1) = -1.
    CHECK(target_expectation(d, make_h("identity", flagship_envelope(1)), 1e-10, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("l1 error at n = 1, v = 0 is E|h|") {
    auto p = flagship_plan();
    p.n_grid = {1};
    p.v_grid = {0.0};
    p.replicates = 10000;
    p.target = 0.0;
    const auto pt = l1_error_at(p, 1, 0.0);
    CHECK(std::abs(pt.estimate - abs_signlog_moment()) < 3 * pt.se);
}

TEST_CASE("single replicate convention") {
    auto p = flagship_plan();
    p.replicates = 1;
    p.target = 0.0;
    const auto pt = l1_error_at(p, 50, 0.5);
    CHECK(pt.se == 0.0);
    const auto s = draw_sample(p.dist, 50, replicate_seed(p.master_seed, Stream::l1, 50, 0));
    const double t = interpolate(0.0, median(s), 0.5);
    CHECK(pt.estimate == std::abs(empirical_h_mean(s, t, p.h)));
    CHECK(sup_l1_curve(p).single_replicate);
}

TEST_CASE("sup_l1_curve structure and determinism") {
    auto p = flagship_plan();
    const auto a = sup_l1_curve(p);
    const auto b = sup_l1_curve(p, EngineOptions{3});
    REQUIRE(a.points.size() == 6);
    REQUIRE(a.sups.size() == 2);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].estimate == b.points[i].estimate);
        CHECK(a.points[i].se == b.points[i].se);
    }
    for (std::size_t k = 0; k < a.sups.size(); ++k) {
        CHECK(a.sups[k].sup >= a.points[3 * k + 2].estimate);
        CHECK(a.sups[k].sup == std::max({a.points[3 * k].estimate, a.points[3 * k + 1].estimate, a.points[3 * k + 2].estimate}));
    }
    p.v_grid = {0.0};
    const auto single = sup_l1_curve(p);
    CHECK(single.sups[0].sup == single.points[0].estimate);
}

TEST_CASE("classical LLN column at n = 3200") {
    auto p = flagship_plan();
    p.n_grid = {3200};
    p.v_grid = {0.0, 1.0};
    p.replicates = 2000;
    const auto c = sup_l1_curve(p);
    CHECK(c.points[0].estimate < 0.05);
}

TEST_CASE("convergence study: positive and negative controls") {
    auto p = flagship_plan();
    p.n_grid = {50, 200, 800};
    p.v_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    p.replicates = 400;
    const auto flag = convergence_study(p, 0.2);
    CHECK(flag.decreasing);
    CHECK(flag.converging());

    auto id = p;
    id.h = make_h("identity", flagship_envelope(1.0));
    id.estimator = make_estimator("mean");
    const auto ident = convergence_study(id, 0.2);
    CHECK(ident.converging());

    auto con = p;
    con.estimator = make_estimator("constant", 0.0, 1.0);
    const auto constant = convergence_study(con, 0.2);
    CHECK_FALSE(constant.converging());
    CHECK(constant.rows.back().sup > 0.2);

    p.n_grid = {50, 200};
    CHECK_THROWS(convergence_study(p, 0.2));
}

TEST_CASE("pinned samples") {
    const DistributionSpec d{Family::laplace, 0.0, 1.0};
    const auto a = pinned_sample(d, 3.25, 10, 5);
    CHECK(a.size() == 10);
    CHECK(a[0] == 3.25);
    CHECK(a == pinned_sample(d, 3.25, 10, 5));
    std::vector<double> second;
    second.reserve(100000);
    for (std::uint64_t s = 0; s < 100000; ++s) second.push_back(pinned_sample(d, -1.0, 2, s)[1]);
    CHECK(oracle::ks_statistic(second, [](double x) { return oracle::laplace_cdf(x, 0, 1); }) < 0.01);
}

TEST_CASE("conditional tail probability") {
    auto p = flagship_plan();
    const auto v0 = conditional_tail_probability(p, 0.0, 12.0, 51, 0.0, 1000);
    CHECK(v0.estimate == 0.0);
    const auto t = conditional_tail_probability(p, 0.0, 12.0, 51, 1.0, 100000);
    CHECK(t.estimate >= 0.0);
    CHECK(t.estimate <= 1.0);
    CHECK(t.bound == doctest::Approx(std::exp(-12.0)));
    CHECK(t.estimate <= std::exp(-12.0) + 3 * t.se);
    CHECK_THROWS_AS(conditional_tail_probability(p, 0.0, 3.0, 51, 1.0, 100), RegimeError);
    const auto lower = conditional_tail_probability(p, 0.0, -12.0, 51, 1.0, 1000);
    CHECK_FALSE(lower.upper_branch);

    // Monotone in u on the upper branch at a level where events are visible.
    p.h.envelope = EnvelopeParams{0.0, 0.5, 1.0, 1.0, 1.0};
    double prev = 1.0, prev_se = 0.0;
    for (double u : {0.5, 1.0, 1.5, 2.0}) {
        const auto r = conditional_tail_probability(p, 0.0, u, 5, 1.0, 20000);
        CHECK(r.estimate <= prev + 3 * std::hypot(r.se, prev_se));
        prev = r.estimate;
        prev_se = r.se;
    }
}

TEST_CASE("taylor residual") {
    const auto& h = flagship_plan().h;
    const auto s = draw_sample({Family::laplace, 0.0, 1.0}, 51, 3);
    CHECK(taylor_residual(s, 0.2, 0.2, h, 1e-8).residual == 0.0);

    const std::vector<double> one{2.0};
    const auto r = taylor_residual(one, 0.1, 0.7, h, 1e-8);
    CHECK(r.residual < 1e-8);
    const double slope = (eval_antideriv(h, 2.0 - 0.7) - eval_antideriv(h, 2.0 - 0.1)) / 0.6;
    CHECK(r.integral == doctest::Approx(slope).epsilon(1e-8));

    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto x = draw_sample({Family::laplace, 0.0, 1.0}, 51, 1000 + k);
        const auto a = taylor_residual(x, 0.0, median(x), h, 1e-8);
        const auto b = taylor_residual(x, 0.0, median(x), h, 2e-8);
        CHECK(a.residual < 1e-7);
        CHECK(b.residual < 2e-7);
    }
    CHECK_THROWS_AS(taylor_residual(one, 0.0, 1.0, make_h("reciprocal", flagship_envelope(1)), 1e-8), UnsupportedError);
}
