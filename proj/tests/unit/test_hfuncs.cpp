#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ulln/error.hpp"
#include "ulln/hfuncs.hpp"
#include "ulln/rng.hpp"

using namespace ulln;

namespace {
const HSpec kSignlog = make_h("signlog", flagship_envelope(1.0));
}

TEST_CASE("registry") {
    CHECK(h_ids() == std::vector<std::string>{"signlog", "identity", "reciprocal"});
    CHECK_THROWS_AS(make_h("cube", flagship_envelope(1.0)), std::exception);
    CHECK(kSignlog.blows_up_at_zero);
    CHECK_FALSE(make_h("identity", flagship_envelope(1.0)).blows_up_at_zero);
    CHECK(make_h("reciprocal", flagship_envelope(1.0)).antideriv == nullptr);
}

TEST_CASE("flagship envelope defaults") {
    const auto e = flagship_envelope(0.5);
    CHECK(e.gamma == 4.0);
    CHECK(e.beta0 == 5.0);
    CHECK(e.p == 1.0);
    CHECK(e.C == 1.0);
    CHECK(e.alpha0 == 1.0);
    CHECK(flagship_envelope(0.05).beta0 == 1.4);
    EnvelopeParams bad{2.0, 1.5, 1.0, 1.0, 1.0};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("signlog values") {
    CHECK(eval_h(kSignlog, 1) == 0.0);
    CHECK(eval_h(kSignlog, -1) == 0.0);
    for (double y : {0.2, 3.0, 40.0}) CHECK(eval_h(kSignlog, y) == -eval_h(kSignlog, -y));
    CHECK(eval_h(kSignlog, 1e-300) == doctest::Approx(-690.7755).epsilon(1e-6));
    CHECK_THROWS_AS(eval_h(kSignlog, 0.0), SingularityError);
    CHECK_THROWS_AS(eval_h_prime(kSignlog, 0.0), SingularityError);
}

TEST_CASE("signlog derivative") {
    CHECK(eval_h_prime(kSignlog, 2) == 0.5);
    CHECK(eval_h_prime(kSignlog, -2) == 0.5);
}

TEST_CASE("antiderivative values") {
    CHECK(eval_antideriv(kSignlog, 1) == doctest::Approx(1.0));
    CHECK(std::abs(eval_antideriv(kSignlog, std::numbers::e)) < 1e-15);
    CHECK(eval_antideriv(kSignlog, 0.0) == 0.0);
    CHECK_THROWS_AS(eval_antideriv(make_h("reciprocal", flagship_envelope(1.0)), 1.0), UnsupportedError);
}

TEST_CASE("derivatives and antiderivatives match finite differences") {
    for (const auto& id : h_ids()) {
        const auto h = make_h(id, flagship_envelope(1.0));
        for (double y : {-7.0, -2.0, -0.5, -0.05, 0.05, 0.5, 2.0, 3.0, 7.0}) {
            const double step = 1e-6 * std::max(1.0, std::abs(y));
            const double fd = oracle::central_difference([&](double x) { return eval_h(h, x); }, y, step);
            const double d = eval_h_prime(h, y);
            CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
            if (h.antideriv) {
                const double g = oracle::central_difference([&](double x) { return eval_antideriv(h, x); }, y, step);
                const double target = -eval_h(h, y);
                CHECK(std::abs(g - target) <= 1e-6 * std::max(1.0, std::abs(target)));
            }
        }
    }
}

TEST_CASE("envelope_m") {
    const auto h = make_h("signlog", EnvelopeParams{1.0, 2.0, 1.0, 1.0, 1.0});
    CHECK(envelope_m(h, 0) == 0.0);
    CHECK(envelope_m(h, 4) == doctest::Approx(std::log(3.0) + std::log(5.0)));
    for (double x : {3.0, 7.0}) CHECK(envelope_m(h, x) == envelope_m(h, -x));
}

TEST_CASE("envelope dominates the shifted h") {
    for (const auto& id : {"signlog", "identity"}) {
        const auto h = make_h(id, flagship_envelope(1.0));
        const auto& e = h.envelope;
        SplitMix64 g(5);
        for (int i = 0; i < 500; ++i) {
            const double mag = e.beta0 + e.gamma + 100.0 * g.uniform();
            const double x = g.uniform() < 0.5 ? -mag : mag;
            double worst = 0.0;
            for (int k = 0; k <= 100; ++k) {
                const double t = -e.gamma + 2 * e.gamma * k / 100.0;
                if (std::abs(x - t) >= e.beta0) worst = std::max(worst, std::abs(eval_h(h, x - t)));
            }
            CHECK(worst <= envelope_m(h, x) + 1e-12);
            CHECK(envelope_grid_sup(h, x) <= envelope_m(h, x) + 1e-12);
        }
    }
}

TEST_CASE("tail sign condition for signlog") {
    const double beta0 = kSignlog.envelope.beta0;
    for (int i = 0; i <= 400; ++i) {
        const double u = beta0 + (100.0 - beta0) * i / 400.0;
        for (double s : {u, -u}) {
            const double val = -std::copysign(1.0, s) * std::copysign(1.0, eval_h(kSignlog, s)) * eval_h_prime(kSignlog, s);
            CHECK(val <= 0.0);
            CHECK(val == doctest::Approx(-1.0 / u));
        }
    }
}
