#include "ulln/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "ulln/error.hpp"
#include "ulln/quadrature.hpp"
#include "ulln/rng.hpp"

namespace ulln {

void SimulationPlan::validate() const {
    dist.validate();
    if (n_grid.empty()) throw DomainError("n_grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw DomainError("n_grid entries must be positive");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            throw DomainError("n_grid must be strictly increasing");
        }
    }
    if (v_grid.empty()) throw DomainError("v_grid must not be empty");
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        if (!(v_grid[i] >= 0.0 && v_grid[i] <= 1.0)) throw DomainError("v_grid must lie in [0,1]");
        if (i > 0 && v_grid[i] <= v_grid[i - 1]) throw DomainError("v_grid must be strictly increasing");
    }
    const bool singleton_zero = v_grid.size() == 1 && v_grid.front() == 0.0;
    if (!singleton_zero && (v_grid.front() != 0.0 || v_grid.back() != 1.0)) {
        throw DomainError("v_grid must contain both endpoints 0 and 1");
    }
    if (replicates < 1) throw DomainError("replicates must be at least 1");
    if (!(target_tol > 0.0)) throw DomainError("target_tol must be positive");
}

std::uint64_t replicate_seed(std::uint64_t master, Stream stream, std::uint64_t n, std::uint64_t r) {
    return derive_seed(master, {static_cast<std::uint64_t>(stream), n, r});
}

double empirical_h_mean(std::span<const double> sample, double t, const HSpec& h) {
    double sum = 0.0;
    for (double x : sample) {
        if (x != t) sum += h.eval(x - t);
    }
    return sum / static_cast<double>(sample.size());
}

double target_expectation(const DistributionSpec& dist, const HSpec& h, double tol,
                          std::optional<double> theta) {
    const double center = theta.value_or(dist.mu);
    std::vector<double> breaks{dist.mu};
    for (double d : h.singularities) breaks.push_back(center + d);
    const auto integrand = [&](double x) {
        const double y = x - center;
        if (h.is_singular(y)) return 0.0;
        return h.eval(y) * pdf(dist, x);
    };
    return integrate_or_throw(integrand, -INFINITY, INFINITY, breaks, tol,
                              "E[h(X - theta)] for h '" + h.id + "'");
}

double resolve_target(const SimulationPlan& plan) {
    if (plan.target) return *plan.target;
    return target_expectation(plan.dist, plan.h, plan.target_tol, plan.theta);
}

namespace {

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

// Two-pass mean / standard error over replicate-ordered values.
Moments moments(std::span<const double> values) {
    Moments m;
    const double count = static_cast<double>(values.size());
    double sum = 0.0;
    for (double x : values) sum += x;
    m.mean = sum / count;
    if (values.size() < 2) return m;
    double ss = 0.0;
    for (double x : values) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (count - 1.0) / count);
    return m;
}

// |deviation| for every v of one replicate.
void replicate_deviations(const SimulationPlan& plan, int n, std::uint64_t r, double target,
                          std::span<const double> vs, std::span<double> out) {
    std::vector<double> sample(static_cast<std::size_t>(n));
    SplitMix64 gen(replicate_seed(plan.master_seed, Stream::l1, static_cast<std::uint64_t>(n), r));
    fill_sample(plan.dist, sample, gen);
    const double star = estimate(sample, plan.estimator);
    for (std::size_t k = 0; k < vs.size(); ++k) {
        const double t = interpolate(plan.theta, star, vs[k]);
        out[k] = empirical_h_mean(sample, t, plan.h) - target;
    }
}

}  // namespace

L1Point l1_error_at(const SimulationPlan& plan, int n, double v, const EngineOptions& opts) {
    plan.validate();
    if (n < 1) throw DomainError("l1_error_at: n must be positive");
    interpolate(0.0, 0.0, v);  // domain check on v
    const double target = resolve_target(plan);
    const auto R = static_cast<std::size_t>(plan.replicates);
    std::vector<double> dev(R);
    const double vs[1] = {v};
    detail::parallel_for(R, opts.threads, [&](std::size_t r) {
        double d = 0.0;
        replicate_deviations(plan, n, r, target, vs, std::span<double>(&d, 1));
        dev[r] = std::abs(d);
    });
    const Moments m = moments(dev);
    return {n, v, m.mean, m.se, plan.replicates};
}

MeanEstimate empirical_mean_at(const SimulationPlan& plan, int n, double v, const EngineOptions& opts) {
    plan.validate();
    const auto R = static_cast<std::size_t>(plan.replicates);
    std::vector<double> values(R);
    const double vs[1] = {v};
    detail::parallel_for(R, opts.threads, [&](std::size_t r) {
        double d = 0.0;
        replicate_deviations(plan, n, r, 0.0, vs, std::span<double>(&d, 1));
        values[r] = d;
    });
    const Moments m = moments(values);
    return {m.mean, m.se};
}

L1Curve sup_l1_curve(const SimulationPlan& plan, const EngineOptions& opts) {
    plan.validate();
    L1Curve curve;
    curve.target = resolve_target(plan);
    curve.single_replicate = plan.replicates == 1;
    const auto R = static_cast<std::size_t>(plan.replicates);
    const std::size_t V = plan.v_grid.size();

    std::vector<double> dev(R * V);
    std::vector<double> column(R);
    for (int n : plan.n_grid) {
        detail::parallel_for(R, opts.threads, [&](std::size_t r) {
            std::span<double> row(dev.data() + r * V, V);
            replicate_deviations(plan, n, r, curve.target, plan.v_grid, row);
            for (double& d : row) d = std::abs(d);
        });
        L1Sup best{n, -1.0, 0.0, 0.0};
        for (std::size_t k = 0; k < V; ++k) {
            for (std::size_t r = 0; r < R; ++r) column[r] = dev[r * V + k];
            const Moments m = moments(column);
            curve.points.push_back({n, plan.v_grid[k], m.mean, m.se, plan.replicates});
            if (m.mean > best.sup) best = {n, m.mean, m.se, plan.v_grid[k]};
        }
        curve.sups.push_back(best);
    }
    return curve;
}

ConvergenceReport convergence_study(const SimulationPlan& plan, double threshold,
                                    const EngineOptions& opts) {
    if (plan.n_grid.size() < 3) throw DomainError("convergence_study needs at least 3 sample sizes");
    ConvergenceReport rep;
    rep.curve = sup_l1_curve(plan, opts);
    rep.threshold = threshold;
    for (const auto& s : rep.curve.sups) rep.rows.push_back({s.n, s.sup, s.se, s.argmax_v});
    rep.decreasing = true;
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
        const auto& a = rep.rows[k - 1];
        const auto& b = rep.rows[k];
        const double slack = 2.0 * std::hypot(a.se, b.se);
        if (!(b.sup < a.sup + slack)) rep.decreasing = false;
    }
    rep.below_threshold = rep.rows.back().sup < threshold;
    return rep;
}

std::vector<double> pinned_sample(const DistributionSpec& dist, double x1, std::size_t n,
                                  std::uint64_t seed) {
    if (n < 2) throw DomainError("pinned_sample needs n >= 2");
    std::vector<double> out(n);
    out[0] = x1;
    SplitMix64 gen(seed);
    fill_sample(dist, std::span<double>(out).subspan(1), gen);
    return out;
}

TailProbability conditional_tail_probability(const SimulationPlan& plan, double x, double u, int n,
                                             double v, int replicates, const EngineOptions& opts) {
    const EnvelopeParams& env = plan.h.envelope;
    TailProbability out;
    if (u >= std::max(x + env.gamma, env.beta0)) {
        out.upper_branch = true;
    } else if (u <= std::min(x - env.gamma, -env.beta0)) {
        out.upper_branch = false;
    } else {
        throw RegimeError("(x, u) = (" + std::to_string(x) + ", " + std::to_string(u) +
                          ") is outside both tail regimes");
    }
    if (n < 2) throw DomainError("conditional_tail_probability needs n >= 2");
    if (replicates < 1) throw DomainError("replicates must be at least 1");
    interpolate(0.0, 0.0, v);

    const auto R = static_cast<std::size_t>(replicates);
    std::vector<double> hits(R);
    const double cut = x - u;
    detail::parallel_for(R, opts.threads, [&](std::size_t r) {
        const auto seed = replicate_seed(plan.master_seed, Stream::pinned, static_cast<std::uint64_t>(n), r);
        const auto sample = pinned_sample(plan.dist, plan.theta + x, static_cast<std::size_t>(n), seed);
        const double shift = interpolate(plan.theta, estimate(sample, plan.estimator), v) - plan.theta;
        hits[r] = (out.upper_branch ? shift <= cut : shift >= cut) ? 1.0 : 0.0;
    });
    const Moments m = moments(hits);
    out.estimate = m.mean;
    out.se = m.se;
    out.bound = env.C * std::exp(-std::pow(std::abs(cut), env.p));
    out.replicates = replicates;
    return out;
}

TaylorResult taylor_residual(std::span<const double> sample, double theta, double theta_star,
                             const HSpec& h, double quad_tol) {
    TaylorResult out;
    if (theta_star == theta) return out;
    if (h.antideriv == nullptr) throw UnsupportedError("taylor_residual needs an antiderivative of h");
    if (sample.empty()) throw DomainError("taylor_residual of an empty sample");

    const double step = theta_star - theta;
    const auto tn = [&](double t) {
        double s = 0.0;
        for (double x : sample) s += h.antideriv(x - t);
        return s / static_cast<double>(sample.size());
    };

    std::vector<double> breaks;
    for (double x : sample) {
        for (double d : h.singularities) {
            const double v = (x - d - theta) / step;
            if (v > 0.0 && v < 1.0) breaks.push_back(v);
        }
    }
    out.breakpoints = static_cast<int>(breaks.size());

    const auto derivative = [&](double v) { return empirical_h_mean(sample, theta + v * step, h); };
    QuadOptions qopts;
    // Q is multiplied by |step| below.
    qopts.abs_tol = quad_tol / std::max(1.0, std::abs(step));
    qopts.max_intervals = 20000;
    const QuadResult q = integrate(derivative, 0.0, 1.0, breaks, qopts);
    out.integral = q.value;
    out.quad_error = q.abs_error;
    out.converged = q.converged;
    out.residual = std::abs(tn(theta_star) - tn(theta) - step * q.value);
    return out;
}

}  // namespace ulln
