#pragma once

// Monte Carlo estimation of
//
//     sup_{v in [0,1]} E | (1/n) sum_i 1{X_i != theta_{n,v}} h(X_i - theta_{n,v}) - E h(X_1 - theta) |,
//     theta_{n,v} = theta + v (theta*_n - theta),
//
// plus the pinned-first-observation simulations and the Taylor-identity check.
//
// Seeding: replicate r at sample size n draws from
// SplitMix64(derive_seed(master_seed, {stream, n, r})). One sample per
// replicate serves every v, so the v-curve of a replicate comes from a single
// estimator. Replicates may run on any number of threads; per-replicate
// results are reduced in replicate order, so outputs are bitwise identical
// for every thread count.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulln/distributions.hpp"
#include "ulln/estimators.hpp"
#include "ulln/hfuncs.hpp"

namespace ulln {

struct EngineOptions {
    unsigned threads = 1;  // 0 = hardware concurrency
};

struct SimulationPlan {
    DistributionSpec dist;
    HSpec h;
    EstimatorSpec estimator;
    double theta = 0.0;
    std::vector<int> n_grid;
    std::vector<double> v_grid;
    int replicates = 2;
    std::uint64_t master_seed = 0;
    std::optional<double> target;  // nullopt: E h(X_1 - theta) by quadrature
    double target_tol = 1e-10;

    // v_grid sorted in [0,1] with both endpoints (or the singleton {0}),
    // n_grid strictly increasing and positive, replicates >= 1.
    void validate() const;
};

// Stream tags mixed into derive_seed.
enum class Stream : std::uint64_t { l1 = 1, pinned = 2, audit = 3, taylor = 4 };

std::uint64_t replicate_seed(std::uint64_t master, Stream stream, std::uint64_t n, std::uint64_t r);

// (1/n) sum 1{x_i != t} h(x_i - t)
double empirical_h_mean(std::span<const double> sample, double t, const HSpec& h);

// E h(X - theta) with X ~ dist (theta defaults to dist.mu). Throws
// NonIntegrableError when refinement does not settle.
double target_expectation(const DistributionSpec& dist, const HSpec& h, double tol,
                          std::optional<double> theta = std::nullopt);

double resolve_target(const SimulationPlan& plan);

struct L1Point {
    int n = 0;
    double v = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    int replicates = 0;
};

struct L1Sup {
    int n = 0;
    double sup = 0.0;
    double se = 0.0;
    double argmax_v = 0.0;
};

struct L1Curve {
    double target = 0.0;
    std::vector<L1Point> points;  // n-major, v-minor
    std::vector<L1Sup> sups;      // one per n
    // R = 1: standard errors are reported as 0.
    bool single_replicate = false;
};

L1Point l1_error_at(const SimulationPlan& plan, int n, double v, const EngineOptions& opts = {});
L1Curve sup_l1_curve(const SimulationPlan& plan, const EngineOptions& opts = {});

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Mean and standard error of the signed empirical_h_mean(sample, theta_{n,v}).
MeanEstimate empirical_mean_at(const SimulationPlan& plan, int n, double v,
                               const EngineOptions& opts = {});

struct ConvergenceRow {
    int n = 0;
    double sup = 0.0;
    double se = 0.0;
    double argmax_v = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    L1Curve curve;
    // sup_{k+1} < sup_k + 2 sqrt(se_k^2 + se_{k+1}^2) for every consecutive pair.
    bool decreasing = false;
    double threshold = 0.0;
    bool below_threshold = false;  // last sup < threshold
    [[nodiscard]] bool converging() const noexcept { return decreasing && below_threshold; }
};

ConvergenceReport convergence_study(const SimulationPlan& plan, double threshold,
                                    const EngineOptions& opts = {});

// First entry exactly x1; the other n - 1 drawn i.i.d. from dist.
std::vector<double> pinned_sample(const DistributionSpec& dist, double x1, std::size_t n,
                                  std::uint64_t seed);

struct TailProbability {
    double estimate = 0.0;
    double se = 0.0;
    double bound = 0.0;  // C exp(-|x - u|^p)
    bool upper_branch = true;
    int replicates = 0;
};

// P(theta_n - theta <= x - u | X_1 - theta = x) for u >= max(x + gamma, beta0),
// or P(theta_n - theta >= x - u | ...) for u <= min(x - gamma, -beta0).
// gamma, beta0, C, p come from plan.h.envelope. Throws RegimeError otherwise.
TailProbability conditional_tail_probability(const SimulationPlan& plan, double x, double u, int n,
                                             double v, int replicates,
                                             const EngineOptions& opts = {});

struct TaylorResult {
    double residual = 0.0;
    double integral = 0.0;  // integral over v of T_n'(theta + v (theta* - theta))
    double quad_error = 0.0;
    int breakpoints = 0;
    bool converged = true;
};

// |T_n(theta*) - T_n(theta) - (theta* - theta) Q| with T_n(t) = (1/n) sum G(x_i - t)
// and Q the adaptive quadrature of empirical_h_mean along the segment.
TaylorResult taylor_residual(std::span<const double> sample, double theta, double theta_star,
                             const HSpec& h, double quad_tol);

}  // namespace ulln
