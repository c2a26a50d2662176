#pragma once

// Numerical audit of the hypotheses behind the uniform L1 law of large
// numbers for a concrete (distribution, h, estimator) triple.
//
// Statuses:
//   pass / fail      numeric check decided
//   declared         not numerically checkable (H.5.1, E.6)
//   approximate      decided, but on a heuristic surrogate
//   outside_regime   the check does not apply to this triple

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ulln/distributions.hpp"
#include "ulln/engine.hpp"
#include "ulln/hfuncs.hpp"
#include "ulln/quadrature.hpp"

namespace ulln {

enum class Status { pass, fail, declared, approximate, outside_regime };

std::string_view to_string(Status s) noexcept;

struct Evidence {
    std::string name;
    double value = 0.0;
};

struct ConditionResult {
    std::string id;
    std::string group;  // "sampling", "consistency", "uniform integrability", "M-estimator tails"
    Status status = Status::fail;
    std::vector<Evidence> evidence;
    std::string notes;
};

struct ConditionReport {
    std::vector<ConditionResult> conditions;
    std::optional<int> n0;  // smallest n in the sweep where the regime checks held

    [[nodiscard]] const ConditionResult& at(std::string_view id) const;
    [[nodiscard]] bool any_failed() const noexcept;
};

// Condition ids in report order (grouped as in the assumption diagram).
const std::vector<std::string>& condition_ids();

enum class Measure { density, lebesgue };

// Integral of integrand against the density of dist (Measure::density) or
// against Lebesgue measure over [lo, hi] (infinite ends allowed). `singular`
// lists the points where the integrand may blow up; they become break points.
// Throws NonIntegrableError on divergence.
double quad_expectation(const DistributionSpec& dist, const Integrand& integrand, double lo,
                        double hi, Measure measure, double tol,
                        std::span<const double> singular = {});

struct AuditOptions {
    unsigned threads = 1;
    double quad_tol = 1e-9;
    int e1_replicates = 2000;
    std::vector<double> e1_eps = {0.5, 0.1};
    int e2_trials = 100;
    std::vector<int> e4_n = {11, 101};
    std::vector<double> e4_v = {0.25, 0.5, 1.0};
    int e4_replicates = 100000;
    double e4_bin_width = 0.02;
    std::optional<double> e4_half_width;  // default alpha0
    int e5_n = 51;
    int e5_replicates = 10000;
    int e5_sweep_n_max = 200;
    int l3_replicates = 2000;
};

ConditionReport audit_conditions(const SimulationPlan& plan, const AuditOptions& opts = {});

// Pieces of the audit exposed for the acceptance suite.

// sup_{3 <= n <= n_max, n odd} C(n, floor(n/2)) / C(n-2, floor((n-2)/2)) = 2(2m+1)/(m+1).
double stirling_ratio_sup(int n_max);

struct HistogramMax {
    double density = 0.0;  // max over bins of count / (R * width)
    double se = 0.0;       // binomial standard error of that bin
    double center = 0.0;   // bin center
    double atom_mass = 0.0;  // fraction of replicates with X_1 == theta_n (excluded)
};

// Histogram of X_1 - theta_{n,v} on [-half_width, half_width], counting only
// replicates with X_1 != theta_{n,v}; normalized by the full replicate count.
HistogramMax e4_histogram(const SimulationPlan& plan, int n, double v, int replicates,
                          double half_width, double bin_width, const EngineOptions& opts = {});

// (|beta|/2) (1 v 1/(2 sigma)) exp(-(1 ^ 1/(2 sigma)) |beta|)
double exp_moment_envelope(double sigma, double beta);
// (1/2)e^{-|b|} + |b|/(4 sigma) e^{-(1 ^ 1/(2 sigma))|b|} + e^{-|b|/(2 sigma)}/(4 sigma)
double exp_moment_three_term_bound(double sigma, double beta);

}  // namespace ulln
