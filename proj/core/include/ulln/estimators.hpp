#pragma once

// Location estimators theta*_n and the interpolated family
// theta + v (theta*_n - theta), v in [0,1].

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ulln/verdict.hpp"

namespace ulln {

enum class EstimatorKind {
    median,
    m_estimator,
    first_observation,  // theta_n = X_1; not permutation symmetric (control)
    constant,           // theta_n = fixed value; inconsistent (control)
};

// Declared bound sup_{n >= N} P(|theta*_n - theta| >= t) <= C exp(-t^p), t >= gamma.
struct TailBound {
    double C = 1.0;
    double p = 1.0;
    double gamma = 8.0;
    int N = 8;
};

struct EstimatorSpec {
    std::string id;
    EstimatorKind kind = EstimatorKind::median;
    double (*psi)(double) = nullptr;  // required for m_estimator
    bool symmetric = true;
    std::optional<TailBound> tail;
    double constant_value = 0.0;  // used by EstimatorKind::constant
};

double psi_sign(double y) noexcept;
double psi_identity(double y) noexcept;

// Ids: "median", "mean", "sign-m", "first-observation", "constant".
// `theta` and `constant_offset` only matter for "constant" (value theta + offset).
EstimatorSpec make_estimator(std::string_view id, double theta = 0.0, double constant_offset = 1.0);
std::vector<std::string> estimator_ids();

double median(std::span<const double> sample);

// 1e-12 * max(1, |min|, |max|)
double default_tolerance(std::span<const double> sample);

// Midpoint of the zero set of t -> sum psi(x_i - t), located by bisection on
// [min - 1, max + 1]. Works on a sorted copy so the result does not depend on
// the order of the observations. tol <= 0 selects default_tolerance.
double m_estimate(std::span<const double> sample, const EstimatorSpec& e, double tol = 0.0);

// Throws InvalidPsiError if psi(0) != 0 or psi decreases on a 1001-point grid
// spanning [-(range + 1), range + 1].
void check_psi(const EstimatorSpec& e, double range);

// Dispatches on kind.
double estimate(std::span<const double> sample, const EstimatorSpec& e, double tol = 0.0);

// The same estimator applied to observations 2..n.
double leave_first_out(std::span<const double> sample, const EstimatorSpec& e, double tol = 0.0);

double interpolate(double theta, double theta_star, double v);

struct BracketingResult {
    Verdict verdict = Verdict::holds;
    double full = 0.0;    // theta*_n
    double suffix = 0.0;  // theta*_{2:n}
    double x1 = 0.0;
};

// theta*_n <= X_1  =>  theta*_{2:n} <= theta*_n, and the mirror image.
// On a tie theta*_n == X_1 the check is that X_1 lies in the zero set of the
// suffix score (the suffix estimate may be any root there).
BracketingResult check_bracketing(std::span<const double> sample, const EstimatorSpec& e,
                                  double tol = 0.0);

// `perm` holds 0-based indices; the permuted sample is sample[perm[i]].
Verdict permutation_symmetry_check(std::span<const double> sample, const EstimatorSpec& e,
                                   std::span<const std::size_t> perm);

}  // namespace ulln
