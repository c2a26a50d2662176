#include "ulln/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulln/error.hpp"

namespace ulln {

double psi_sign(double y) noexcept { return y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0); }
double psi_identity(double y) noexcept { return y; }

EstimatorSpec make_estimator(std::string_view id, double theta, double constant_offset) {
    EstimatorSpec e;
    e.id = std::string(id);
    if (id == "median") {
        e.kind = EstimatorKind::median;
        e.psi = psi_sign;
    } else if (id == "mean") {
        e.kind = EstimatorKind::m_estimator;
        e.psi = psi_identity;
    } else if (id == "sign-m") {
        e.kind = EstimatorKind::m_estimator;
        e.psi = psi_sign;
    } else if (id == "first-observation") {
        e.kind = EstimatorKind::first_observation;
        e.symmetric = false;
    } else if (id == "constant") {
        e.kind = EstimatorKind::constant;
        e.constant_value = theta + constant_offset;
    } else {
        throw DomainError("unknown estimator id '" + std::string(id) + "'");
    }
    return e;
}

std::vector<std::string> estimator_ids() {
    return {"median", "mean", "sign-m", "first-observation", "constant"};
}

double median(std::span<const double> sample) {
    if (sample.empty()) throw DomainError("median of an empty sample");
    std::vector<double> v(sample.begin(), sample.end());
    const std::size_t n = v.size();
    const std::size_t hi = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi), v.end());
    const double upper = v[hi];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(hi));
    return 0.5 * (lower + upper);
}

double default_tolerance(std::span<const double> sample) {
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    return 1e-12 * std::max({1.0, std::abs(*lo), std::abs(*hi)});
}

void check_psi(const EstimatorSpec& e, double range) {
    if (e.psi == nullptr) throw InvalidPsiError("estimator '" + e.id + "' has no psi");
    if (e.psi(0.0) != 0.0) throw InvalidPsiError("psi(0) must be 0 for '" + e.id + "'");
    constexpr int kGrid = 1001;
    const double span = range + 1.0;
    double prev = e.psi(-span);
    for (int i = 1; i < kGrid; ++i) {
        const double y = -span + 2.0 * span * i / (kGrid - 1);
        const double cur = e.psi(y);
        if (cur < prev) {
            throw InvalidPsiError("psi of '" + e.id + "' decreases near y = " + std::to_string(y));
        }
        prev = cur;
    }
}

namespace {

double score(std::span<const double> sorted, double (*psi)(double), double t) {
    double s = 0.0;
    for (double x : sorted) s += psi(x - t);
    return s;
}

// Smallest-width bracket [lo, hi] around the switch of `pred` from true to false.
template <class Pred>
double bisect_boundary(double lo, double hi, double tol, Pred pred) {
    if (!pred(lo)) return lo;
    if (pred(hi)) return hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double m_estimate(std::span<const double> sample, const EstimatorSpec& e, double tol) {
    if (sample.empty()) throw DomainError("m_estimate of an empty sample");
    if (e.psi == nullptr) throw InvalidPsiError("estimator '" + e.id + "' has no psi");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front() - 1.0;
    const double hi = sorted.back() + 1.0;
    check_psi(e, sorted.back() - sorted.front());
    if (tol <= 0.0) tol = default_tolerance(sorted);

    // score is nonincreasing; its zero set lies between these two switches.
    const double left = bisect_boundary(lo, hi, tol, [&](double t) { return score(sorted, e.psi, t) > 0.0; });
    const double right = bisect_boundary(lo, hi, tol, [&](double t) { return score(sorted, e.psi, t) >= 0.0; });
    return 0.5 * (left + right);
}

double estimate(std::span<const double> sample, const EstimatorSpec& e, double tol) {
    if (sample.empty()) throw DomainError("estimate of an empty sample");
    switch (e.kind) {
        case EstimatorKind::median: return median(sample);
        case EstimatorKind::m_estimator: return m_estimate(sample, e, tol);
        case EstimatorKind::first_observation: return sample.front();
        case EstimatorKind::constant: return e.constant_value;
    }
    return 0.0;
}

double leave_first_out(std::span<const double> sample, const EstimatorSpec& e, double tol) {
    if (sample.size() < 2) throw DomainError("leave_first_out needs n >= 2");
    return estimate(sample.subspan(1), e, tol);
}

double interpolate(double theta, double theta_star, double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("interpolate: v must lie in [0,1], got " + std::to_string(v));
    }
    return theta + v * (theta_star - theta);
}

BracketingResult check_bracketing(std::span<const double> sample, const EstimatorSpec& e,
                                  double tol) {
    if (sample.size() < 2) throw DomainError("check_bracketing needs n >= 2");
    if (tol <= 0.0) tol = default_tolerance(sample);
    BracketingResult r;
    r.full = estimate(sample, e, tol);
    r.suffix = leave_first_out(sample, e, tol);
    r.x1 = sample.front();
    // Both estimates carry bisection error of up to tol each.
    const double slack = 2.0 * tol;
    double (*psi)(double) = e.kind == EstimatorKind::median ? psi_sign : e.psi;
    if (psi && std::abs(r.full - r.x1) <= slack) {
        // Tie theta*_n == X_1: the suffix score vanishes there, so the chain
        // holds with theta*_{2:n} = X_1, which must lie in the suffix zero set.
        double lo = 0.0, hi = 0.0;
        for (double x : sample.subspan(1)) {
            lo += psi(x - (r.x1 - slack));
            hi += psi(x - (r.x1 + slack));
        }
        r.verdict = lo >= 0.0 && hi <= 0.0 ? Verdict::holds : Verdict::violated;
        return r;
    }
    bool ok = true;
    if (r.full <= r.x1) ok = ok && r.suffix <= r.full + slack;
    if (r.full >= r.x1) ok = ok && r.suffix >= r.full - slack;
    r.verdict = ok ? Verdict::holds : Verdict::violated;
    return r;
}

Verdict permutation_symmetry_check(std::span<const double> sample, const EstimatorSpec& e,
                                   std::span<const std::size_t> perm) {
    if (perm.size() != sample.size()) throw DomainError("permutation length differs from n");
    std::vector<char> seen(sample.size(), 0);
    std::vector<double> permuted(sample.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] >= sample.size() || seen[perm[i]]) {
            throw DomainError("invalid permutation");
        }
        seen[perm[i]] = 1;
        permuted[i] = sample[perm[i]];
    }
    return estimate(sample, e) == estimate(permuted, e) ? Verdict::holds : Verdict::violated;
}

}  // namespace ulln
