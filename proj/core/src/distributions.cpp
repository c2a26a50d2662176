#include "ulln/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ulln/error.hpp"

namespace ulln {

std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::laplace: return "laplace";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    if (name == "laplace") return Family::laplace;
    throw DomainError("unknown distribution family '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("distribution sigma must be positive and finite");
    }
    if (!std::isfinite(mu)) {
        throw DomainError("distribution mu must be finite");
    }
}

double pdf(const DistributionSpec& dist, double x) {
    return std::exp(-std::abs(x - dist.mu) / (2.0 * dist.sigma)) / (4.0 * dist.sigma);
}

double cdf(const DistributionSpec& dist, double x) {
    const double z = (x - dist.mu) / (2.0 * dist.sigma);
    if (z < 0.0) return 0.5 * std::exp(z);
    return 1.0 - 0.5 * std::exp(-z);
}

double survival(const DistributionSpec& dist, double x) {
    const double z = (x - dist.mu) / (2.0 * dist.sigma);
    if (z >= 0.0) return 0.5 * std::exp(-z);
    return 1.0 - 0.5 * std::exp(z);
}

double quantile(const DistributionSpec& dist, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("quantile: q must lie in (0,1), got " + std::to_string(q));
    }
    const double b = 2.0 * dist.sigma;
    if (q < 0.5) return dist.mu + b * std::log(2.0 * q);
    return dist.mu - b * std::log(2.0 * (1.0 - q));
}

double variance(const DistributionSpec& dist) { return 8.0 * dist.sigma * dist.sigma; }

double density_sup(const DistributionSpec& dist) { return 1.0 / (4.0 * dist.sigma); }

void fill_sample(const DistributionSpec& dist, std::span<double> out, SplitMix64& gen) {
    const double b = 2.0 * dist.sigma;
    for (double& x : out) {
        const double u = gen.uniform();
        x = u < 0.5 ? dist.mu + b * std::log(2.0 * u) : dist.mu - b * std::log(2.0 * (1.0 - u));
    }
}

std::vector<double> draw_sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("draw_sample: n must be at least 1");
    std::vector<double> out(n);
    SplitMix64 gen(seed);
    fill_sample(dist, out, gen);
    return out;
}

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double log_binomial_upper_median_tail(int n, double p) {
    if (n < 1) throw DomainError("binomial tail: n must be at least 1");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial tail: p must lie in [0,1]");
    const int k0 = (n + 1) / 2;
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return 0.0;
    // k <-> n-k symmetry: exactly one half for odd n.
    if (p == 0.5 && n % 2 == 1) return -std::log(2.0);

    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n - k0 + 1));
    double peak = -std::numeric_limits<double>::infinity();
    for (int k = k0; k <= n; ++k) {
        const double t = log_choose(n, k) + k * lp + (n - k) * lq;
        terms.push_back(t);
        peak = std::max(peak, t);
    }
    // Neumaier-compensated sum of exp(term - peak).
    double sum = 0.0;
    double carry = 0.0;
    for (double t : terms) {
        const double x = std::exp(t - peak);
        const double s = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
        sum = s;
    }
    return peak + std::log(sum + carry);
}

double binomial_upper_median_tail(int n, double p) {
    const double lt = log_binomial_upper_median_tail(n, p);
    return std::min(1.0, std::exp(lt));
}

Verdict median_tail_bound_holds(int n, double t, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("median_tail_bound_holds: sigma must be positive");
    const double threshold = 8.0 * sigma;
    if (n < static_cast<int>(std::ceil(threshold)) || t < threshold) {
        return Verdict::outside_regime;
    }
    // log p = log(1/2) - t/(2 sigma); log bound = log(1/2) - t
    const double p = 0.5 * std::exp(-t / (2.0 * sigma));
    const double lhs = log_binomial_upper_median_tail(n, p);
    const double rhs = -std::log(2.0) - t;
    return lhs <= rhs ? Verdict::holds : Verdict::violated;
}

}  // namespace ulln
