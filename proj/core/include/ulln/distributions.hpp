#pragma once

// Location families used to instantiate the uniform-LLN conditions.
//
// PARAMETERIZATION WARNING: `sigma` is NOT the conventional Laplace scale b.
// The Laplace family here has density
//
//     f(x) = 1/(4 sigma) * exp(-|x - mu| / (2 sigma)),
//
// i.e. conventional scale b = 2 sigma, variance 8 sigma^2, and
// P(X >= mu + t) = exp(-t / (2 sigma)) / 2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ulln/rng.hpp"
#include "ulln/verdict.hpp"

namespace ulln {

enum class Family { laplace };

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view name);

struct DistributionSpec {
    Family family = Family::laplace;
    double mu = 0.0;
    double sigma = 1.0;

    // P(X = c) = 0 for every c. All built-in families are atomless.
    [[nodiscard]] constexpr bool atomless() const noexcept { return true; }

    // Throws DomainError unless sigma > 0 and mu is finite.
    void validate() const;
};

double pdf(const DistributionSpec& dist, double x);
double cdf(const DistributionSpec& dist, double x);
// 1 - cdf, without cancellation in the upper tail.
double survival(const DistributionSpec& dist, double x);
double quantile(const DistributionSpec& dist, double q);

double variance(const DistributionSpec& dist);
// sup_x f(x).
double density_sup(const DistributionSpec& dist);

// Inverse-CDF draws; uniforms come from `gen` clamped to [2^-53, 1 - 2^-53].
void fill_sample(const DistributionSpec& dist, std::span<double> out, SplitMix64& gen);
std::vector<double> draw_sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed);

// log of sum_{k = ceil(n/2)}^{n} C(n,k) p^k (1-p)^(n-k); -inf when the sum is 0.
double log_binomial_upper_median_tail(int n, double p);
double binomial_upper_median_tail(int n, double p);

// Compares the binomial median tail at p = exp(-t/(2 sigma))/2 with exp(-t)/2
// (tail constant C = 1, exponent p = 1) inside the regime n >= ceil(8 sigma),
// t >= 8 sigma. Abstains with outside_regime elsewhere. Comparison is in log
// space, so underflowing tails are still decided exactly.
Verdict median_tail_bound_holds(int n, double t, double sigma);

}  // namespace ulln
