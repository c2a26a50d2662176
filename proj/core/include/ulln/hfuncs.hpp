#pragma once

// Registry of the functions h applied to X_i - t in the empirical sums.
//
// Built-in ids:
//   "signlog"    h(y) = sign(y) log|y|   (blows up at 0, integrable there)
//   "identity"   h(y) = y                (bounded near 0)
//   "reciprocal" h(y) = 1/y              (not integrable at 0; negative control)

#include <string>
#include <string_view>
#include <vector>

namespace ulln {

// Tail/envelope constants: gamma, beta0 > gamma, tail exponent p, the
// Lebesgue window alpha0 around 0 and the tail constant C.
struct EnvelopeParams {
    double gamma = 8.0;
    double beta0 = 9.0;
    double p = 1.0;
    double alpha0 = 1.0;
    double C = 1.0;

    void validate() const;
};

// gamma = 8 sigma, beta0 = max(1, gamma + 1), p = C = alpha0 = 1.
EnvelopeParams flagship_envelope(double sigma);

using RealFn = double (*)(double);

struct HSpec {
    std::string id;
    RealFn eval = nullptr;
    RealFn deriv = nullptr;
    RealFn antideriv = nullptr;  // G with G' = -h, or null
    std::vector<double> singularities;
    bool blows_up_at_zero = false;
    // |h| monotone on each tail: the two-point envelope is exact.
    bool monotone_tails = true;
    EnvelopeParams envelope;

    [[nodiscard]] bool is_singular(double y) const noexcept;
};

HSpec make_h(std::string_view id, const EnvelopeParams& envelope);
std::vector<std::string> h_ids();

double eval_h(const HSpec& h, double y);
double eval_h_prime(const HSpec& h, double y);
double eval_antideriv(const HSpec& h, double y);

// |h(x - gamma)| 1{|x - gamma| >= beta0} + |h(x + gamma)| 1{|x + gamma| >= beta0}
double envelope_m(const HSpec& h, double x);

// max over a uniform grid of t in [-gamma, gamma] of |h(x - t)| 1{|x - t| >= beta0}.
// Fallback for h whose tails are not monotone.
double envelope_grid_sup(const HSpec& h, double x, int points = 201);

}  // namespace ulln
