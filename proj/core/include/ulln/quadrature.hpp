#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature.
//
// Intervals may be infinite on either side (mapped onto [0,1) by
// x = a + t/(1-t)). Break points split the range before refinement starts;
// put every integrable singularity in `breaks` so it only ever sits at an
// interval end, where no node is evaluated.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ulln {

using Integrand = std::function<double(double)>;

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    long evaluations = 0;
    bool converged = false;
};

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});
QuadResult integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                     const QuadOptions& opts = {});

// Outcome of deciding whether an integral is finite.
struct FiniteIntegral {
    double value = 0.0;
    double abs_error = 0.0;
    double halved_tol_value = 0.0;  // estimate at tol/2
    bool finite = false;
    std::string reason;
};

// Finite means: refinement converges at tol and at tol/2, and the two
// estimates agree to 1e-3 relative (or within 2 tol absolute).
FiniteIntegral check_finite(const Integrand& f, double a, double b, std::span<const double> breaks,
                            double tol);

// Same as check_finite but throws NonIntegrableError when not finite.
double integrate_or_throw(const Integrand& f, double a, double b, std::span<const double> breaks,
                          double tol, const std::string& what);

// Integrals of f over {delta_k <= |x - s| <= radius} for delta_k = radius * 10^-k,
// k = 1..levels. Bounded growth indicates integrability at s.
std::vector<double> shrinking_neighborhood(const Integrand& f, double s, double radius, int levels,
                                           double tol);

}  // namespace ulln
