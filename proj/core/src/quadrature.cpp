#include "ulln/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "ulln/error.hpp"

namespace ulln {

namespace {

struct Rule {
    std::array<double, 11> xk{};
    std::array<double, 11> wk{};
    std::array<double, 5> wg{};
};

// Node layout from Boost: xk[0] = 0, Gauss nodes at odd indices.
const Rule& rule() {
    static const Rule r = [] {
        Rule out;
        const auto& xk = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
        const auto& wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
        const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
        std::copy(xk.begin(), xk.end(), out.xk.begin());
        std::copy(wk.begin(), wk.end(), out.wk.begin());
        std::copy(wg.begin(), wg.end(), out.wg.begin());
        return out;
    }();
    return r;
}

// Maps a piece of the real line onto a finite t-interval.
struct Segment {
    enum class Kind { finite, upper, lower } kind = Kind::finite;
    double anchor = 0.0;

    double operator()(const Integrand& f, double t) const {
        switch (kind) {
            case Kind::finite: return f(t);
            case Kind::upper: {
                const double s = 1.0 - t;
                return f(anchor + t / s) / (s * s);
            }
            case Kind::lower: {
                const double s = 1.0 - t;
                return f(anchor - t / s) / (s * s);
            }
        }
        return 0.0;
    }
};

struct Piece {
    int segment = 0;
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool operator<(const Piece& other) const { return error < other.error; }
};

void apply_rule(const Integrand& f, const Segment& seg, Piece& p, long& evals) {
    const Rule& r = rule();
    const double c = 0.5 * (p.lo + p.hi);
    const double h = 0.5 * (p.hi - p.lo);
    const double f0 = seg(f, c);
    double k = r.wk[0] * f0;
    double g = 0.0;
    for (std::size_t i = 1; i < r.xk.size(); ++i) {
        const double dx = h * r.xk[i];
        const double pair = seg(f, c - dx) + seg(f, c + dx);
        k += r.wk[i] * pair;
        if (i % 2 == 1) g += r.wg[i / 2] * pair;
    }
    evals += 21;
    p.value = k * h;
    p.error = std::abs((k - g) * h);
    if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
        p.error = std::numeric_limits<double>::infinity();
    }
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts) {
    return integrate(f, a, b, std::span<const double>{}, opts);
}

QuadResult integrate(const Integrand& f, double a, double b, std::span<const double> breaks,
                     const QuadOptions& opts) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> cuts;
    for (double x : breaks) {
        if (std::isfinite(x) && x > a && x < b) cuts.push_back(x);
    }
    if (std::isinf(a) && std::isinf(b) && cuts.empty()) cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> edges;
    edges.push_back(a);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(b);

    std::vector<Segment> segments;
    std::priority_queue<Piece> heap;
    long evals = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        Segment seg;
        Piece p;
        p.segment = static_cast<int>(segments.size());
        if (std::isinf(lo)) {
            seg = {Segment::Kind::lower, hi};
            p.lo = 0.0;
            p.hi = 1.0;
        } else if (std::isinf(hi)) {
            seg = {Segment::Kind::upper, lo};
            p.lo = 0.0;
            p.hi = 1.0;
        } else {
            p.lo = lo;
            p.hi = hi;
        }
        segments.push_back(seg);
        apply_rule(f, seg, p, evals);
        heap.push(p);
    }

    auto totals = [&heap] {
        // priority_queue has no iteration; copy is cheap at these sizes.
        auto copy = heap;
        double v = 0.0, e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };

    double value = 0.0;
    double error = 0.0;
    std::tie(value, error) = totals();
    bool stuck = false;
    while (true) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
        if (error <= target) break;
        if (static_cast<int>(heap.size()) >= opts.max_intervals) break;
        Piece worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi) ||
            (worst.hi - worst.lo) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(std::abs(worst.lo), std::abs(worst.hi)) ||
            (worst.hi - worst.lo) < 1e-290) {
            stuck = true;
            break;
        }
        heap.pop();
        Piece left{worst.segment, worst.lo, mid};
        Piece right{worst.segment, mid, worst.hi};
        apply_rule(f, segments[static_cast<std::size_t>(worst.segment)], left, evals);
        apply_rule(f, segments[static_cast<std::size_t>(worst.segment)], right, evals);
        heap.push(left);
        heap.push(right);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (heap.size() % 64 == 0) std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();

    out.value = sign * value;
    out.abs_error = error;
    out.intervals = static_cast<int>(heap.size());
    out.evaluations = evals;
    out.converged = !stuck && std::isfinite(value) &&
                    error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    return out;
}

FiniteIntegral check_finite(const Integrand& f, double a, double b, std::span<const double> breaks,
                            double tol) {
    FiniteIntegral out;
    QuadOptions opts;
    opts.abs_tol = tol;
    const QuadResult r1 = integrate(f, a, b, breaks, opts);
    opts.abs_tol = tol / 2.0;
    const QuadResult r2 = integrate(f, a, b, breaks, opts);
    out.value = r2.value;
    out.abs_error = r2.abs_error;
    out.halved_tol_value = r2.value;
    if (!r1.converged || !r2.converged) {
        out.reason = "adaptive refinement did not converge (error estimate " +
                     std::to_string(r2.abs_error) + " after " + std::to_string(r2.intervals) +
                     " intervals)";
        return out;
    }
    const double diff = std::abs(r1.value - r2.value);
    if (diff > std::max(1e-3 * std::abs(r2.value), 2.0 * tol)) {
        out.reason = "estimate unstable under tolerance halving";
        return out;
    }
    out.finite = true;
    return out;
}

double integrate_or_throw(const Integrand& f, double a, double b, std::span<const double> breaks,
                          double tol, const std::string& what) {
    const FiniteIntegral r = check_finite(f, a, b, breaks, tol);
    if (!r.finite) throw NonIntegrableError(what + ": " + r.reason);
    return r.value;
}

std::vector<double> shrinking_neighborhood(const Integrand& f, double s, double radius, int levels,
                                           double tol) {
    std::vector<double> out;
    QuadOptions opts;
    opts.abs_tol = tol;
    for (int k = 1; k <= levels; ++k) {
        const double delta = radius * std::pow(10.0, -k);
        const double right = integrate(f, s + delta, s + radius, opts).value;
        const double left = integrate(f, s - radius, s - delta, opts).value;
        out.push_back(left + right);
    }
    return out;
}

}  // namespace ulln
