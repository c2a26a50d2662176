#include "ulln/hfuncs.hpp"

#include <algorithm>
#include <cmath>

#include "ulln/error.hpp"

namespace ulln {

namespace {

double signlog(double y) { return y > 0.0 ? std::log(y) : -std::log(-y); }
double signlog_prime(double y) { return 1.0 / std::abs(y); }
double signlog_anti(double y) {
    if (y == 0.0) return 0.0;
    const double a = std::abs(y);
    return a * (1.0 - std::log(a));
}

double identity(double y) { return y; }
double identity_prime(double) { return 1.0; }
double identity_anti(double y) { return -0.5 * y * y; }

double reciprocal(double y) { return 1.0 / y; }
double reciprocal_prime(double y) { return -1.0 / (y * y); }

std::string fmt(double y) { return std::to_string(y); }

}  // namespace

void EnvelopeParams::validate() const {
    if (!(gamma > 0.0 && beta0 > 0.0 && p > 0.0 && alpha0 > 0.0 && C > 0.0)) {
        throw DomainError("envelope parameters must all be strictly positive");
    }
    if (!(beta0 > gamma)) throw DomainError("envelope requires beta0 > gamma");
}

EnvelopeParams flagship_envelope(double sigma) {
    EnvelopeParams e;
    e.gamma = 8.0 * sigma;
    e.beta0 = std::max(1.0, e.gamma + 1.0);
    e.p = 1.0;
    e.C = 1.0;
    e.alpha0 = 1.0;
    return e;
}

bool HSpec::is_singular(double y) const noexcept {
    return std::find(singularities.begin(), singularities.end(), y) != singularities.end();
}

HSpec make_h(std::string_view id, const EnvelopeParams& envelope) {
    envelope.validate();
    HSpec h;
    h.id = std::string(id);
    h.envelope = envelope;
    if (id == "signlog") {
        h.eval = signlog;
        h.deriv = signlog_prime;
        h.antideriv = signlog_anti;
        h.singularities = {0.0};
        h.blows_up_at_zero = true;
    } else if (id == "identity") {
        h.eval = identity;
        h.deriv = identity_prime;
        h.antideriv = identity_anti;
    } else if (id == "reciprocal") {
        h.eval = reciprocal;
        h.deriv = reciprocal_prime;
        h.singularities = {0.0};
        h.blows_up_at_zero = true;
    } else {
        throw DomainError("unknown h id '" + std::string(id) + "'");
    }
    return h;
}

std::vector<std::string> h_ids() { return {"signlog", "identity", "reciprocal"}; }

double eval_h(const HSpec& h, double y) {
    if (h.is_singular(y)) throw SingularityError("h '" + h.id + "' is singular at " + fmt(y));
    return h.eval(y);
}

double eval_h_prime(const HSpec& h, double y) {
    if (h.is_singular(y)) throw SingularityError("h' of '" + h.id + "' is singular at " + fmt(y));
    return h.deriv(y);
}

double eval_antideriv(const HSpec& h, double y) {
    if (h.antideriv == nullptr) {
        throw UnsupportedError("h '" + h.id + "' has no antiderivative");
    }
    return h.antideriv(y);
}

double envelope_m(const HSpec& h, double x) {
    const auto& e = h.envelope;
    double m = 0.0;
    if (const double y = x - e.gamma; std::abs(y) >= e.beta0) m += std::abs(h.eval(y));
    if (const double y = x + e.gamma; std::abs(y) >= e.beta0) m += std::abs(h.eval(y));
    return m;
}

double envelope_grid_sup(const HSpec& h, double x, int points) {
    const auto& e = h.envelope;
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = -e.gamma + 2.0 * e.gamma * i / (points - 1);
        const double y = x - t;
        if (std::abs(y) >= e.beta0) best = std::max(best, std::abs(h.eval(y)));
    }
    return best;
}

}  // namespace ulln
