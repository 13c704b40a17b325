#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "nehari/errors.hpp"

namespace nehari {

// The nonlinearity g together with its derivatives, primitive and limits at
// infinity. Closed forms are supplied (not inferred); validate_h1 cross-checks
// them by sampling.
struct ReactionTerm {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> dg;
    std::function<double(double)> d2g;
    std::function<double(double)> G; // primitive with G(0) = 0
    double g_minus = 0.0;
    double g_plus = 0.0;
    double sup_norm = 0.0; // max(|g_minus|, |g_plus|)
};

// g(s) = amp * atan(rate * s). Saturation limits +-amp*pi/2.
inline ReactionTerm make_scaled_atan(double amp, double rate) {
    ReactionTerm r;
    r.name = "scaled_atan";
    r.g = [amp, rate](double s) { return amp * std::atan(rate * s); };
    r.dg = [amp, rate](double s) {
        const double x = rate * s;
        return amp * rate / (1.0 + x * x);
    };
    r.d2g = [amp, rate](double s) {
        const double x = rate * s;
        const double d = 1.0 + x * x;
        return -2.0 * amp * rate * rate * x / (d * d);
    };
    r.G = [amp, rate](double s) {
        const double x = rate * s;
        return amp * (s * std::atan(x) - 0.5 * std::log1p(x * x) / rate);
    };
    r.g_plus = amp * M_PI / 2.0;
    r.g_minus = -r.g_plus;
    r.sup_norm = r.g_plus;
    return r;
}

// g(s) = amp * tanh(rate * s). Saturation limits +-amp.
inline ReactionTerm make_scaled_tanh(double amp, double rate) {
    ReactionTerm r;
    r.name = "scaled_tanh";
    r.g = [amp, rate](double s) { return amp * std::tanh(rate * s); };
    r.dg = [amp, rate](double s) {
        const double th = std::tanh(rate * s);
        return amp * rate * (1.0 - th * th);
    };
    r.d2g = [amp, rate](double s) {
        const double th = std::tanh(rate * s);
        return -2.0 * amp * rate * rate * th * (1.0 - th * th);
    };
    r.G = [amp, rate](double s) {
        // log(cosh(x))/rate, computed overflow-safely for large |x|
        const double x = rate * s;
        const double lc = std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x))) - std::log(2.0);
        return amp * lc / rate;
    };
    r.g_plus = amp;
    r.g_minus = -amp;
    r.sup_norm = amp;
    return r;
}

inline ReactionTerm make_atan() {
    ReactionTerm r = make_scaled_atan(1.0, 1.0);
    r.name = "atan";
    return r;
}

inline ReactionTerm make_tanh() {
    ReactionTerm r = make_scaled_tanh(1.0, 1.0);
    r.name = "tanh";
    return r;
}

// Registry used by the config layer.
inline ReactionTerm make_reaction(const std::string& name, double amp = 1.0, double rate = 1.0) {
    if (name == "atan") return make_atan();
    if (name == "tanh") return make_tanh();
    if (name == "scaled_atan") return make_scaled_atan(amp, rate);
    if (name == "scaled_tanh") return make_scaled_tanh(amp, rate);
    throw ConfigError("unknown reaction '" + name + "' (registry: atan, tanh, scaled_atan, scaled_tanh)");
}

// The reflected problem: solving for v = -u with gbar(s) = -g(-s) turns the
// nonpositive cone into the nonnegative one. gbar inherits the hypotheses
// with the roles of the two saturation limits swapped, and Gbar(s) = G(-s).
inline ReactionTerm mirror(const ReactionTerm& r) {
    ReactionTerm m;
    m.name = r.name + "_mirrored";
    m.g = [f = r.g](double s) { return -f(-s); };
    m.dg = [f = r.dg](double s) { return f(-s); };
    m.d2g = [f = r.d2g](double s) { return -f(-s); };
    m.G = [f = r.G](double s) { return f(-s); };
    m.g_plus = -r.g_minus;
    m.g_minus = -r.g_plus;
    m.sup_norm = r.sup_norm;
    return m;
}

// g identically zero (with G = 0): together with a constant forcing -k this
// encodes the limit problem w'' = -k whose minimizer is the explicit parabola.
inline ReactionTerm make_zero_reaction() {
    ReactionTerm r;
    r.name = "zero";
    r.g = [](double) { return 0.0; };
    r.dg = [](double) { return 0.0; };
    r.d2g = [](double) { return 0.0; };
    r.G = [](double) { return 0.0; };
    r.g_minus = 0.0;
    r.g_plus = 0.0;
    r.sup_norm = 0.0;
    return r;
}

} // namespace nehari
