#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/quadrature.hpp"
#include "nehari/reaction.hpp"

namespace nehari {

struct TrigTerm {
    double amp = 0.0;
    double omega = 0.0;
};

// The forcing p with its metadata: sup-norm, asymptotic average A(p), a
// window-mean deviation bound, and (when periodic) the declared period.
// Built from a trigonometric-polynomial spec
//   p(t) = constant + sum a_i cos(omega_i t) + sum b_i sin(omega_i t),
// so the average, the deviation bound and the oscillating primitive are exact.
struct ForcingTerm {
    std::function<double(double)> p;
    double sup_norm = 0.0;
    double average = 0.0;
    std::function<double(double)> average_error; // T -> sup-over-t window-mean deviation bound
    double M1 = 1.0;                             // sup_norm + 1
    std::optional<double> period;
    // primitive of (p - average) vanishing at 0; used by decompose_periodic
    std::function<double(double)> osc_primitive;

    // closed-form spec retained for reporting and config hashing
    double constant = 0.0;
    std::vector<TrigTerm> cos_terms;
    std::vector<TrigTerm> sin_terms;
};

// Forcing of the reflected problem v = -u, which turns the nonpositive cone
// into the nonnegative one: pbar(t) = -p(t).
inline ForcingTerm mirrored(const ForcingTerm& f) {
    ForcingTerm m;
    auto base = f.p;
    m.p = [base](double t) { return -base(t); };
    m.sup_norm = f.sup_norm;
    m.average = -f.average;
    m.average_error = f.average_error;
    m.M1 = f.M1;
    m.period = f.period;
    auto prim = f.osc_primitive;
    m.osc_primitive = [prim](double t) { return -prim(t); };
    m.constant = -f.constant;
    m.cos_terms = f.cos_terms;
    m.sin_terms = f.sin_terms;
    for (auto& c : m.cos_terms) c.amp = -c.amp;
    for (auto& s : m.sin_terms) s.amp = -s.amp;
    return m;
}

struct ForcingDecomposition {
    std::function<double(double)> p1; // constantly A(p) in the periodic case
    std::function<double(double)> p2; // bounded primitive of the rest
    double epsilon = 0.0;
    double sup_p2 = 0.0;
    double M_eps = 1.0; // sup_p2 + 1
};

struct AverageEstimate {
    double A_hat = 0.0;
    double sup_dev = 0.0;
};

struct Margin {
    bool ok = false;
    double lower = 0.0; // A(p) - g_minus
    double upper = 0.0; // g_plus - A(p)
};

namespace detail {

// Common period of the oscillating terms, if the frequencies are commensurate:
// approximates every omega_i as an integer multiple of a base frequency via
// continued fractions.
inline std::optional<double> common_period(const std::vector<double>& omegas) {
    if (omegas.empty()) return std::nullopt;
    const double w1 = omegas.front();
    std::uint64_t lcm_q = 1;
    for (double w : omegas) {
        const double r = w / w1;
        // continued-fraction rational approximation p/q of r, q bounded
        std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
        double x = r;
        for (int it = 0; it < 64; ++it) {
            const double fl = std::floor(x);
            const auto ai = static_cast<std::uint64_t>(fl);
            const std::uint64_t p2 = ai * p1 + p0;
            const std::uint64_t q2 = ai * q1 + q0;
            if (q2 > 4096) break;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            if (std::abs(r - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12) break;
            const double frac = x - fl;
            if (frac < 1e-15) break;
            x = 1.0 / frac;
        }
        if (q1 == 0) return std::nullopt;
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(r - approx) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
        lcm_q = std::lcm(lcm_q, q1);
        if (lcm_q > 1u << 20) return std::nullopt;
    }
    // base frequency w1 / lcm_q; period of every term divides 2*pi/base
    return 2.0 * M_PI * static_cast<double>(lcm_q) / w1;
}

// Numerical sup of |f| over [0, T]: dense scan plus local golden-section
// refinement around the best sample.
template <class F>
double sup_abs_on(const F& f, double T, int samples = 16384) {
    double best = 0.0, arg = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double t = T * i / samples;
        const double v = std::abs(f(t));
        if (v > best) { best = v; arg = t; }
    }
    double lo = arg - T / samples, hi = arg + T / samples;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = std::abs(f(x2));
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = std::abs(f(x1));
        }
    }
    return std::max(best, std::max(f1, f2));
}

} // namespace detail

inline ForcingTerm make_trig_forcing(double constant, std::vector<TrigTerm> cos_terms = {},
                                     std::vector<TrigTerm> sin_terms = {}) {
    for (const auto& t : cos_terms)
        if (!(t.omega > 0.0)) throw ConfigError("forcing: cos term with non-positive frequency");
    for (const auto& t : sin_terms)
        if (!(t.omega > 0.0)) throw ConfigError("forcing: sin term with non-positive frequency");

    ForcingTerm f;
    f.constant = constant;
    f.cos_terms = std::move(cos_terms);
    f.sin_terms = std::move(sin_terms);
    f.average = constant;

    auto ct = f.cos_terms;
    auto st = f.sin_terms;
    f.p = [constant, ct, st](double t) {
        double v = constant;
        for (const auto& c : ct) v += c.amp * std::cos(c.omega * t);
        for (const auto& s : st) v += s.amp * std::sin(s.omega * t);
        return v;
    };
    f.osc_primitive = [ct, st](double t) {
        double v = 0.0;
        for (const auto& c : ct) v += c.amp * std::sin(c.omega * t) / c.omega;
        for (const auto& s : st) v += s.amp * (1.0 - std::cos(s.omega * t)) / s.omega;
        return v;
    };

    // |(1/T) int_t^{t+T} (p - A)| <= (2/T) sum |amp|/omega, exact for each term
    double coef = 0.0;
    for (const auto& c : f.cos_terms) coef += 2.0 * std::abs(c.amp) / c.omega;
    for (const auto& s : f.sin_terms) coef += 2.0 * std::abs(s.amp) / s.omega;
    f.average_error = [coef](double T) { return T > 0.0 ? coef / T : coef; };

    std::vector<double> omegas;
    for (const auto& c : f.cos_terms) omegas.push_back(c.omega);
    for (const auto& s : f.sin_terms) omegas.push_back(s.omega);
    if (omegas.empty()) {
        // constant forcing: periodic with any period; 2*pi by convention
        f.period = 2.0 * M_PI;
        f.sup_norm = std::abs(constant);
    } else {
        f.period = detail::common_period(omegas);
        const double scan = f.period ? *f.period : 200.0 * M_PI;
        f.sup_norm = detail::sup_abs_on(f.p, scan) * (1.0 + 1e-12);
    }
    f.M1 = f.sup_norm + 1.0;
    return f;
}

inline ForcingTerm make_constant_forcing(double c) { return make_trig_forcing(c); }

// Mean over probe windows of (1/T) int_t^{t+T} p, and the spread of the
// windowed means around it.
inline AverageEstimate estimate_average(const ForcingTerm& f, double T,
                                        const std::vector<double>& t_probes) {
    if (!(T > 0.0)) throw ConfigError("estimate_average: window must be positive");
    if (t_probes.empty()) throw ConfigError("estimate_average: no probe points");
    std::vector<double> means;
    means.reserve(t_probes.size());
    for (double t0 : t_probes)
        means.push_back(integrate(f.p, t0, t0 + T, 1e-8) / T);
    AverageEstimate e;
    for (double m : means) e.A_hat += m;
    e.A_hat /= static_cast<double>(means.size());
    for (double m : means) e.sup_dev = std::max(e.sup_dev, std::abs(m - e.A_hat));
    return e;
}

inline Margin landesman_lazer_margin(const ReactionTerm& g, const ForcingTerm& p) {
    Margin m;
    m.lower = p.average - g.g_minus;
    m.upper = g.g_plus - p.average;
    m.ok = m.lower > 0.0 && m.upper > 0.0;
    return m;
}

// Periodic decomposition p = p1 + d/dt p2 with p1 constantly A(p) and p2 the
// (periodic, hence bounded) primitive of the oscillation.
inline ForcingDecomposition decompose_periodic(const ForcingTerm& f, double epsilon) {
    if (!f.period) throw NotPeriodic("decompose_periodic: forcing has no declared period");
    ForcingDecomposition d;
    d.epsilon = epsilon;
    const double avg = f.average;
    d.p1 = [avg](double) { return avg; };
    d.p2 = f.osc_primitive;
    d.sup_p2 = detail::sup_abs_on(f.osc_primitive, *f.period);
    d.M_eps = d.sup_p2 + 1.0;
    return d;
}

} // namespace nehari
