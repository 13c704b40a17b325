#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/forcing.hpp"
#include "nehari/reaction.hpp"
#include "nehari/signed_minimizer.hpp"

namespace nehari {

// Independent oracle for the one-signed boundary value problem: integrate
// u'' = p(t) - g(u) from the left endpoint with a trial slope and bisect the
// slope until u(b) vanishes. It shares no discretization with the variational
// minimizer, so agreement between the two is a genuine cross-check.
struct ShootingResult {
    Sign sign = Sign::plus;
    double a = 0.0;
    double b = 0.0;
    double initial_slope = 0.0;
    double endpoint_value = 0.0; // u(b) of the accepted trajectory
    int bisection_iterations = 0;
    std::size_t rk_steps = 0;
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> du;

    // Cubic Hermite interpolation between the accepted integrator steps.
    double eval(double x) const {
        if (x <= t.front()) return u.front();
        if (x >= t.back()) return u.back();
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
        const double h = t[i + 1] - t[i];
        const double s = (x - t[i]) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
    }
};

namespace detail {

struct RkPoint {
    double t, u, v;
};

// Adaptive Dormand-Prince 5(4) for the scalar second-order equation written
// as the system (u, v)' = (v, p(t) - g(u)).
inline std::vector<RkPoint> integrate_shot(double a, double b, double slope,
                                           const ReactionTerm& g, const ForcingTerm& p,
                                           double tol) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const auto fu = [](double /*t*/, double /*u*/, double v) { return v; };
    const auto fv = [&](double t, double u, double /*v*/) { return p.p(t) - g.g(u); };

    std::vector<RkPoint> out;
    double t = a, u = 0.0, v = slope;
    out.push_back({t, u, v});
    double h = (b - a) / 100.0;
    const double h_min = 1e-12 * (b - a);
    const double h_max = (b - a) / 10.0;
    double k1u = fu(t, u, v), k1v = fv(t, u, v);
    std::size_t steps = 0;
    while (t < b) {
        if (steps++ > 2000000)
            throw NonConvergence("integrate_shot: step count blew past the budget");
        h = std::min(h, b - t);
        const double u2 = u + h * a21 * k1u, v2 = v + h * a21 * k1v;
        const double k2u = fu(t + c2 * h, u2, v2), k2v = fv(t + c2 * h, u2, v2);
        const double u3 = u + h * (a31 * k1u + a32 * k2u), v3 = v + h * (a31 * k1v + a32 * k2v);
        const double k3u = fu(t + c3 * h, u3, v3), k3v = fv(t + c3 * h, u3, v3);
        const double u4 = u + h * (a41 * k1u + a42 * k2u + a43 * k3u),
                     v4 = v + h * (a41 * k1v + a42 * k2v + a43 * k3v);
        const double k4u = fu(t + c4 * h, u4, v4), k4v = fv(t + c4 * h, u4, v4);
        const double u5 = u + h * (a51 * k1u + a52 * k2u + a53 * k3u + a54 * k4u),
                     v5 = v + h * (a51 * k1v + a52 * k2v + a53 * k3v + a54 * k4v);
        const double k5u = fu(t + c5 * h, u5, v5), k5v = fv(t + c5 * h, u5, v5);
        const double u6 = u + h * (a61 * k1u + a62 * k2u + a63 * k3u + a64 * k4u + a65 * k5u),
                     v6 = v + h * (a61 * k1v + a62 * k2v + a63 * k3v + a64 * k4v + a65 * k5v);
        const double k6u = fu(t + h, u6, v6), k6v = fv(t + h, u6, v6);
        const double un = u + h * (b1 * k1u + b3 * k3u + b4 * k4u + b5 * k5u + b6 * k6u);
        const double vn = v + h * (b1 * k1v + b3 * k3v + b4 * k4v + b5 * k5v + b6 * k6v);
        const double k7u = fu(t + h, un, vn), k7v = fv(t + h, un, vn);
        const double eu =
            h * (e1 * k1u + e3 * k3u + e4 * k4u + e5 * k5u + e6 * k6u + e7 * k7u);
        const double ev =
            h * (e1 * k1v + e3 * k3v + e4 * k4v + e5 * k5v + e6 * k6v + e7 * k7v);
        const double su = tol * (1.0 + std::abs(un));
        const double sv = tol * (1.0 + std::abs(vn));
        const double err =
            std::sqrt(0.5 * ((eu / su) * (eu / su) + (ev / sv) * (ev / sv)));
        if (err <= 1.0) {
            t += h;
            u = un;
            v = vn;
            k1u = k7u; // first-same-as-last
            k1v = k7v;
            out.push_back({t, u, v});
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = std::min(h * fac, h_max);
        if (h < h_min && t < b)
            throw NonConvergence("integrate_shot: step size underflow");
    }
    return out;
}

} // namespace detail

// Solves u'' + g(u) = p, u(a) = u(b) = 0, one-signed, by slope bisection.
// The sign - problem is shot through the mirrored equation and flipped back.
// slope_guess = 0 lets the bracket start from the arch slope of the
// constant-source profile, margin * (b-a) / 2.
inline ShootingResult shoot_bvp(double a, double b, Sign sign, const ReactionTerm& g,
                                const ForcingTerm& p, double slope_guess = 0.0,
                                double tol = 1e-10) {
    if (!(b > a)) throw ConfigError("shoot_bvp: empty interval");
    const ReactionTerm gc = (sign == Sign::plus) ? g : mirror(g);
    const ForcingTerm pc = (sign == Sign::plus) ? p : mirrored(p);
    const double margin = detail::cone_margin(gc, pc);
    const double s_ref = slope_guess > 0.0 ? slope_guess : 0.5 * margin * (b - a);

    const auto endpoint = [&](double s) {
        return detail::integrate_shot(a, b, s, gc, pc, tol).back().u;
    };

    // u(b; s) grows with s along the arch branch, but at small s the
    // trajectory can fall into the opposite-sign well and hover there, which
    // makes the endpoint oscillate. Scan a slope ladder and bisect on the
    // topmost sign change; above it the endpoint is strictly positive, so
    // that crossing belongs to the arch.
    const int rungs = 48;
    const double lo0 = 0.05 * s_ref, hi0 = 8.0 * s_ref;
    double s_lo = 0.0, s_hi = 0.0;
    bool found = false;
    double f_prev = endpoint(lo0);
    for (int i = 1; i <= rungs; ++i) {
        const double s_cur =
            lo0 * std::pow(hi0 / lo0, static_cast<double>(i) / static_cast<double>(rungs));
        const double f_cur = endpoint(s_cur);
        if (f_prev <= 0.0 && f_cur >= 0.0) {
            s_lo = lo0 * std::pow(hi0 / lo0,
                                  static_cast<double>(i - 1) / static_cast<double>(rungs));
            s_hi = s_cur;
            found = true;
        }
        f_prev = f_cur;
    }
    if (!found) {
        std::ostringstream os;
        os << "shoot_bvp: no slope bracket in [" << lo0 << "," << hi0 << "] on [" << a << ","
           << b << "]; the endpoint never changed sign";
        throw NoBracket(os.str());
    }

    double s_mid = s_ref;
    int iters = 0;
    for (; iters < 60; ++iters) {
        s_mid = 0.5 * (s_lo + s_hi);
        if (s_hi - s_lo <= 1e-15 * std::max(1.0, s_mid)) break;
        const double f_mid = endpoint(s_mid);
        if (f_mid >= 0.0)
            s_hi = s_mid;
        else
            s_lo = s_mid;
    }

    const auto path = detail::integrate_shot(a, b, s_mid, gc, pc, tol);
    ShootingResult res;
    res.sign = sign;
    res.a = a;
    res.b = b;
    res.bisection_iterations = iters;
    res.rk_steps = path.size() - 1;
    const double flip = sign_value(sign);
    res.initial_slope = flip * s_mid;
    res.endpoint_value = flip * path.back().u;
    res.t.reserve(path.size());
    res.u.reserve(path.size());
    res.du.reserve(path.size());
    for (const auto& q : path) {
        res.t.push_back(q.t);
        res.u.push_back(flip * q.u);
        res.du.push_back(flip * q.v);
    }

    // The mirrored trajectory must stay nonnegative away from the endpoints;
    // a deep excursion means the bisection landed on a sign-violating shot.
    double floor_val = 0.0;
    for (const auto& q : path) floor_val = std::min(floor_val, q.u);
    double peak = 0.0;
    for (const auto& q : path) peak = std::max(peak, std::abs(q.u));
    if (floor_val < -1e-6 * (1.0 + peak)) {
        std::ostringstream os;
        os << "shoot_bvp: trajectory crosses zero inside [" << a << "," << b
           << "] (min value " << floor_val << "); no one-signed solution at this slope";
        throw SignViolation(os.str());
    }
    return res;
}

} // namespace nehari
