#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/forcing.hpp"
#include "nehari/grid_function.hpp"
#include "nehari/reaction.hpp"

namespace nehari {

// J(u) = int 1/2 u'^2 - G(u) + p u, split into its three parts.
struct ActionValue {
    double value = 0.0;
    double kinetic = 0.0;   // int 1/2 u'^2
    double potential = 0.0; // int G(u)
    double forcing = 0.0;   // int p u
};

// Kinetic term by first differences over the n+1 gaps (exact for the P1
// interpolant); potential and forcing by the trapezoid rule on nodes, whose
// endpoint contributions vanish since u and G(0) do.
inline ActionValue action(const GridFunction& u, const ReactionTerm& g, const ForcingTerm& p) {
    const double h = u.h();
    ActionValue a;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.n());
    for (std::ptrdiff_t i = -1; i < n; ++i) {
        const double d = (u.at(i + 1) - u.at(i)) / h;
        a.kinetic += 0.5 * h * d * d;
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double ui = u.values[static_cast<std::size_t>(i)];
        a.potential += h * g.G(ui);
        a.forcing += h * p.p(u.node(static_cast<std::size_t>(i))) * ui;
    }
    a.value = a.kinetic - a.potential + a.forcing;
    return a;
}

// Discrete L2 gradient of the action: node i carries
//   h * ( -(u_{i+1} - 2u_i + u_{i-1})/h^2 - g(u_i) + p(t_i) ),
// which vanishes exactly at discrete solutions of u'' + g(u) = p.
inline GridFunction action_gradient(const GridFunction& u, const ReactionTerm& g,
                                    const ForcingTerm& p) {
    const double h = u.h();
    GridFunction grad = u;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.n());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double ui = u.values[static_cast<std::size_t>(i)];
        const double lap = (u.at(i + 1) - 2.0 * ui + u.at(i - 1)) / (h * h);
        grad.values[static_cast<std::size_t>(i)] =
            h * (-lap - g.g(ui) + p.p(u.node(static_cast<std::size_t>(i))));
    }
    return grad;
}

// Applies the second variation v -> h * ( -v''_discrete - g'(u) v ).
inline GridFunction action_hessian_apply(const GridFunction& u, const GridFunction& v,
                                         const ReactionTerm& g) {
    if (!same_grid(u, v)) throw GridMismatch("action_hessian_apply: grids differ");
    const double h = u.h();
    GridFunction out = v;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.n());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double vi = v.values[static_cast<std::size_t>(i)];
        const double lap = (v.at(i + 1) - 2.0 * vi + v.at(i - 1)) / (h * h);
        out.values[static_cast<std::size_t>(i)] =
            h * (-lap - g.dg(u.values[static_cast<std::size_t>(i)]) * vi);
    }
    return out;
}

// hat u(t) = u(a + t(b-a)) / (b-a)^2 maps the interval to (0,1); under it
// J_{(a,b)}(u) = (b-a)^3 * Jhat(hat u). The interior nodes map onto the unit
// grid with the same count, so scaling is a pure value transformation.
inline GridFunction scale_to_unit(const GridFunction& u) {
    GridFunction s;
    s.a = 0.0;
    s.b = 1.0;
    const double len2 = (u.b - u.a) * (u.b - u.a);
    s.values.resize(u.n());
    for (std::size_t i = 0; i < u.n(); ++i) s.values[i] = u.values[i] / len2;
    return s;
}

inline GridFunction unscale(const GridFunction& s, double a, double b) {
    GridFunction u;
    u.a = a;
    u.b = b;
    const double len2 = (b - a) * (b - a);
    u.values.resize(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) u.values[i] = s.values[i] * len2;
    return u;
}

struct LimitMinimizer {
    GridFunction w;       // sampled parabola (k/2) t (1-t) on (0,1)
    double value = 0.0;   // -k^2/24
};

// Closed-form minimizer of the limit problem w'' = -k on (0,1) with zero
// boundary values, and its exact energy.
inline LimitMinimizer limit_minimizer(double k, std::size_t n) {
    if (!(k > 0.0))
        throw NonPositiveK("limit_minimizer: non-positive margin k (Landesman-Lazer fails on this side)");
    LimitMinimizer lm;
    lm.w.a = 0.0;
    lm.w.b = 1.0;
    lm.w.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(n + 1);
        lm.w.values[i] = 0.5 * k * t * (1.0 - t);
    }
    lm.value = -k * k / 24.0;
    return lm;
}

} // namespace nehari
