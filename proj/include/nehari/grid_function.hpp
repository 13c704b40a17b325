#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

// A function sampled on a uniform grid over [a,b] with homogeneous Dirichlet
// endpoint values. Only the n interior values are stored; u(a) = u(b) = 0 is
// structural, so constraint violations at the boundary cannot happen.
// Grid spacing is h = (b-a)/(n+1).
struct GridFunction {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> values; // interior nodes a+h, a+2h, ..., b-h

    std::size_t n() const { return values.size(); }

    double h() const { return (b - a) / static_cast<double>(values.size() + 1); }

    // Interior node position, i in [0, n).
    double node(std::size_t i) const { return a + static_cast<double>(i + 1) * h(); }

    // Value with boundary convention: index -1 is u(a), index n is u(b).
    double at(std::ptrdiff_t i) const {
        if (i < 0 || i >= static_cast<std::ptrdiff_t>(values.size())) return 0.0;
        return values[static_cast<std::size_t>(i)];
    }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    // sqrt( sum over all n+1 gaps of h * ((u_{i+1}-u_i)/h)^2 ), the discrete
    // H^1_0 seminorm including the boundary gaps.
    double dirichlet_seminorm() const {
        const double hh = h();
        double s = 0.0;
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(values.size());
        for (std::ptrdiff_t i = -1; i < nn; ++i) {
            const double d = (at(i + 1) - at(i)) / hh;
            s += hh * d * d;
        }
        return std::sqrt(s);
    }

    // Largest slope of the piecewise-linear interpolant.
    double max_gap_slope() const {
        const double hh = h();
        double m = 0.0;
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(values.size());
        for (std::ptrdiff_t i = -1; i < nn; ++i)
            m = std::max(m, std::abs(at(i + 1) - at(i)) / hh);
        return m;
    }

    // Piecewise-linear evaluation; clamps to the endpoint zeros outside [a,b].
    double eval(double t) const {
        if (t <= a || t >= b) return 0.0;
        const double hh = h();
        const double x = (t - a) / hh; // in (0, n+1)
        const double fl = std::floor(x);
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(fl) - 1; // left node index
        const double w = x - fl;
        return at(i) * (1.0 - w) + at(i + 1) * w;
    }

    // Slope of the interpolant at t (gap slope; at nodes, the right gap).
    double eval_derivative(double t) const {
        if (t < a || t > b) return 0.0;
        const double hh = h();
        double x = (t - a) / hh;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(x)) - 1;
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(values.size());
        i = std::clamp<std::ptrdiff_t>(i, -1, nn - 1);
        return (at(i + 1) - at(i)) / hh;
    }
};

// Builds a zero grid function whose spacing does not exceed h_target and has
// at least 3 interior nodes.
inline GridFunction make_grid(double a, double b, double h_target) {
    if (!(b - a > 0.0)) throw GridMismatch("make_grid: interval has non-positive length");
    if (!(h_target > 0.0)) throw GridMismatch("make_grid: non-positive target spacing");
    std::size_t gaps = static_cast<std::size_t>(std::ceil((b - a) / h_target - 1e-12));
    gaps = std::max<std::size_t>(gaps, 4);
    GridFunction u;
    u.a = a;
    u.b = b;
    u.values.assign(gaps - 1, 0.0);
    return u;
}

inline bool same_grid(const GridFunction& u, const GridFunction& v) {
    return u.a == v.a && u.b == v.b && u.values.size() == v.values.size();
}

// CSV with header, endpoint rows included with u = 0.
inline void write_csv(std::ostream& os, const GridFunction& u) {
    os << "t,u\n";
    os << u.a << ",0\n";
    for (std::size_t i = 0; i < u.n(); ++i) os << u.node(i) << "," << u.values[i] << "\n";
    os << u.b << ",0\n";
}

} // namespace nehari
