#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/partition.hpp"

namespace nehari {

// Sup of |u'' + g(u) - p| over the nodes of u farther than exclusion_radius
// from either endpoint, with u'' taken as the fourth-order five-point second
// difference (the boundary zeros supply the outermost stencil values). Nodes
// close to an endpoint are skipped because the one-signed minimizer only
// matches the equation up to the sign constraint there, and the higher
// derivatives entering the stencil error peak in that layer.
inline double interior_ode_residual(const GridFunction& u, const ReactionTerm& g,
                                    const ForcingTerm& p, double exclusion_radius) {
    const double h = u.h();
    const double guard = exclusion_radius + 1e-12 * (u.b - u.a);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.n());
    double worst = 0.0;
    for (std::ptrdiff_t j = 1; j + 2 <= n; ++j) {
        const double t = u.node(static_cast<std::size_t>(j));
        if (t - u.a <= guard || u.b - t <= guard) continue;
        const double d4 = (-u.at(j - 2) + 16.0 * u.at(j - 1) - 30.0 * u.at(j) +
                           16.0 * u.at(j + 1) - u.at(j + 2)) /
                          (12.0 * h * h);
        worst = std::max(worst, std::abs(d4 + g.g(u.at(j)) - p.p(t)));
    }
    return worst;
}

// One sign-changing solution glued from alternating one-signed pieces. The
// sample arrays concatenate every piece grid and keep the gluing zeros as
// explicit rows, so downstream checks can treat the solution as a single
// nonuniform time series.
struct GluedSolution {
    double A = 0.0;
    double B = 0.0;
    double psi = 0.0;

    std::vector<double> zeros;        // A, interior gluing points, B
    std::vector<Sign> piece_signs;
    std::vector<GridFunction> pieces;
    std::vector<double> left_slopes;  // du at each piece's left endpoint
    std::vector<double> right_slopes;

    std::vector<double> t_samples;
    std::vector<double> u_samples;
    std::vector<double> du_samples;
    std::vector<std::size_t> zero_sample_index; // positions of the zeros in t_samples

    double corner_mismatch_max = 0.0;  // max |1/2 du^2 jump| over interior zeros
    double corner_slope_gap_max = 0.0; // max |du jump| over interior zeros
    double min_zero_slope = 0.0;       // smallest one-sided |du| at any zero
    double sup_norm = 0.0;
    double slope_sup_norm = 0.0;
    double lambda_min_len = 0.0;
    double lambda_max_len = 0.0;
    double ode_residual_sup = 0.0;     // stencil residual away from the zeros

    std::size_t piece_index(double t) const {
        const auto it = std::upper_bound(zeros.begin(), zeros.end(), t);
        const std::ptrdiff_t raw = (it - zeros.begin()) - 1;
        const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(pieces.size()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(raw, 0, last));
    }

    double eval(double t) const {
        if (t <= A || t >= B) return 0.0;
        return pieces[piece_index(t)].eval(t);
    }

    // Piecewise-linear interpolation of the nodal derivative estimates
    // (endpoint slopes at the piece ends, central differences inside), which
    // keeps the derivative second-order accurate between nodes.
    double eval_derivative(double t) const {
        t = std::clamp(t, A, B);
        const std::size_t j = piece_index(t);
        const GridFunction& u = pieces[j];
        const double h = u.h();
        const std::size_t n = u.n();
        double x = std::clamp((t - u.a) / h, 0.0, static_cast<double>(n + 1));
        std::size_t m = static_cast<std::size_t>(std::floor(x));
        if (m > n) m = n;
        const double w = x - static_cast<double>(m);
        const auto dsample = [&](std::size_t pos) {
            if (pos == 0) return left_slopes[j];
            if (pos >= n + 1) return right_slopes[j];
            const auto i = static_cast<std::ptrdiff_t>(pos);
            return 0.5 * (u.at(i) - u.at(i - 2)) / h;
        };
        return (1.0 - w) * dsample(m) + w * dsample(m + 1);
    }
};

inline GluedSolution assemble(const PartitionResult& pr, const ReactionTerm& g,
                              const ForcingTerm& p) {
    const std::size_t m = pr.minimizers.size();
    if (m != pr.partition.points.size() + 1)
        throw ConfigError("assemble: piece count does not match the partition");

    GluedSolution s;
    s.A = pr.partition.A;
    s.B = pr.partition.B;
    s.psi = pr.psi;
    s.lambda_min_len = pr.ratio_stats.lambda_min_len;
    s.lambda_max_len = pr.ratio_stats.lambda_max_len;

    s.zeros.push_back(s.A);
    for (double t : pr.partition.points) s.zeros.push_back(t);
    s.zeros.push_back(s.B);

    s.pieces.reserve(m);
    for (const auto& r : pr.minimizers) {
        s.pieces.push_back(r.u);
        s.piece_signs.push_back(r.sign);
        s.left_slopes.push_back(r.slope_a);
        s.right_slopes.push_back(r.slope_b);
        s.sup_norm = std::max(s.sup_norm, r.u.sup_norm());
        s.slope_sup_norm = std::max(s.slope_sup_norm, r.u.max_gap_slope());
        s.ode_residual_sup =
            std::max(s.ode_residual_sup, interior_ode_residual(r.u, g, p, 2.0 * r.u.h()));
    }

    s.min_zero_slope = std::abs(s.left_slopes.front());
    s.min_zero_slope = std::min(s.min_zero_slope, std::abs(s.right_slopes.back()));
    for (std::size_t i = 1; i < m; ++i) {
        const double lhs = s.right_slopes[i - 1];
        const double rhs = s.left_slopes[i];
        s.corner_slope_gap_max = std::max(s.corner_slope_gap_max, std::abs(lhs - rhs));
        s.corner_mismatch_max =
            std::max(s.corner_mismatch_max, std::abs(0.5 * lhs * lhs - 0.5 * rhs * rhs));
        s.min_zero_slope = std::min({s.min_zero_slope, std::abs(lhs), std::abs(rhs)});
    }

    for (std::size_t j = 0; j < m; ++j) {
        const GridFunction& u = s.pieces[j];
        s.zero_sample_index.push_back(s.t_samples.size());
        s.t_samples.push_back(s.zeros[j]);
        s.u_samples.push_back(0.0);
        s.du_samples.push_back(j == 0 ? s.left_slopes[0]
                                      : 0.5 * (s.right_slopes[j - 1] + s.left_slopes[j]));
        const double h = u.h();
        for (std::size_t i = 0; i < u.n(); ++i) {
            const auto ii = static_cast<std::ptrdiff_t>(i);
            s.t_samples.push_back(u.node(i));
            s.u_samples.push_back(u.values[i]);
            s.du_samples.push_back(0.5 * (u.at(ii + 1) - u.at(ii - 1)) / h);
        }
    }
    s.zero_sample_index.push_back(s.t_samples.size());
    s.t_samples.push_back(s.B);
    s.u_samples.push_back(0.0);
    s.du_samples.push_back(s.right_slopes.back());
    return s;
}

// A priori envelope every one-signed minimizer obeys: with C = ||g|| + ||p||,
// the piece on (a,b) satisfies |u| <= C (b-a)^2 and |du| <= C (b-a); a run on
// an interval at least as long as the certified floor also has
// max |u| >= C1 (b-a)^2 with C1 = margin^2 / (24 (||g|| + M1)). For a glued
// solution the same envelope reads through the extreme piece lengths:
// C1 lambda_min <= max |u| <= C lambda_max^2 and max |du| <= C lambda_max.
struct EnvelopeCheck {
    double sup_norm = 0.0;
    double slope_norm = 0.0;
    double sup_bound = 0.0;
    double slope_bound = 0.0;
    double lower_bound = 0.0;
    bool ok = false;
};

inline double side_constant(Sign s, const ReactionTerm& g, const ForcingTerm& p) {
    const double margin = (s == Sign::plus) ? g.g_plus - p.average : p.average - g.g_minus;
    return margin * margin / (24.0 * (g.sup_norm + p.M1));
}

namespace detail {

inline void finish_envelope(EnvelopeCheck& c) {
    const double slack = 1e-9 * (1.0 + c.sup_bound);
    c.ok = c.sup_norm <= c.sup_bound + slack && c.slope_norm <= c.slope_bound + slack &&
           c.sup_norm + slack >= c.lower_bound;
}

} // namespace detail

inline EnvelopeCheck envelope_check(const SignedMinimizerResult& r, const ReactionTerm& g,
                                    const ForcingTerm& p, double certified_length = 0.0) {
    EnvelopeCheck c;
    const double len = r.u.b - r.u.a;
    const double C = g.sup_norm + p.sup_norm;
    c.sup_norm = r.u.sup_norm();
    c.slope_norm = std::max({r.u.max_gap_slope(), std::abs(r.slope_a), std::abs(r.slope_b)});
    c.sup_bound = C * len * len;
    c.slope_bound = C * len;
    if (certified_length > 0.0 && len >= certified_length && r.interior)
        c.lower_bound = side_constant(r.sign, g, p) * len * len;
    detail::finish_envelope(c);
    return c;
}

inline EnvelopeCheck envelope_check(const GluedSolution& s, const ReactionTerm& g,
                                    const ForcingTerm& p) {
    EnvelopeCheck c;
    const double C = g.sup_norm + p.sup_norm;
    c.sup_norm = s.sup_norm;
    c.slope_norm = s.slope_sup_norm;
    c.sup_bound = C * s.lambda_max_len * s.lambda_max_len;
    c.slope_bound = C * s.lambda_max_len;
    c.lower_bound =
        std::min(side_constant(Sign::plus, g, p), side_constant(Sign::minus, g, p)) *
        s.lambda_min_len;
    detail::finish_envelope(c);
    return c;
}

// Sliding-window diagnostics behind the solvability condition
// g_- < A(p) < g_+. Each window reports the mean of g(u) (which must stay
// strictly between the asymptotes) and the residual of the integrated
// equation du|_X^Y = int (p - g(u)) over the window, evaluated in the discrete
// calculus of the sample grid: gap fluxes replace du, midpoint-weighted sums
// replace the integral, and the flux jumps across the gluing zeros are split
// off as explicitly reported corner defects (they are the quantity the outer
// maximization drives to zero, not part of the in-piece identity).
struct NecessityWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double mean_g = 0.0;
    double deviation = 0.0;     // |mean_g - A(p)|
    double margin_lower = 0.0;  // mean_g - g_-
    double margin_upper = 0.0;  // g_+ - mean_g
    bool inside = false;
    double identity_residual = 0.0;
    double corner_defect_max = 0.0;
};

struct NecessityReport {
    std::vector<NecessityWindow> windows;
    bool all_inside = true;
    double max_identity_residual = 0.0;
    double max_corner_defect = 0.0;
    bool deviation_decreasing = true; // longest window at least as close to A(p) as shortest
};

inline NecessityReport necessity_check(const GluedSolution& s, const ReactionTerm& g,
                                       const ForcingTerm& p,
                                       std::vector<double> window_lengths) {
    if (window_lengths.empty()) throw ConfigError("necessity_check: no window lengths");
    const std::size_t M = s.t_samples.size();
    if (M < 8) throw ConfigError("necessity_check: solution has too few samples");
    std::sort(window_lengths.begin(), window_lengths.end());

    const auto& t = s.t_samples;
    const auto& u = s.u_samples;
    const auto flux = [&](std::size_t i) { return (u[i + 1] - u[i]) / (t[i + 1] - t[i]); };
    const auto is_zero_sample = [&](std::size_t i) {
        return std::binary_search(s.zero_sample_index.begin(), s.zero_sample_index.end(), i);
    };

    NecessityReport rep;
    const double mid = 0.5 * (s.A + s.B);
    for (double wl : window_lengths) {
        if (!(wl > 0.0)) throw ConfigError("necessity_check: window length must be positive");
        const double half = 0.5 * std::min(wl, s.B - s.A);
        std::size_t X = static_cast<std::size_t>(
            std::lower_bound(t.begin(), t.end(), mid - half) - t.begin());
        std::size_t Y = static_cast<std::size_t>(
            std::upper_bound(t.begin(), t.end(), mid + half) - t.begin());
        if (Y > 0) --Y;
        Y = std::min(Y, M - 1);
        if (Y < X + 4) throw ConfigError("necessity_check: window shorter than a few samples");

        NecessityWindow w;
        w.t_lo = t[X];
        w.t_hi = t[Y];

        double integral = 0.0;
        for (std::size_t i = X; i < Y; ++i)
            integral += 0.5 * (g.g(u[i]) + g.g(u[i + 1])) * (t[i + 1] - t[i]);
        w.mean_g = integral / (t[Y] - t[X]);
        w.deviation = std::abs(w.mean_g - p.average);
        w.margin_lower = w.mean_g - g.g_minus;
        w.margin_upper = g.g_plus - w.mean_g;
        w.inside = w.margin_lower > 0.0 && w.margin_upper > 0.0;

        double in_piece = 0.0;
        for (std::size_t i = X + 1; i < Y; ++i) {
            const double wi = 0.5 * (t[i + 1] - t[i - 1]);
            const double term = flux(i) - flux(i - 1) - wi * (p.p(t[i]) - g.g(u[i]));
            if (is_zero_sample(i))
                w.corner_defect_max = std::max(w.corner_defect_max, std::abs(term));
            else
                in_piece += term;
        }
        w.identity_residual = std::abs(in_piece);

        rep.all_inside = rep.all_inside && w.inside;
        rep.max_identity_residual = std::max(rep.max_identity_residual, w.identity_residual);
        rep.max_corner_defect = std::max(rep.max_corner_defect, w.corner_defect_max);
        rep.windows.push_back(w);
    }
    if (rep.windows.size() > 1)
        rep.deviation_decreasing = rep.windows.back().deviation <= rep.windows.front().deviation;
    return rep;
}

} // namespace nehari
