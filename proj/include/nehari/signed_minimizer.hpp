#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nehari/action.hpp"
#include "nehari/errors.hpp"
#include "nehari/forcing.hpp"
#include "nehari/grid_function.hpp"
#include "nehari/reaction.hpp"
#include "nehari/tridiag.hpp"

namespace nehari {

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }
inline const char* sign_name(Sign s) { return s == Sign::plus ? "+" : "-"; }

struct SolverOptions {
    double h_target = 0.05;
    double tol = 1e-9;        // KKT residual in scaled variables
    int max_iter = 400;
    double min_length = 1.0;  // reject shorter intervals up front
    int n_starts = 10;        // used by the uniqueness probe
    std::uint64_t seed = 1789;
    // Set from certify_spacing_floor once available; 0 disables the
    // interior-positivity enforcement for uncertified exploratory runs.
    double certified_length = 0.0;
    bool compute_eigenvalue = true;
};

struct SignedMinimizerResult {
    GridFunction u;
    Sign sign = Sign::plus;
    double phi = 0.0;
    double slope_a = 0.0;
    double slope_b = 0.0;
    double kkt_residual = 0.0;
    std::size_t active_set_size = 0;
    bool interior = true;
    double lambda_min = 0.0;
    bool degenerate = false;
    int iterations = 0;
    std::size_t n_starts = 1;
    double max_pair_distance = 0.0;
};

// Constants of the energy bracket phi^+ in [-alpha_lower (b-a)^3,
// -alpha_upper (b-a)^3] (beta pair for phi^-). Note alpha_lower >
// alpha_upper as numbers: "lower" and "upper" name which side of phi they
// bound, not their relative size.
struct EnergyBracket {
    double alpha_lower = 0.0;
    double alpha_upper = 0.0;
    double beta_lower = 0.0;
    double beta_upper = 0.0;
    double epsilon = 0.0;
    double L = 0.0; // certified spacing floor
    double C1 = 0.0;
    std::string ordering; // the four constants sorted descending, by name
};

namespace detail {

inline std::pair<double, double> endpoint_slopes(const GridFunction& u) {
    const double h = u.h();
    const std::size_t n = u.n();
    const double sa = (4.0 * u.values[0] - u.values[1]) / (2.0 * h);
    const double sb = (u.values[n - 2] - 4.0 * u.values[n - 1]) / (2.0 * h);
    return {sa, sb};
}

struct ConeSolve {
    GridFunction u;
    double value = 0.0;
    double kkt = 0.0;
    std::size_t active = 0;
    int iterations = 0;
};

// Projected Newton on the nonnegative cone. Active nodes (clamped at zero
// with outward gradient) are frozen via identity rows; the free block stays
// tridiagonal because a zero off-diagonal entry decouples it. When the free
// block is not positive definite the step falls back to the projected
// gradient direction.
inline ConeSolve minimize_cone_from(GridFunction u, const ReactionTerm& g, const ForcingTerm& p,
                                    const SolverOptions& opts) {
    const double h = u.h();
    const std::size_t n = u.n();
    for (auto& v : u.values) v = std::max(0.0, v);

    double J = action(u, g, p).value;
    if (!std::isfinite(J)) throw NonFiniteValue("minimize_signed: non-finite action at start");

    std::vector<char> active(n, 0);
    std::vector<double> step(n, 0.0);
    GridFunction trial = u;

    double kkt = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        const GridFunction grad = action_gradient(u, g, p);

        kkt = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            active[i] = (u.values[i] == 0.0 && grad.values[i] > 0.0) ? 1 : 0;
            if (!active[i]) kkt = std::max(kkt, std::abs(grad.values[i]) / h);
        }
        if (kkt <= opts.tol) {
            ConeSolve out;
            out.u = u;
            out.value = J;
            out.kkt = kkt;
            for (std::size_t i = 0; i < n; ++i)
                if (u.values[i] == 0.0) ++out.active;
            out.iterations = iter;
            return out;
        }

        Tridiagonal T;
        T.diag.resize(n);
        T.off.assign(n - 1, 0.0);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) {
                T.diag[i] = 1.0;
                rhs[i] = 0.0;
            } else {
                T.diag[i] = h * (2.0 / (h * h) - g.dg(u.values[i]));
                rhs[i] = -grad.values[i];
            }
            if (i + 1 < n && !active[i] && !active[i + 1]) T.off[i] = -h / (h * h);
        }

        if (solve_positive_tridiagonal(T, rhs)) {
            step = rhs;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                step[i] = active[i] ? 0.0 : -grad.values[i] / h;
        }

        double alpha = 1.0;
        bool accepted = false;
        // Near the minimum of a large-energy piece the exact Armijo decrease
        // drops below the summation roundoff of re-evaluating J; the noise
        // term keeps the search from stalling on that plateau while the
        // gradient is still well above tol.
        const double noise = 1e-16 * static_cast<double>(n) * (1.0 + std::abs(J));
        for (int bt = 0; bt < 60; ++bt) {
            double predicted = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial.values[i] = std::max(0.0, u.values[i] + alpha * step[i]);
                predicted += grad.values[i] * (trial.values[i] - u.values[i]);
            }
            const double Jt = action(trial, g, p).value;
            if (std::isfinite(Jt) && Jt <= J + 1e-4 * predicted + noise && predicted < 0.0) {
                u.values.swap(trial.values);
                J = Jt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            std::ostringstream os;
            os << "minimize_signed: line search stalled at iteration " << iter
               << " with KKT residual " << kkt;
            throw NonConvergence(os.str());
        }
    }
    std::ostringstream os;
    os << "minimize_signed: KKT residual " << kkt << " > " << opts.tol << " after "
       << opts.max_iter << " iterations";
    throw NonConvergence(os.str());
}

inline GridFunction cone_parabola(double a, double b, double k, double h_target, double factor) {
    GridFunction u = make_grid(a, b, h_target);
    for (std::size_t i = 0; i < u.n(); ++i) {
        const double t = u.node(i);
        u.values[i] = factor * 0.5 * k * (t - a) * (b - t);
    }
    return u;
}

inline double cone_margin(const ReactionTerm& g, const ForcingTerm& p) {
    const double k = g.g_plus - p.average;
    return k > 0.0 ? k : 0.1; // fall back to a small arch when the margin fails
}

} // namespace detail

inline double nondegeneracy_eigenvalue(const GridFunction& u, const ReactionTerm& g) {
    const double h = u.h();
    const std::size_t n = u.n();
    Tridiagonal T;
    T.diag.resize(n);
    T.off.assign(n - 1, -1.0 / (h * h));
    for (std::size_t i = 0; i < n; ++i) T.diag[i] = 2.0 / (h * h) - g.dg(u.values[i]);
    return smallest_eigenvalue(T).lambda;
}

inline std::pair<double, double> boundary_slopes(const SignedMinimizerResult& r) {
    return detail::endpoint_slopes(r.u);
}

inline std::pair<double, double> phi_derivatives(const SignedMinimizerResult& r) {
    return {0.5 * r.slope_a * r.slope_a, -0.5 * r.slope_b * r.slope_b};
}

namespace detail {

// Solve the cone problem (already mirrored for sign -) from a given start and
// express the result in the original variables.
inline SignedMinimizerResult finish_signed(ConeSolve cs, Sign sign, const ReactionTerm& g,
                                           const ForcingTerm& p, const SolverOptions& opts) {
    SignedMinimizerResult r;
    r.sign = sign;
    r.u = std::move(cs.u);
    if (sign == Sign::minus)
        for (auto& v : r.u.values) v = -v;
    r.phi = action(r.u, g, p).value;
    auto [sa, sb] = endpoint_slopes(r.u);
    r.slope_a = sa;
    r.slope_b = sb;
    r.kkt_residual = cs.kkt;
    r.active_set_size = cs.active;
    r.interior = (cs.active == 0);
    r.iterations = cs.iterations;
    if (opts.compute_eigenvalue) {
        r.lambda_min = nondegeneracy_eigenvalue(r.u, g);
        r.degenerate = !(r.lambda_min > 1e-8);
    }
    if (opts.certified_length > 0.0 && (r.u.b - r.u.a) >= opts.certified_length - 1e-12 &&
        !r.interior) {
        std::ostringstream os;
        os << "minimize_signed: " << r.active_set_size << " clamped nodes on [" << r.u.a << ","
           << r.u.b << "] despite length >= certified floor " << opts.certified_length
           << "; the floor must be re-certified";
        throw NoInteriorSolution(os.str());
    }
    return r;
}

} // namespace detail

inline SignedMinimizerResult minimize_signed(double a, double b, Sign sign, const ReactionTerm& g,
                                             const ForcingTerm& p, const SolverOptions& opts = {}) {
    if (!(b - a >= opts.min_length)) {
        std::ostringstream os;
        os << "minimize_signed: interval length " << (b - a) << " below minimum "
           << opts.min_length;
        throw ConfigError(os.str());
    }
    const ReactionTerm gc = (sign == Sign::plus) ? g : mirror(g);
    const ForcingTerm pc = (sign == Sign::plus) ? p : mirrored(p);
    const GridFunction u0 = detail::cone_parabola(a, b, detail::cone_margin(gc, pc),
                                                  opts.h_target, 1.0);
    auto cs = detail::minimize_cone_from(u0, gc, pc, opts);
    return detail::finish_signed(std::move(cs), sign, g, p, opts);
}

struct UniquenessReport {
    double max_pair_distance = 0.0;
    std::vector<SignedMinimizerResult> results;
};

// Re-minimizes from scaled copies of the model arch and from randomized
// positive profiles; pairwise agreement of the limits is the uniqueness
// evidence.
inline UniquenessReport uniqueness_probe(double a, double b, Sign sign, const ReactionTerm& g,
                                         const ForcingTerm& p, int n_starts, std::uint64_t seed,
                                         const SolverOptions& opts = {}) {
    const ReactionTerm gc = (sign == Sign::plus) ? g : mirror(g);
    const ForcingTerm pc = (sign == Sign::plus) ? p : mirrored(p);
    const double k = detail::cone_margin(gc, pc);

    UniquenessReport rep;
    const double factors[] = {1.0, 0.25, 0.5, 2.0, 4.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> bump(0.2, 2.0);
    for (int s = 0; s < n_starts; ++s) {
        GridFunction u0 = detail::cone_parabola(a, b, k, opts.h_target, 1.0);
        if (s < 5) {
            for (auto& v : u0.values) v *= factors[s];
        } else {
            for (auto& v : u0.values) v *= bump(rng);
        }
        auto cs = detail::minimize_cone_from(u0, gc, pc, opts);
        rep.results.push_back(detail::finish_signed(std::move(cs), sign, g, p, opts));
    }
    for (std::size_t i = 0; i < rep.results.size(); ++i)
        for (std::size_t j = i + 1; j < rep.results.size(); ++j) {
            double d = 0.0;
            const auto& ui = rep.results[i].u.values;
            const auto& uj = rep.results[j].u.values;
            for (std::size_t m = 0; m < ui.size(); ++m)
                d = std::max(d, std::abs(ui[m] - uj[m]));
            rep.max_pair_distance = std::max(rep.max_pair_distance, d);
        }
    for (auto& r : rep.results) {
        r.n_starts = static_cast<std::size_t>(n_starts);
        r.max_pair_distance = rep.max_pair_distance;
    }
    return rep;
}

namespace detail {

inline bool bracket_relation_holds(double alpha_lower, double beta_lower, double beta_upper) {
    const double root = std::sqrt(beta_lower / alpha_lower);
    return beta_lower / ((1.0 + root) * (1.0 + root)) < beta_upper;
}

} // namespace detail

inline EnergyBracket make_energy_bracket(const ReactionTerm& g, const ForcingTerm& p,
                                         double epsilon, double L = 0.0) {
    const double k_plus = g.g_plus - p.average;
    const double k_minus = p.average - g.g_minus;
    if (!(k_plus > 0.0) || !(k_minus > 0.0))
        throw HypothesisError("make_energy_bracket: average forcing outside (g_minus, g_plus)");
    const double m_plus = k_plus * k_plus / 24.0;
    const double m_minus = k_minus * k_minus / 24.0;
    if (!(epsilon > 0.0) || epsilon >= std::min(m_plus, m_minus)) {
        std::ostringstream os;
        os << "make_energy_bracket: epsilon " << epsilon
           << " not inside (0, min margin^2/24 = " << std::min(m_plus, m_minus) << ")";
        throw CertificationFailed(os.str());
    }
    EnergyBracket eb;
    eb.alpha_lower = m_plus + epsilon;
    eb.alpha_upper = m_plus - epsilon;
    eb.beta_lower = m_minus + epsilon;
    eb.beta_upper = m_minus - epsilon;
    eb.epsilon = epsilon;
    eb.L = L;
    eb.C1 = k_plus * k_plus / (24.0 * (g.sup_norm + p.M1));
    if (!detail::bracket_relation_holds(eb.alpha_lower, eb.beta_lower, eb.beta_upper)) {
        std::ostringstream os;
        os << "make_energy_bracket: epsilon " << epsilon
           << " violates the bracket relation beta_lower/(1+sqrt(beta_lower/alpha_lower))^2 < "
              "beta_upper";
        throw CertificationFailed(os.str());
    }
    std::vector<std::pair<double, std::string>> named = {{eb.alpha_lower, "alpha_lower"},
                                                         {eb.alpha_upper, "alpha_upper"},
                                                         {eb.beta_lower, "beta_lower"},
                                                         {eb.beta_upper, "beta_upper"}};
    std::stable_sort(named.begin(), named.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    std::ostringstream os;
    for (std::size_t i = 0; i < named.size(); ++i) os << (i ? " > " : "") << named[i].second;
    eb.ordering = os.str();
    return eb;
}

inline double default_bracket_epsilon(const ReactionTerm& g, const ForcingTerm& p) {
    const double k_plus = g.g_plus - p.average;
    const double k_minus = p.average - g.g_minus;
    if (!(k_plus > 0.0) || !(k_minus > 0.0))
        throw HypothesisError("default_bracket_epsilon: average forcing outside (g_minus, g_plus)");
    const double k = std::min(k_plus, k_minus);
    double eps = 0.01 * k * k;
    for (int it = 0; it < 200; ++it) {
        const double al = k_plus * k_plus / 24.0 + eps;
        const double bl = k_minus * k_minus / 24.0 + eps;
        const double bu = k_minus * k_minus / 24.0 - eps;
        if (bu > 0.0 && detail::bracket_relation_holds(al, bl, bu)) return eps;
        eps *= 0.5;
    }
    throw CertificationFailed("default_bracket_epsilon: no epsilon satisfied the bracket relation");
}

// Sweeps the candidate lengths and returns the smallest one from which on
// every longer tested interval yields, for both signs, a strictly interior
// nondegenerate minimizer whose energy ratio sits inside the bracket.
inline EnergyBracket certify_spacing_floor(const ReactionTerm& g, const ForcingTerm& p,
                                           double bracket_eps, std::vector<double> lengths,
                                           const SolverOptions& base_opts = {}) {
    if (lengths.empty()) throw ConfigError("certify_spacing_floor: empty length list");
    EnergyBracket eb = make_energy_bracket(g, p, bracket_eps);
    std::sort(lengths.begin(), lengths.end());

    SolverOptions opts = base_opts;
    opts.min_length = 0.0;
    opts.certified_length = 0.0;
    opts.compute_eigenvalue = true;

    std::vector<char> pass(lengths.size(), 0);
    std::ostringstream diag;
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        const double len = lengths[li];
        bool ok = true;
        diag << "  length " << len << ":";
        for (Sign sign : {Sign::plus, Sign::minus}) {
            try {
                const auto r = minimize_signed(0.0, len, sign, g, p, opts);
                const double ratio = -r.phi / (len * len * len);
                const double lo = (sign == Sign::plus) ? eb.alpha_upper : eb.beta_upper;
                const double hi = (sign == Sign::plus) ? eb.alpha_lower : eb.beta_lower;
                const bool in_bracket = (lo <= ratio && ratio <= hi);
                const bool nondeg = r.lambda_min > 1e-8;
                diag << " [" << sign_name(sign) << " ratio=" << ratio
                     << (r.interior ? "" : " clamped") << (nondeg ? "" : " degenerate")
                     << (in_bracket ? "" : " outside-bracket") << "]";
                ok = ok && r.interior && nondeg && in_bracket;
            } catch (const Error& e) {
                diag << " [" << sign_name(sign) << " error: " << e.what() << "]";
                ok = false;
            }
        }
        diag << "\n";
        pass[li] = ok ? 1 : 0;
    }

    for (std::size_t li = 0; li < lengths.size(); ++li) {
        bool suffix_ok = true;
        for (std::size_t lj = li; lj < lengths.size(); ++lj) suffix_ok = suffix_ok && pass[lj];
        if (suffix_ok) {
            eb.L = lengths[li];
            return eb;
        }
    }
    throw CertificationFailed("certify_spacing_floor: no tested length qualified\n" + diag.str());
}

} // namespace nehari
