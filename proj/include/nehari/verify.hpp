#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/forcing.hpp"
#include "nehari/reaction.hpp"
#include "nehari/signed_minimizer.hpp"

namespace nehari {

// Central finite differences of the piece value in its endpoints, computed by
// re-solving the minimization on shifted intervals. Used to validate the
// closed-form derivative formulas (half the squared boundary slopes).
struct FdDerivatives {
    double d_a = 0.0;
    double d_b = 0.0;
    double delta = 0.0;
};

inline FdDerivatives fd_phi_derivative(double a, double b, Sign sign, const ReactionTerm& g,
                                       const ForcingTerm& p, double delta,
                                       const SolverOptions& opts = {}) {
    if (!(delta > 0.0)) throw ConfigError("fd_phi_derivative: delta must be positive");
    if (!(b - a - delta >= opts.min_length)) {
        std::ostringstream os;
        os << "fd_phi_derivative: shrunk interval length " << (b - a - delta)
           << " is below the solver floor " << opts.min_length;
        throw ConfigError(os.str());
    }
    const auto phi = [&](double lo, double hi) {
        return minimize_signed(lo, hi, sign, g, p, opts).phi;
    };
    FdDerivatives out;
    out.delta = delta;
    out.d_a = (phi(a + delta, b) - phi(a - delta, b)) / (2.0 * delta);
    out.d_b = (phi(a, b + delta) - phi(a, b - delta)) / (2.0 * delta);
    return out;
}

// Exhaustive scan of the gluing-point lattice for one or two interior points.
// Every admissible tuple on the grid is evaluated, so the returned maximizer
// is a ground truth for the ascent code up to one grid step per coordinate.
struct BruteForceResult {
    std::vector<double> points;
    double psi = 0.0;
    std::size_t evaluations = 0;
    double grid_step = 0.0;
};

inline BruteForceResult brute_force_partition(double A, double B, int k, double L,
                                              double grid_step, Sign start_sign,
                                              const ReactionTerm& g, const ForcingTerm& p,
                                              const SolverOptions& inner = {}) {
    if (k != 1 && k != 2)
        throw ConfigError("brute_force_partition: only one or two interior points are tractable");
    if (!(grid_step > 0.0)) throw ConfigError("brute_force_partition: grid step must be positive");
    if (!(B - A >= (k + 1) * L))
        throw ConfigError("brute_force_partition: interval too short for the requested points");

    const Sign s0 = start_sign;
    const Sign s1 = (s0 == Sign::plus) ? Sign::minus : Sign::plus;
    const Sign s2 = s0;

    const auto lattice = [&](double lo, double hi) {
        std::vector<double> pts;
        for (long m = 0;; ++m) {
            const double t = lo + static_cast<double>(m) * grid_step;
            if (t > hi + 1e-12 * (B - A)) break;
            pts.push_back(t);
            if (m > 4000) throw ConfigError("brute_force_partition: lattice too fine");
        }
        return pts;
    };

    std::size_t evals = 0;
    const auto piece = [&](double lo, double hi, Sign s) {
        ++evals;
        return minimize_signed(lo, hi, s, g, p, inner).phi;
    };

    BruteForceResult best;
    best.grid_step = grid_step;
    bool found = false;

    if (k == 1) {
        for (double t1 : lattice(A + L, B - L)) {
            const double psi = piece(A, t1, s0) + piece(t1, B, s1);
            if (!found || psi > best.psi) {
                found = true;
                best.psi = psi;
                best.points = {t1};
            }
        }
    } else {
        // The left and right pieces only depend on one coordinate each, so
        // their values are cached across the double loop.
        std::map<long, double> left_cache, right_cache;
        const auto key = [&](double t) { return std::lround((t - A) / grid_step); };
        for (double t1 : lattice(A + L, B - 2.0 * L)) {
            const long k1 = key(t1);
            auto lit = left_cache.find(k1);
            if (lit == left_cache.end())
                lit = left_cache.emplace(k1, piece(A, t1, s0)).first;
            for (double t2 : lattice(t1 + L, B - L)) {
                const long k2 = key(t2);
                auto rit = right_cache.find(k2);
                if (rit == right_cache.end())
                    rit = right_cache.emplace(k2, piece(t2, B, s2)).first;
                const double psi = lit->second + piece(t1, t2, s1) + rit->second;
                if (!found || psi > best.psi) {
                    found = true;
                    best.psi = psi;
                    best.points = {t1, t2};
                }
            }
        }
    }
    if (!found) throw ConfigError("brute_force_partition: empty lattice");
    best.evaluations = evals;
    return best;
}

} // namespace nehari
