#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

// Symmetric tridiagonal matrix: diag has n entries, off has n-1. A zero
// off-diagonal entry decouples the matrix into independent blocks, which is
// how constrained subproblems reuse these routines without reindexing.
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }

    double inf_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            double row = std::abs(diag[i]);
            if (i > 0) row += std::abs(off[i - 1]);
            if (i + 1 < diag.size()) row += std::abs(off[i]);
            m = std::max(m, row);
        }
        return m;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        const std::size_t n = diag.size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = diag[i] * x[i];
            if (i > 0) v += off[i - 1] * x[i - 1];
            if (i + 1 < n) v += off[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }
};

// LDL^T without pivoting. Returns false if a pivot drops below pivot_floor,
// which the Newton solver treats as "matrix not positive definite here".
inline bool ldlt_factor(const Tridiagonal& T, std::vector<double>& d, std::vector<double>& l,
                        double pivot_floor) {
    const std::size_t n = T.size();
    d.assign(n, 0.0);
    l.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double di = T.diag[i];
        if (i > 0) di -= l[i - 1] * l[i - 1] * d[i - 1];
        if (!(di > pivot_floor)) return false;
        d[i] = di;
        if (i + 1 < n) l[i] = T.off[i] / di;
    }
    return true;
}

inline void ldlt_solve(const std::vector<double>& d, const std::vector<double>& l,
                       std::vector<double>& x) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) x[i] -= l[i - 1] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n; i-- > 1;) x[i - 1] -= l[i - 1] * x[i];
}

// In-place solve T x = rhs for positive definite T. Returns false (leaving
// rhs untouched beyond scratch use is not guaranteed) when T fails the
// positivity test; callers then switch to a gradient step.
inline bool solve_positive_tridiagonal(const Tridiagonal& T, std::vector<double>& rhs,
                                       double pivot_floor = 0.0) {
    std::vector<double> d, l;
    const double floor_eff =
        pivot_floor > 0.0 ? pivot_floor : 1e-14 * std::max(1.0, T.inf_norm());
    if (!ldlt_factor(T, d, l, floor_eff)) return false;
    ldlt_solve(d, l, rhs);
    return true;
}

namespace detail {

// Number of eigenvalues of T strictly below x, by the Sturm pivot count.
inline std::size_t eigenvalues_below(const Tridiagonal& T, double x) {
    const std::size_t n = T.size();
    std::size_t count = 0;
    double d = 1.0;
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < n; ++i) {
        const double sq = (i > 0) ? T.off[i - 1] * T.off[i - 1] : 0.0;
        d = (T.diag[i] - x) - sq / d;
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

} // namespace detail

struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
    int iterations = 0;
};

// Smallest eigenvalue with eigenvector: Sturm bisection brackets it, inverse
// iteration supplies the vector, and the Rayleigh quotient gives the final
// value. Residual is ||T v - lambda v||_inf for the unit-norm v.
inline EigenPair smallest_eigenvalue(const Tridiagonal& T, double rel_tol = 1e-12,
                                     unsigned seed = 12345) {
    const std::size_t n = T.size();
    if (n == 0) throw EigSolveFailure("smallest_eigenvalue: empty matrix");
    const double scale = std::max(1.0, T.inf_norm());
    if (n == 1) {
        EigenPair e;
        e.lambda = T.diag[0];
        e.vector = {1.0};
        return e;
    }

    double lo = T.diag[0], hi = T.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(T.off[i - 1]);
        if (i + 1 < n) r += std::abs(T.off[i]);
        lo = std::min(lo, T.diag[i] - r);
        hi = std::max(hi, T.diag[i] + r);
    }

    for (int it = 0; it < 200 && (hi - lo) > rel_tol * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::eigenvalues_below(T, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }

    EigenPair e;
    e.lambda = 0.5 * (lo + hi);

    // Inverse iteration with the bisection estimate as shift. The shifted
    // matrix is nearly singular by construction, so factor with a relaxed
    // floor and retry with a slightly moved shift if that still fails.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& vi : v) vi = unit(rng);

    double shift = e.lambda;
    for (int attempt = 0; attempt < 5; ++attempt) {
        Tridiagonal S = T;
        for (auto& d : S.diag) d -= shift;
        std::vector<double> dfac, lfac;
        bool have_factor = false;
        {
            // Signs do not matter for inverse iteration, only invertibility,
            // so factor the shifted matrix by plain elimination.
            const std::size_t m = S.size();
            dfac.assign(m, 0.0);
            lfac.assign(m - 1, 0.0);
            have_factor = true;
            const double floor_abs = 1e-300;
            for (std::size_t i = 0; i < m; ++i) {
                double di = S.diag[i];
                if (i > 0) di -= lfac[i - 1] * lfac[i - 1] * dfac[i - 1];
                if (std::abs(di) < floor_abs) di = (di < 0 ? -1.0 : 1.0) * 1e-12 * scale;
                dfac[i] = di;
                if (i + 1 < m) lfac[i] = S.off[i] / di;
            }
        }
        if (!have_factor) {
            shift += 1e-10 * scale;
            continue;
        }
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            ldlt_solve(dfac, lfac, v);
            double nrm = 0.0;
            for (double vi : v) nrm += vi * vi;
            nrm = std::sqrt(nrm);
            if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
            for (auto& vi : v) vi /= nrm;
            const auto Tv = T.apply(v);
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) num += v[i] * Tv[i];
            double res = 0.0;
            for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(Tv[i] - num * v[i]));
            e.lambda = num;
            e.residual = res;
            e.iterations = it + 1;
            if (res <= 1e-10 * scale) {
                converged = true;
                break;
            }
        }
        if (converged) {
            e.vector = v;
            return e;
        }
        shift = e.lambda + (attempt + 1) * 1e-10 * scale;
    }
    throw EigSolveFailure("smallest_eigenvalue: inverse iteration did not reach residual tolerance");
}

} // namespace nehari
