#pragma once

#include <cmath>
#include <functional>

namespace nehari {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Composite adaptive Simpson. The initial split count keeps oscillatory
// integrands (long averaging windows) from fooling the error estimate.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-8, int initial_splits = 16) {
    if (a == b) return 0.0;
    const double w = (b - a) / initial_splits;
    double total = 0.0;
    for (int i = 0; i < initial_splits; ++i) {
        const double x0 = a + i * w;
        const double x1 = x0 + w;
        const double xm = 0.5 * (x0 + x1);
        const double f0 = f(x0), fm = f(xm), f1 = f(x1);
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += detail::simpson_rec(f, x0, xm, x1, f0, fm, f1, whole, tol / initial_splits, 40);
    }
    return total;
}

} // namespace nehari
