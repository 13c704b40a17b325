#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "nehari/assembly.hpp"
#include "nehari/errors.hpp"
#include "nehari/partition.hpp"

namespace nehari {

// Shift test for the minimal period: an n T - periodic solution could secretly
// be m T - periodic for a proper divisor m of n, so each divisor shift is
// compared against the solution over one full period. A pass means every
// divisor shift moves the solution by more than the threshold (relative to
// its sup norm).
struct PeriodCertificate {
    bool coprime = false; // gcd(multiplier, pieces per period) == 1
    std::vector<int> divisors;
    std::vector<double> mismatches;
    double min_mismatch = std::numeric_limits<double>::infinity();
    double threshold = 1e-2;
    bool minimal = true;
};

struct SubharmonicOptions {
    PartitionOptions partition;     // inner solver, spacing floor L, tolerances
    int max_outer_iter = 600;       // closing the seam needs more polish than the
                                    // free-boundary driver
    double period_match_tol = 1e-9; // |forcing period - T| relative gate
    double min_period_threshold = 1e-2;
    int certificate_samples = 2048;
};

struct SubharmonicSolution {
    double base_period = 0.0; // T
    int multiplier = 1;       // the solution is (multiplier * T)-periodic
    int zeros_per_period = 0; // sign changes strictly inside one period window
    double t0 = 0.0;          // anchor zero, reduced to [0, T)
    bool t0_neutral = false;  // constant forcing: the anchor is arbitrary
    bool below_H = false;
    double seam_value_gap = 0.0;
    double seam_slope_gap = 0.0;
    double psi = 0.0;
    int outer_iterations = 0;
    GluedSolution glued; // one period [t0, t0 + multiplier * T]
    PeriodCertificate certificate;
};

// Periodic analogue of the partition maximization: the zeros are
// t0 < t0 + s_1 < ... < t0 + s_k < t0 + n T, the chain of k+1 alternating
// pieces starts positive and closes onto itself, and the anchor t0 is a free
// variable whose payoff derivative is the full shift derivative
//   sum_i grad_i + 1/2 du^2(t0+) - 1/2 du^2((t0 + n T)-).
// At a maximum the interior corner speeds match and the two seam slopes
// agree, which is exactly the C^1 periodic closure. k must be odd so that the
// final piece is negative and the seam crossing keeps the sign alternation.
inline SubharmonicSolution solve_subharmonic(double T, int n, int k, const ReactionTerm& g,
                                             const ForcingTerm& p,
                                             const SubharmonicOptions& opts) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw ConfigError("solve_subharmonic: base period must be positive");
    if (n < 1) throw ConfigError("solve_subharmonic: period multiplier must be at least 1");
    if (k < 1 || k % 2 == 0)
        throw ConfigError("solve_subharmonic: the zero count per period must be odd, "
                          "otherwise the sign alternation cannot close periodically");
    if (!p.period)
        throw NotPeriodic("solve_subharmonic: the forcing term has no period");
    if (std::abs(*p.period - T) > opts.period_match_tol * std::max(1.0, T)) {
        std::ostringstream os;
        os << "solve_subharmonic: forcing period " << *p.period << " does not match T = " << T;
        throw NotPeriodic(os.str());
    }
    const double L = opts.partition.L;
    if (!(L > 0.0)) throw ConfigError("solve_subharmonic: spacing floor L not set");
    const double span = static_cast<double>(n) * T;
    if (span < static_cast<double>(k + 1) * L) {
        std::ostringstream os;
        os << "solve_subharmonic: n T = " << span << " < (k+1) L = "
           << static_cast<double>(k + 1) * L << "; the period cannot hold k = " << k
           << " sign changes";
        throw BoundaryStuck(os.str());
    }
    const bool below_H =
        opts.partition.H > 0.0 && span < static_cast<double>(k + 1) * opts.partition.H;
    const bool autonomous = p.cos_terms.empty() && p.sin_terms.empty();

    SolverOptions inner = opts.partition.inner;
    inner.min_length = std::min(inner.min_length, L);
    inner.certified_length = L;
    const std::size_t ku = static_cast<std::size_t>(k);

    struct State {
        double t0 = 0.0;
        std::vector<double> s;
        double psi = 0.0;
        std::vector<SignedMinimizerResult> pieces;
        std::vector<double> grad_s;
        double grad_t0 = 0.0;
        double gnorm = 0.0;
        double seam_gap = 0.0;
    };

    auto evaluate = [&](double t0, const std::vector<double>& s,
                        const std::vector<SignedMinimizerResult>* warm) {
        State st;
        st.t0 = t0;
        st.s = s;
        std::vector<double> chain;
        chain.reserve(ku + 2);
        chain.push_back(t0);
        for (double si : s) chain.push_back(t0 + si);
        chain.push_back(t0 + span);
        st.pieces =
            detail::solve_pieces(chain, Sign::plus, g, p, inner, opts.partition.workers, warm);
        st.psi = detail::sum_phi(st.pieces);
        st.grad_s.resize(ku);
        double total = 0.0;
        for (std::size_t i = 0; i < ku; ++i) {
            const double sb = st.pieces[i].slope_b;
            const double sa = st.pieces[i + 1].slope_a;
            st.grad_s[i] = -0.5 * sb * sb + 0.5 * sa * sa;
            total += st.grad_s[i];
        }
        const double first = st.pieces.front().slope_a;
        const double last = st.pieces.back().slope_b;
        st.grad_t0 = autonomous ? 0.0 : total + 0.5 * first * first - 0.5 * last * last;
        st.seam_gap = std::abs(first - last);
        st.gnorm = std::abs(st.grad_t0);
        for (double gi : st.grad_s) st.gnorm = std::max(st.gnorm, std::abs(gi));
        return st;
    };

    State cur =
        evaluate(0.0, detail::weighted_initial_points(0.0, span, ku, Sign::plus, g, p, L),
                 nullptr);

    const double slope_tol = opts.partition.slope_gap_tol;
    auto closed = [&](const State& st) {
        return st.gnorm <= opts.partition.tol * (1.0 + std::abs(st.psi)) &&
               st.seam_gap <= slope_tol;
    };

    double alpha_prev = 1e-2;
    State old;
    bool have_old = false;
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_outer_iter; ++iter) {
        if (opts.partition.trace) {
            (*opts.partition.trace) << iter << "," << cur.psi << "," << cur.gnorm << ","
                                    << cur.seam_gap << "," << cur.t0;
            for (double si : cur.s) (*opts.partition.trace) << "," << (cur.t0 + si);
            (*opts.partition.trace) << "\n";
        }
        if (closed(cur)) {
            converged = true;
            break;
        }

        double alpha = alpha_prev;
        if (have_old) {
            double num = 0.0, den = 0.0;
            if (!autonomous) {
                const double dt = cur.t0 - old.t0;
                num += dt * dt;
                den += dt * (old.grad_t0 - cur.grad_t0);
            }
            for (std::size_t i = 0; i < ku; ++i) {
                const double dt = cur.s[i] - old.s[i];
                num += dt * dt;
                den += dt * (old.grad_s[i] - cur.grad_s[i]);
            }
            if (den > 0.0 && num > 0.0) alpha = num / den;
        }
        const double max_move = 0.2 * span / static_cast<double>(k + 1);
        const double gscale = std::max(cur.gnorm, 1e-300);
        alpha = std::clamp(alpha, 1e-8, max_move / gscale);

        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            const double t0_new = autonomous ? cur.t0 : cur.t0 + alpha * cur.grad_t0;
            std::vector<double> s_new = cur.s;
            for (std::size_t i = 0; i < ku; ++i) s_new[i] += alpha * cur.grad_s[i];
            detail::project_points(s_new, 0.0, span, L);
            double move = std::abs(t0_new - cur.t0);
            double predicted = (t0_new - cur.t0) * cur.grad_t0;
            for (std::size_t i = 0; i < ku; ++i) {
                move = std::max(move, std::abs(s_new[i] - cur.s[i]));
                predicted += cur.grad_s[i] * (s_new[i] - cur.s[i]);
            }
            if (move <= 1e-14 * span) {
                std::ostringstream os;
                os << "solve_subharmonic: iterate pinned on the spacing boundary (seam gap "
                   << cur.seam_gap << ", grad norm " << cur.gnorm
                   << "); n T is too small against H(k+1)";
                throw BoundaryStuck(os.str());
            }
            bool trial_ok = true;
            State nxt;
            try {
                nxt = evaluate(t0_new, s_new, &cur.pieces);
            } catch (const NonConvergence&) {
                trial_ok = false;
            }
            if (trial_ok &&
                nxt.psi >= cur.psi + 1e-4 * predicted - 1e-9 * (1.0 + std::abs(cur.psi))) {
                old = std::move(cur);
                cur = std::move(nxt);
                have_old = true;
                alpha_prev = alpha;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (cur.gnorm <= 10.0 * opts.partition.tol * (1.0 + std::abs(cur.psi)) &&
                cur.seam_gap <= 5.0 * slope_tol) {
                converged = true;
                break;
            }
            std::ostringstream os;
            os << "solve_subharmonic: line search stalled with grad norm " << cur.gnorm
               << " and seam slope gap " << cur.seam_gap << " (target " << slope_tol << ")";
            throw NonConvergence(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_subharmonic: grad norm " << cur.gnorm << ", seam slope gap "
           << cur.seam_gap << " after " << opts.max_outer_iter << " outer iterations";
        throw NonConvergence(os.str());
    }

    // Reduce the anchor to [0, T). The payoff is T-periodic in t0, so the
    // whole chain shifts rigidly; the piece grids shift with it unchanged.
    const double shift = -std::floor(cur.t0 / T) * T;
    if (shift != 0.0) {
        cur.t0 += shift;
        for (auto& r : cur.pieces) {
            r.u.a += shift;
            r.u.b += shift;
        }
    }

    PartitionResult pr;
    pr.partition.A = cur.t0;
    pr.partition.B = cur.t0 + span;
    for (double si : cur.s) pr.partition.points.push_back(cur.t0 + si);
    pr.partition.L = L;
    pr.partition.start_sign = Sign::plus;
    pr.psi = cur.psi;
    pr.grad_norm = cur.gnorm;
    pr.minimizers = cur.pieces;
    for (double gi : cur.grad_s) pr.corner_mismatches.push_back(std::abs(gi));
    pr.ratio_stats = partition_ratio_stats(pr.partition);
    pr.outer_iterations = iter;
    pr.below_H = below_H;
    {
        double min_gap = span;
        double prev = 0.0;
        for (double si : cur.s) {
            min_gap = std::min(min_gap, si - prev);
            prev = si;
        }
        min_gap = std::min(min_gap, span - prev);
        pr.interior = min_gap > L + 1e-9 * span;
    }
    if (!pr.interior) {
        std::ostringstream os;
        os << "solve_subharmonic: stationary configuration sits on the spacing boundary "
              "(min gap "
           << pr.ratio_stats.lambda_min_len << " vs L = " << L
           << "); n T is too small against H(k+1)";
        throw BoundaryStuck(os.str());
    }

    SubharmonicSolution sol;
    sol.base_period = T;
    sol.multiplier = n;
    sol.zeros_per_period = k;
    sol.t0 = cur.t0;
    sol.t0_neutral = autonomous;
    sol.below_H = below_H;
    sol.seam_value_gap = 0.0; // both seam ends are structural zeros of the chain
    sol.seam_slope_gap = cur.seam_gap;
    sol.psi = cur.psi;
    sol.outer_iterations = iter;
    sol.glued = assemble(pr, g, p);

    PeriodCertificate cert;
    cert.threshold = opts.min_period_threshold;
    cert.coprime = std::gcd(n, k + 1) == 1;
    const double scale = 1.0 + sol.glued.sup_norm;
    const int samples = std::max(opts.certificate_samples, 16);
    for (int m = 1; m < n; ++m) {
        if (n % m != 0) continue;
        double worst = 0.0;
        for (int j = 0; j < samples; ++j) {
            const double tau =
                sol.t0 + span * (static_cast<double>(j) / static_cast<double>(samples));
            const double wrapped =
                sol.t0 + std::fmod(tau - sol.t0 + static_cast<double>(m) * T, span);
            worst = std::max(worst,
                             std::abs(sol.glued.eval(tau) - sol.glued.eval(wrapped)) / scale);
        }
        cert.divisors.push_back(m);
        cert.mismatches.push_back(worst);
        cert.min_mismatch = std::min(cert.min_mismatch, worst);
        if (worst <= cert.threshold) cert.minimal = false;
    }
    sol.certificate = cert;
    return sol;
}

} // namespace nehari
