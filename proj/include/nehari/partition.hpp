#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/parallel.hpp"
#include "nehari/signed_minimizer.hpp"

namespace nehari {

// A point set A =: t_0 <= t_1 <= ... <= t_k <= t_{k+1} := B with all gaps at
// least L. Piece i lives on (t_i, t_{i+1}) and carries sign sigma(i), which
// alternates starting from start_sign.
struct Partition {
    double A = 0.0;
    double B = 0.0;
    std::vector<double> points;
    double L = 0.0;
    Sign start_sign = Sign::plus;
};

inline Sign partition_sign(const Partition& P, std::size_t piece) {
    const bool even = (piece % 2 == 0);
    if (P.start_sign == Sign::plus) return even ? Sign::plus : Sign::minus;
    return even ? Sign::minus : Sign::plus;
}

inline std::vector<double> partition_lengths(const Partition& P) {
    std::vector<double> len;
    double prev = P.A;
    for (double t : P.points) {
        len.push_back(t - prev);
        prev = t;
    }
    len.push_back(P.B - prev);
    return len;
}

inline void validate_partition(const Partition& P) {
    if (!(P.B > P.A)) throw ConfigError("partition: B must exceed A");
    if (!(P.L > 0.0)) throw ConfigError("partition: spacing floor L must be positive");
    const auto len = partition_lengths(P);
    for (std::size_t i = 0; i < len.size(); ++i)
        if (len[i] < P.L - 1e-12 * (P.B - P.A)) {
            std::ostringstream os;
            os << "partition: gap " << i << " has length " << len[i] << " < L = " << P.L;
            throw ConfigError(os.str());
        }
}

struct RatioStats {
    double lambda_min_len = 0.0;
    double lambda_max_len = 0.0;
    double max_adjacent_ratio = 1.0;
};

inline RatioStats partition_ratio_stats(const Partition& P) {
    const auto len = partition_lengths(P);
    RatioStats rs;
    rs.lambda_min_len = *std::min_element(len.begin(), len.end());
    rs.lambda_max_len = *std::max_element(len.begin(), len.end());
    for (std::size_t i = 0; i + 1 < len.size(); ++i) {
        const double r = std::max(len[i + 1] / len[i], len[i] / len[i + 1]);
        rs.max_adjacent_ratio = std::max(rs.max_adjacent_ratio, r);
    }
    return rs;
}

struct PartitionResult {
    Partition partition;
    double psi = 0.0;
    double grad_norm = 0.0;
    std::vector<SignedMinimizerResult> minimizers;
    std::vector<double> corner_mismatches;
    bool interior = true;
    RatioStats ratio_stats;
    int outer_iterations = 0;
    bool below_H = false;
    int probe_count = 0;
    int probe_violations = 0;
    std::size_t stationary_multiplicity = 1;
};

struct PartitionOptions {
    SolverOptions inner;
    double L = 0.0;     // certified spacing floor; required
    double H = 0.0;     // heuristic window threshold, 0 = unknown
    double tol = 1e-6;  // grad_norm <= tol * (1 + |psi|)
    double mismatch_tol = 1e-4; // scaled by (1 + max slope^2)
    double slope_gap_tol = 2e-5; // periodic-closure stop, used by the subharmonic driver
    int max_outer_iter = 300;
    int random_probes = 0;
    std::uint64_t seed = 424242;
    unsigned workers = 0; // 0 = hardware concurrency
    std::ostream* trace = nullptr;
};

namespace detail {

inline GridFunction rescale_piece(const GridFunction& prev, double a2, double b2,
                                  double h_target) {
    GridFunction out = make_grid(a2, b2, h_target);
    const GridFunction unit = scale_to_unit(prev);
    const double len2 = (b2 - a2) * (b2 - a2);
    const double inv = 1.0 / (b2 - a2);
    for (std::size_t i = 0; i < out.n(); ++i)
        out.values[i] = unit.eval((out.node(i) - a2) * inv) * len2;
    return out;
}

// Evaluates all pieces of a partition-like point chain t_0 < ... < t_{m},
// alternating signs from start_sign, optionally warm-started from previous
// piece minimizers (rescaled onto the new intervals).
inline std::vector<SignedMinimizerResult> solve_pieces(
    const std::vector<double>& chain, Sign start_sign, const ReactionTerm& g,
    const ForcingTerm& p, const SolverOptions& inner, unsigned workers,
    const std::vector<SignedMinimizerResult>* warm) {
    const std::size_t pieces = chain.size() - 1;
    std::vector<SignedMinimizerResult> out(pieces);
    const ReactionTerm g_minus = mirror(g);
    const ForcingTerm p_minus = mirrored(p);
    parallel_for(pieces, workers, [&](std::size_t i) {
        const double a = chain[i];
        const double b = chain[i + 1];
        const Sign s = (i % 2 == 0) == (start_sign == Sign::plus) ? Sign::plus : Sign::minus;
        const ReactionTerm& gc = (s == Sign::plus) ? g : g_minus;
        const ForcingTerm& pc = (s == Sign::plus) ? p : p_minus;
        GridFunction init;
        if (warm && i < warm->size() && (*warm)[i].u.n() >= 3) {
            init = rescale_piece((*warm)[i].u, a, b, inner.h_target);
            if (s == Sign::minus)
                for (auto& v : init.values) v = -v;
        } else {
            init = cone_parabola(a, b, cone_margin(gc, pc), inner.h_target, 1.0);
        }
        try {
            auto cs = minimize_cone_from(init, gc, pc, inner);
            out[i] = finish_signed(std::move(cs), s, g, p, inner);
        } catch (const NonConvergence& e) {
            std::ostringstream os;
            os << "piece " << i << " on [" << a << "," << b << "]: " << e.what();
            throw NonConvergence(os.str());
        } catch (const NoInteriorSolution& e) {
            std::ostringstream os;
            os << "piece " << i << " on [" << a << "," << b << "]: " << e.what();
            throw NoInteriorSolution(os.str());
        }
    });
    return out;
}

inline std::vector<double> chain_of(const Partition& P) {
    std::vector<double> chain;
    chain.reserve(P.points.size() + 2);
    chain.push_back(P.A);
    for (double t : P.points) chain.push_back(t);
    chain.push_back(P.B);
    return chain;
}

inline double sum_phi(const std::vector<SignedMinimizerResult>& pieces) {
    std::vector<double> phis(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) phis[i] = pieces[i].phi;
    return pairwise_sum(std::move(phis));
}

// Projection onto {y_1 <= y_2 <= ... <= y_m} intersected with a common box,
// via pool-adjacent-violators followed by clamping (exact for this set).
inline void isotonic_box_project(std::vector<double>& y, double lo, double hi) {
    const std::size_t m = y.size();
    std::vector<double> value;
    std::vector<double> weight;
    value.reserve(m);
    weight.reserve(m);
    for (double yi : y) {
        value.push_back(yi);
        weight.push_back(1.0);
        while (value.size() > 1 && value[value.size() - 2] > value.back()) {
            const double w = weight[weight.size() - 2] + weight.back();
            const double v = (value[value.size() - 2] * weight[weight.size() - 2] +
                              value.back() * weight.back()) /
                             w;
            value.pop_back();
            weight.pop_back();
            value.back() = v;
            weight.back() = w;
        }
    }
    std::size_t idx = 0;
    for (std::size_t blk = 0; blk < value.size(); ++blk) {
        const auto cnt = static_cast<std::size_t>(weight[blk] + 0.5);
        const double v = std::clamp(value[blk], lo, hi);
        for (std::size_t c = 0; c < cnt; ++c) y[idx++] = v;
    }
}

// Projects candidate interior points onto the feasible slab
// {A + L <= t_1, t_{i+1} - t_i >= L, t_k <= B - L}.
inline void project_points(std::vector<double>& t, double A, double B, double L) {
    const std::size_t k = t.size();
    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = t[i] - static_cast<double>(i + 1) * L;
    isotonic_box_project(y, A, B - static_cast<double>(k + 1) * L);
    for (std::size_t i = 0; i < k; ++i) t[i] = y[i] + static_cast<double>(i + 1) * L;
}

} // namespace detail

inline std::pair<double, std::vector<SignedMinimizerResult>> psi_value(
    const Partition& P, const ReactionTerm& g, const ForcingTerm& p,
    const SolverOptions& opts = {}, unsigned workers = 0) {
    validate_partition(P);
    auto pieces = detail::solve_pieces(detail::chain_of(P), P.start_sign, g, p, opts, workers,
                                       nullptr);
    return {detail::sum_phi(pieces), std::move(pieces)};
}

// Component i (for the interior point t_i) of the gradient of psi:
//   -1/2 du_{i-1}^2(t_i^-) + 1/2 du_i^2(t_i^+),
// which vanishes exactly when the corner speeds match.
inline std::vector<double> psi_gradient(const Partition& P,
                                        const std::vector<SignedMinimizerResult>& minimizers) {
    const std::size_t k = P.points.size();
    if (minimizers.size() != k + 1)
        throw ConfigError("psi_gradient: need exactly k+1 piece minimizers");
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double sb = minimizers[i].slope_b;
        const double sa = minimizers[i + 1].slope_a;
        grad[i] = -0.5 * sb * sb + 0.5 * sa * sa;
    }
    return grad;
}

namespace detail {

inline std::vector<double> weighted_initial_points(double A, double B, std::size_t k,
                                                   Sign start_sign, const ReactionTerm& g,
                                                   const ForcingTerm& p, double L) {
    // Piece lengths proportional to 1/margin of that piece's side, the
    // stationary geometry suggested by equalizing corner speeds.
    const double k_plus = std::max(g.g_plus - p.average, 1e-3);
    const double k_minus = std::max(p.average - g.g_minus, 1e-3);
    std::vector<double> w(k + 1);
    double total = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const bool plus_piece = (i % 2 == 0) == (start_sign == Sign::plus);
        w[i] = 1.0 / (plus_piece ? k_plus : k_minus);
        total += w[i];
    }
    std::vector<double> t(k);
    double acc = A;
    for (std::size_t i = 0; i < k; ++i) {
        acc += (B - A) * w[i] / total;
        t[i] = acc;
    }
    project_points(t, A, B, L);
    return t;
}

struct AscentState {
    std::vector<double> t;
    double psi = 0.0;
    std::vector<SignedMinimizerResult> pieces;
    std::vector<double> grad;
    double gnorm = 0.0;
};

} // namespace detail

inline PartitionResult maximize_partition(double A, double B, std::size_t k, Sign start_sign,
                                          const ReactionTerm& g, const ForcingTerm& p,
                                          const PartitionOptions& opts) {
    if (!(opts.L > 0.0)) throw ConfigError("maximize_partition: spacing floor L not set");
    if (B - A < static_cast<double>(k + 1) * opts.L) {
        std::ostringstream os;
        os << "maximize_partition: B - A = " << (B - A) << " < (k+1) L = "
           << static_cast<double>(k + 1) * opts.L
           << "; the window cannot hold k = " << k << " sign changes";
        throw BoundaryStuck(os.str());
    }
    const bool below_H = opts.H > 0.0 && (B - A) < static_cast<double>(k + 1) * opts.H;

    SolverOptions inner = opts.inner;
    inner.min_length = std::min(inner.min_length, opts.L);
    inner.certified_length = opts.L;

    auto evaluate = [&](const std::vector<double>& t,
                        const std::vector<SignedMinimizerResult>* warm) {
        detail::AscentState st;
        st.t = t;
        std::vector<double> chain;
        chain.push_back(A);
        chain.insert(chain.end(), t.begin(), t.end());
        chain.push_back(B);
        st.pieces = detail::solve_pieces(chain, start_sign, g, p, inner, opts.workers, warm);
        st.psi = detail::sum_phi(st.pieces);
        Partition P{A, B, st.t, opts.L, start_sign};
        st.grad = psi_gradient(P, st.pieces);
        st.gnorm = 0.0;
        for (double gi : st.grad) st.gnorm = std::max(st.gnorm, std::abs(gi));
        return st;
    };

    detail::AscentState cur =
        evaluate(detail::weighted_initial_points(A, B, k, start_sign, g, p, opts.L), nullptr);

    const double span = B - A;
    const double gap_tol = 1e-9 * span;
    auto min_gap = [&](const std::vector<double>& t) {
        double m = span;
        double prev = A;
        for (double ti : t) {
            m = std::min(m, ti - prev);
            prev = ti;
        }
        return std::min(m, B - prev);
    };

    double alpha_prev = 1e-2;
    std::vector<double> t_old, g_old;
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_outer_iter; ++iter) {
        if (opts.trace) {
            (*opts.trace) << iter << "," << cur.psi << "," << cur.gnorm;
            for (double ti : cur.t) (*opts.trace) << "," << ti;
            (*opts.trace) << "\n";
        }
        if (k == 0 || cur.gnorm <= opts.tol * (1.0 + std::abs(cur.psi))) {
            converged = true;
            break;
        }

        double alpha = alpha_prev;
        if (!t_old.empty()) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double dt = cur.t[i] - t_old[i];
                const double dg = cur.grad[i] - g_old[i];
                num += dt * dt;
                den += dt * (-dg);
            }
            if (den > 0.0 && num > 0.0) alpha = num / den;
        }
        const double max_move = 0.2 * span / static_cast<double>(k + 1);
        alpha = std::clamp(alpha, 1e-8, max_move / cur.gnorm);

        bool accepted = false;
        for (int bt = 0; bt < 25; ++bt) {
            std::vector<double> t_new = cur.t;
            for (std::size_t i = 0; i < k; ++i) t_new[i] += alpha * cur.grad[i];
            detail::project_points(t_new, A, B, opts.L);
            double move = 0.0;
            double predicted = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                move = std::max(move, std::abs(t_new[i] - cur.t[i]));
                predicted += cur.grad[i] * (t_new[i] - cur.t[i]);
            }
            if (move <= 1e-14 * span) {
                // The gradient points straight into the spacing constraints.
                std::ostringstream os;
                os << "maximize_partition: iterate pinned on the spacing boundary (min gap "
                   << min_gap(cur.t) << ", L = " << opts.L << ", grad norm " << cur.gnorm
                   << "); enlarge B - A relative to H(k+1)";
                throw BoundaryStuck(os.str());
            }
            bool trial_ok = true;
            detail::AscentState nxt;
            try {
                nxt = evaluate(t_new, &cur.pieces);
            } catch (const NonConvergence&) {
                trial_ok = false; // reject the trial point, shrink the step
            }
            // The noise floor absorbs the small jumps in each piece value that
            // happen when a trial move changes the node count of a piece grid.
            if (trial_ok &&
                nxt.psi >= cur.psi + 1e-4 * predicted - 1e-9 * (1.0 + std::abs(cur.psi))) {
                t_old = cur.t;
                g_old = cur.grad;
                cur = std::move(nxt);
                alpha_prev = alpha;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (cur.gnorm <= 10.0 * opts.tol * (1.0 + std::abs(cur.psi))) {
                converged = true;
                break;
            }
            std::ostringstream os;
            os << "maximize_partition: line search stalled with grad norm " << cur.gnorm
               << " (tol " << opts.tol * (1.0 + std::abs(cur.psi)) << ")";
            throw NonConvergence(os.str());
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "maximize_partition: grad norm " << cur.gnorm << " after " << opts.max_outer_iter
           << " outer iterations";
        throw NonConvergence(os.str());
    }

    PartitionResult res;
    res.partition = Partition{A, B, cur.t, opts.L, start_sign};
    res.psi = cur.psi;
    res.grad_norm = cur.gnorm;
    res.minimizers = std::move(cur.pieces);
    res.corner_mismatches.resize(k);
    for (std::size_t i = 0; i < k; ++i) res.corner_mismatches[i] = std::abs(cur.grad[i]);
    res.interior = min_gap(cur.t) > opts.L + gap_tol;
    res.ratio_stats = partition_ratio_stats(res.partition);
    res.outer_iterations = iter;
    res.below_H = below_H;

    if (k > 0 && !res.interior) {
        std::ostringstream os;
        os << "maximize_partition: stationary point sits on the spacing boundary (min gap "
           << min_gap(cur.t) << " vs L = " << opts.L << "); B - A is too small against H(k+1)";
        throw BoundaryStuck(os.str());
    }

    if (opts.random_probes > 0 && k > 0) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double slack = span - static_cast<double>(k + 1) * opts.L;
        for (int probe = 0; probe < opts.random_probes; ++probe) {
            std::vector<double> w(k + 1);
            double tot = 0.0;
            for (auto& wi : w) {
                wi = unit(rng);
                tot += wi;
            }
            Partition Q{A, B, {}, opts.L, start_sign};
            double acc = A;
            for (std::size_t i = 0; i < k; ++i) {
                acc += opts.L + slack * w[i] / tot;
                Q.points.push_back(acc);
            }
            try {
                auto [psi_q, pieces_q] = psi_value(Q, g, p, inner, opts.workers);
                (void)pieces_q;
                ++res.probe_count;
                const double tie = 1e-8 * (1.0 + std::abs(res.psi));
                if (psi_q > res.psi + tie) ++res.probe_violations;
                else if (psi_q > res.psi - tie) {
                    double dist = 0.0;
                    for (std::size_t i = 0; i < k; ++i)
                        dist = std::max(dist, std::abs(Q.points[i] - res.partition.points[i]));
                    if (dist > 1e-3 * span) ++res.stationary_multiplicity;
                }
            } catch (const Error&) {
                // a failed probe is dropped, not counted
            }
        }
    }
    return res;
}

struct RatioDiagnostics {
    std::vector<RatioStats> per_run;
    double h_bar = 1.0;   // worst adjacent-length ratio seen
    double h_star = 1.0;  // worst overall lambda_max/lambda_min seen
    double adjacent_variation = 0.0;
    bool pigeonhole_ok = true; // lambda_min <= (B-A)/(k+1) <= lambda_max per run
};

inline RatioDiagnostics ratio_diagnostics(const std::vector<PartitionResult>& batch) {
    RatioDiagnostics d;
    double adj_min = std::numeric_limits<double>::infinity();
    double adj_max = 0.0;
    for (const auto& r : batch) {
        d.per_run.push_back(r.ratio_stats);
        d.h_bar = std::max(d.h_bar, r.ratio_stats.max_adjacent_ratio);
        if (r.ratio_stats.lambda_min_len > 0.0)
            d.h_star =
                std::max(d.h_star, r.ratio_stats.lambda_max_len / r.ratio_stats.lambda_min_len);
        adj_min = std::min(adj_min, r.ratio_stats.max_adjacent_ratio);
        adj_max = std::max(adj_max, r.ratio_stats.max_adjacent_ratio);
        const double avg = (r.partition.B - r.partition.A) /
                           static_cast<double>(r.partition.points.size() + 1);
        if (!(r.ratio_stats.lambda_min_len <= avg + 1e-9 &&
              avg <= r.ratio_stats.lambda_max_len + 1e-9))
            d.pigeonhole_ok = false;
    }
    if (!batch.empty() && adj_min > 0.0) d.adjacent_variation = (adj_max - adj_min) / adj_min;
    return d;
}

inline RatioStats ratio_diagnostics(const PartitionResult& r) { return r.ratio_stats; }

// Window threshold backing the "B - A >= H (k+1)" heuristic.
inline double estimate_window_threshold(const RatioDiagnostics& d, double L) {
    return d.h_star * (L + 1.0);
}

} // namespace nehari
