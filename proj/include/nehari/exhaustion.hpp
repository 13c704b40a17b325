#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/assembly.hpp"
#include "nehari/errors.hpp"
#include "nehari/partition.hpp"

namespace nehari {

struct ExhaustionOptions {
    PartitionOptions partition;
    std::vector<int> n_values = {2, 3, 4};
    double window_half = 20.0; // central comparison window is [-window_half, window_half]
    double window_step = 0.05;
};

struct ExhaustionRun {
    int n = 0;
    double A = 0.0;
    double B = 0.0;
    bool ok = false;
    std::string error;
    GluedSolution solution;
    EnvelopeCheck envelope;
};

struct ExhaustionDiff {
    int n_from = 0;
    int n_to = 0;
    double shift = 0.0; // applied to the larger-domain solution before comparing
    double c0 = 0.0;
    double c1 = 0.0;
    double c1_total = 0.0; // c0 + c1
};

struct ExhaustionReport {
    double mu = 0.0;
    std::vector<ExhaustionRun> runs;
    std::vector<ExhaustionDiff> diffs;
    bool diffs_non_increasing = true;
    bool pigeonhole_ok = true;   // lambda_min <= mu <= lambda_max in every run
    double h_star = 1.0;         // max over runs of max(lambda_max/mu, mu/lambda_min)
    double upper_constant = 0.0; // C = ||g|| + ||p||
    double lower_constant = 0.0; // smaller of the two one-signed floor constants
    bool sandwich_ok = true;     // C1 mu/h* <= sup|u| <= C (h* mu)^2 in every run
    double next_separated_mu = 0.0; // sqrt(C/C1) h*^2 mu
};

namespace detail {

inline double window_sup_diff(const GluedSolution& base, const GluedSolution& other,
                              double shift, double half, double step, bool derivative) {
    const int count = static_cast<int>(std::floor(2.0 * half / step)) + 1;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double t = -half + step * static_cast<double>(i);
        const double va = derivative ? base.eval_derivative(t) : base.eval(t);
        const double vb =
            derivative ? other.eval_derivative(t + shift) : other.eval(t + shift);
        worst = std::max(worst, std::abs(va - vb));
    }
    return worst;
}

// Best rigid shift of `other` against `base` over the comparison window.
// Only a constant forcing leaves the equation translation invariant, so any
// oscillating forcing gets shift 0 and the comparison is raw.
inline double align_shift(const GluedSolution& base, const GluedSolution& other,
                          const ForcingTerm& p, double mu, double half, double step) {
    const bool translation_free = p.cos_terms.empty() && p.sin_terms.empty();
    if (!translation_free) return 0.0;
    double best = 0.0;
    double best_score = window_sup_diff(base, other, 0.0, half, step, false);
    double center = 0.0;
    double radius = mu;
    const int points = 81;
    for (int round = 0; round < 4; ++round) {
        for (int j = 0; j <= points; ++j) {
            const double sigma =
                center - radius + 2.0 * radius * static_cast<double>(j) / points;
            const double score = window_sup_diff(base, other, sigma, half, step, false);
            if (score < best_score) {
                best_score = score;
                best = sigma;
            }
        }
        center = best;
        radius = 2.0 * radius / points;
    }
    return best;
}

} // namespace detail

// Solves the sign-changing problem on the nested intervals (-mu n, mu n) with
// 2n - 1 interior zeros, so the mean piece length is exactly mu at every
// stage, and compares consecutive solutions on a fixed central window. A
// failed stage is recorded and the sweep continues; only an entirely failed
// sweep throws. The report carries the piece-length pigeonhole data and the
// sup-norm sandwich that separates solutions produced at well-spaced mu.
inline ExhaustionReport exhaustion_sweep(double mu, const ReactionTerm& g,
                                         const ForcingTerm& p,
                                         const ExhaustionOptions& opts) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ConfigError("exhaustion_sweep: mu must be positive");
    if (opts.partition.H > 0.0 && mu < opts.partition.H) {
        std::ostringstream os;
        os << "exhaustion_sweep: mu = " << mu << " is below the window threshold H = "
           << opts.partition.H << "; interior stationarity is not guaranteed";
        throw ConfigError(os.str());
    }
    if (opts.n_values.empty()) throw ConfigError("exhaustion_sweep: no stages requested");
    for (int n : opts.n_values)
        if (n < 1) throw ConfigError("exhaustion_sweep: stage indices must be positive");

    ExhaustionReport rep;
    rep.mu = mu;
    rep.upper_constant = g.sup_norm + p.sup_norm;
    rep.lower_constant =
        std::min(side_constant(Sign::plus, g, p), side_constant(Sign::minus, g, p));

    for (int n : opts.n_values) {
        ExhaustionRun run;
        run.n = n;
        run.A = -mu * static_cast<double>(n);
        run.B = mu * static_cast<double>(n);
        try {
            const std::size_t k = static_cast<std::size_t>(2 * n - 1);
            // Each stage adds one piece per side, i.e. half a sign cell, so a
            // fixed orientation would flip the sign pattern at the domain
            // center from one stage to the next. Alternating the orientation
            // with the stage parity keeps the central window comparable.
            const Sign start = (n % 2 == 0) ? Sign::plus : Sign::minus;
            auto pr = maximize_partition(run.A, run.B, k, start, g, p, opts.partition);
            run.solution = assemble(pr, g, p);
            run.envelope = envelope_check(run.solution, g, p);
            run.ok = true;
        } catch (const Error& e) {
            run.error = e.what();
        }
        rep.runs.push_back(std::move(run));
    }

    const ExhaustionRun* prev = nullptr;
    for (const auto& run : rep.runs) {
        if (!run.ok) continue;
        if (prev) {
            ExhaustionDiff d;
            d.n_from = prev->n;
            d.n_to = run.n;
            d.shift = detail::align_shift(prev->solution, run.solution, p, mu,
                                          opts.window_half, opts.window_step);
            d.c0 = detail::window_sup_diff(prev->solution, run.solution, d.shift,
                                           opts.window_half, opts.window_step, false);
            d.c1 = detail::window_sup_diff(prev->solution, run.solution, d.shift,
                                           opts.window_half, opts.window_step, true);
            d.c1_total = d.c0 + d.c1;
            rep.diffs.push_back(d);
        }
        prev = &run;
    }
    for (std::size_t i = 0; i + 1 < rep.diffs.size(); ++i)
        if (rep.diffs[i + 1].c1_total > rep.diffs[i].c1_total)
            rep.diffs_non_increasing = false;

    bool any_ok = false;
    for (const auto& run : rep.runs) {
        if (!run.ok) continue;
        any_ok = true;
        const auto& s = run.solution;
        if (!(s.lambda_min_len <= mu + 1e-9 && mu <= s.lambda_max_len + 1e-9))
            rep.pigeonhole_ok = false;
        rep.h_star = std::max({rep.h_star, s.lambda_max_len / mu, mu / s.lambda_min_len});
    }
    if (!any_ok) {
        std::ostringstream os;
        os << "exhaustion_sweep: every stage failed; first error: ";
        for (const auto& run : rep.runs)
            if (!run.error.empty()) {
                os << "n = " << run.n << ": " << run.error;
                break;
            }
        throw NonConvergence(os.str());
    }
    for (const auto& run : rep.runs) {
        if (!run.ok) continue;
        const double lower = rep.lower_constant * mu / rep.h_star;
        const double upper = rep.upper_constant * (rep.h_star * mu) * (rep.h_star * mu);
        const double sup = run.solution.sup_norm;
        if (!(lower <= sup * (1.0 + 1e-9) && sup <= upper * (1.0 + 1e-9)))
            rep.sandwich_ok = false;
    }
    rep.next_separated_mu =
        std::sqrt(rep.upper_constant / rep.lower_constant) * rep.h_star * rep.h_star * mu;
    return rep;
}

} // namespace nehari
