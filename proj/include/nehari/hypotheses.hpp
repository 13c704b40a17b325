#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/reaction.hpp"

namespace nehari {

struct ClauseCheck {
    std::string name;
    bool passed = true;
    double worst_point = 0.0;
    double worst_value = 0.0; // margin or error at the worst sample
    std::string detail;
};

struct ValidationReport {
    std::vector<ClauseCheck> clauses;
    double sample_range = 0.0;
    std::size_t n_samples = 0;

    bool passed() const {
        for (const auto& c : clauses)
            if (!c.passed) return false;
        return true;
    }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& c : clauses)
            os << (c.passed ? "  ok   " : "  FAIL ") << c.name << "  worst at s = " << c.worst_point
               << " (" << c.detail << ")\n";
        return os.str();
    }
};

// Sample-based validation of the structural hypotheses on g: vanishing at 0,
// strict monotonicity, concave/convex split at the origin, saturation between
// finite limits, primitive consistency, and agreement of the supplied
// derivatives with finite differences. Sampling cannot certify the global
// statements; the report records exactly what was checked.
inline ValidationReport validate_h1(const ReactionTerm& r, double sample_range,
                                    std::size_t n_samples) {
    if (!(sample_range > 0.0)) throw ConfigError("validate_h1: sample_range must be positive");
    if (n_samples < 100) throw ConfigError("validate_h1: need at least 100 samples");

    ValidationReport rep;
    rep.sample_range = sample_range;
    rep.n_samples = n_samples;

    std::vector<double> s;
    s.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double x = -sample_range + 2.0 * sample_range * static_cast<double>(i) /
                                             static_cast<double>(n_samples - 1);
        s.push_back(x);
    }

    auto finite_or_throw = [](double v, const char* what, double at) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "validate_h1: " << what << " is not finite at s = " << at;
            throw NonFiniteValue(os.str());
        }
        return v;
    };

    ClauseCheck zero{"g(0) = 0"};
    {
        const double v = finite_or_throw(r.g(0.0), "g", 0.0);
        zero.passed = std::abs(v) <= 1e-12;
        zero.worst_value = v;
        zero.detail = "|g(0)| = " + std::to_string(std::abs(v));
    }
    rep.clauses.push_back(zero);

    ClauseCheck lim{"finite saturation limits"};
    lim.passed = std::isfinite(r.g_minus) && std::isfinite(r.g_plus) && r.g_minus < r.g_plus;
    lim.detail = "g- = " + std::to_string(r.g_minus) + ", g+ = " + std::to_string(r.g_plus);
    // declared limits must also be approached: check the extreme samples sit
    // within 10% of the gap from the corresponding limit
    if (lim.passed) {
        const double gap = r.g_plus - r.g_minus;
        const double at_hi = finite_or_throw(r.g(sample_range), "g", sample_range);
        const double at_lo = finite_or_throw(r.g(-sample_range), "g", -sample_range);
        if (r.g_plus - at_hi > 0.2 * gap || at_lo - r.g_minus > 0.2 * gap) {
            lim.passed = false;
            lim.detail += " not approached on the sampled range";
        }
    }
    rep.clauses.push_back(lim);

    ClauseCheck mono{"dg > 0 (strict monotonicity)"};
    ClauseCheck curv{"d2g < 0 on (0,inf), > 0 on (-inf,0)"};
    ClauseCheck bounded{"g_- < g(s) < g_+"};
    ClauseCheck primitive_ratio{"G(s)/s in (g_-, g_+)"};
    ClauseCheck dg_fd{"dg matches FD of g (rel 1e-5)"};
    ClauseCheck d2g_fd{"d2g matches FD of dg (rel 1e-5)"};
    ClauseCheck G_fd{"G' matches g (rel 1e-5)"};
    mono.worst_value = std::numeric_limits<double>::infinity();
    curv.worst_value = std::numeric_limits<double>::infinity();

    for (double x : s) {
        const double gv = finite_or_throw(r.g(x), "g", x);
        const double dgv = finite_or_throw(r.dg(x), "dg", x);
        const double d2gv = finite_or_throw(r.d2g(x), "d2g", x);
        const double Gv = finite_or_throw(r.G(x), "G", x);

        if (dgv <= 0.0 && (mono.passed || dgv < mono.worst_value)) {
            mono.passed = false;
            mono.worst_point = x;
            mono.worst_value = dgv;
        }
        if (x > 1e-9 && d2gv >= 0.0) {
            curv.passed = false;
            curv.worst_point = x;
            curv.worst_value = d2gv;
        }
        if (x < -1e-9 && d2gv <= 0.0) {
            curv.passed = false;
            curv.worst_point = x;
            curv.worst_value = d2gv;
        }
        // strict inequality up to rounding: tanh-type terms saturate to the
        // limit exactly in double precision on wide sample ranges
        const double slack = 1e-12 * std::max(1.0, std::abs(r.sup_norm));
        if (!(r.g_minus - slack < gv && gv < r.g_plus + slack)) {
            bounded.passed = false;
            bounded.worst_point = x;
            bounded.worst_value = gv;
        }
        if (std::abs(x) > 1e-6) {
            const double ratio = Gv / x;
            if (!(r.g_minus < ratio && ratio < r.g_plus)) {
                primitive_ratio.passed = false;
                primitive_ratio.worst_point = x;
                primitive_ratio.worst_value = ratio;
            }
        }

        const double hfd = 1e-4 * std::max(1.0, std::abs(x));
        const double fd1 = (r.g(x + hfd) - r.g(x - hfd)) / (2.0 * hfd);
        const double err1 = std::abs(dgv - fd1) / (1.0 + std::abs(fd1));
        if (err1 > 1e-5 && err1 > dg_fd.worst_value) {
            dg_fd.passed = false;
            dg_fd.worst_point = x;
            dg_fd.worst_value = err1;
        }
        const double fd2 = (r.dg(x + hfd) - r.dg(x - hfd)) / (2.0 * hfd);
        const double err2 = std::abs(d2gv - fd2) / (1.0 + std::abs(fd2));
        if (err2 > 1e-5 && err2 > d2g_fd.worst_value) {
            d2g_fd.passed = false;
            d2g_fd.worst_point = x;
            d2g_fd.worst_value = err2;
        }
        const double fdG = (r.G(x + hfd) - r.G(x - hfd)) / (2.0 * hfd);
        const double errG = std::abs(gv - fdG) / (1.0 + std::abs(gv));
        if (errG > 1e-5 && errG > G_fd.worst_value) {
            G_fd.passed = false;
            G_fd.worst_point = x;
            G_fd.worst_value = errG;
        }
    }

    mono.detail = mono.passed ? "all sampled dg positive" : "dg = " + std::to_string(mono.worst_value);
    curv.detail = curv.passed ? "inflection only at 0" : "d2g = " + std::to_string(curv.worst_value);
    bounded.detail = bounded.passed ? "strictly inside limits" : "g = " + std::to_string(bounded.worst_value);
    primitive_ratio.detail =
        primitive_ratio.passed ? "mean value inside limits" : "G/s = " + std::to_string(primitive_ratio.worst_value);
    dg_fd.detail = "max rel err " + std::to_string(dg_fd.passed ? 0.0 : dg_fd.worst_value);
    d2g_fd.detail = "max rel err " + std::to_string(d2g_fd.passed ? 0.0 : d2g_fd.worst_value);
    G_fd.detail = "max rel err " + std::to_string(G_fd.passed ? 0.0 : G_fd.worst_value);

    rep.clauses.push_back(mono);
    rep.clauses.push_back(curv);
    rep.clauses.push_back(bounded);
    rep.clauses.push_back(primitive_ratio);
    rep.clauses.push_back(dg_fd);
    rep.clauses.push_back(d2g_fd);
    rep.clauses.push_back(G_fd);
    return rep;
}

} // namespace nehari
