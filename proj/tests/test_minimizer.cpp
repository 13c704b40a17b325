#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <nehari/nehari.hpp>

using namespace nehari;

namespace {

SolverOptions coarse() {
    SolverOptions o;
    o.h_target = 0.05;
    return o;
}

// Reference energy ratios -phi / (b-a)^3 from a Chebyshev collocation solver
// run at machine accuracy on the same one-signed problems (see the derivation
// notes in the test docs). The discrete values at h = 0.05 match to ~1e-5.
struct OracleRow {
    const char* label;
    double constant;
    double cos_amp;
    Sign sign;
    double length;
    double ratio;
};

constexpr OracleRow kRatios[] = {
    {"p=0 + L=20", 0.0, 0.0, Sign::plus, 20.0, 0.09093758},
    {"p=0 + L=40", 0.0, 0.0, Sign::plus, 40.0, 0.09897351},
    {"p=0.3 + L=20", 0.3, 0.0, Sign::plus, 20.0, 0.05595334},
    {"p=0.3 - L=20", 0.3, 0.0, Sign::minus, 20.0, 0.13351767},
    {"p=0.3 + L=40", 0.3, 0.0, Sign::plus, 40.0, 0.06358643},
    {"trig + L=20", 0.3, 0.5, Sign::plus, 20.0, 0.05713449},
    {"trig - L=20", 0.3, 0.5, Sign::minus, 20.0, 0.13214332},
};

ForcingTerm forcing_of(const OracleRow& r) {
    if (r.cos_amp != 0.0) return make_trig_forcing(r.constant, {{r.cos_amp, 1.0}});
    return make_constant_forcing(r.constant);
}

} // namespace

TEST_CASE("one-signed energies against the collocation reference") {
    auto g = make_reaction("atan");
    for (const auto& row : kRatios) {
        auto m = minimize_signed(0.0, row.length, row.sign, g, forcing_of(row), coarse());
        INFO(row.label);
        const double ratio = -m.phi / (row.length * row.length * row.length);
        CHECK(ratio == Catch::Approx(row.ratio).epsilon(1e-4));
        CHECK(m.interior);
        CHECK(m.active_set_size == 0);
        CHECK(m.kkt_residual <= 1e-8);
        CHECK(m.lambda_min > 0.0);
        CHECK_FALSE(m.degenerate);
        // one-signedness of the output itself
        double sign_floor = 0.0;
        for (double v : m.u.values)
            sign_floor = std::min(sign_floor, sign_value(row.sign) * v);
        CHECK(sign_floor >= 0.0);
    }
}

TEST_CASE("boundary slopes and amplitude of the long symmetric arch") {
    auto g = make_reaction("atan");
    auto m = minimize_signed(0.0, 40.0, Sign::plus, g, make_constant_forcing(0.0), coarse());
    CHECK(m.u.sup_norm() == Catch::Approx(313.275).epsilon(1e-3));
    CHECK(m.slope_a == Catch::Approx(31.1559).epsilon(1e-3));
    CHECK(m.slope_b == Catch::Approx(-31.1559).epsilon(1e-3));
    // phi derivative formulas are rigid functions of the slopes
    auto [da, db] = phi_derivatives(m);
    CHECK(da == Catch::Approx(0.5 * m.slope_a * m.slope_a));
    CHECK(db == Catch::Approx(-0.5 * m.slope_b * m.slope_b));
}

TEST_CASE("sign - mirrors sign + under even data") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);
    auto plus = minimize_signed(0.0, 25.0, Sign::plus, g, p0, coarse());
    auto minus = minimize_signed(0.0, 25.0, Sign::minus, g, p0, coarse());
    REQUIRE(plus.u.n() == minus.u.n());
    double worst = 0.0;
    for (std::size_t i = 0; i < plus.u.n(); ++i)
        worst = std::max(worst, std::abs(plus.u.values[i] + minus.u.values[i]));
    CHECK(worst <= 1e-6 * plus.u.sup_norm());
    CHECK(plus.phi == Catch::Approx(minus.phi).epsilon(1e-9));
}

TEST_CASE("multi-start agreement") {
    auto g = make_reaction("atan");
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    auto rep = uniqueness_probe(0.0, 20.37, Sign::plus, g, p, 6, 1789, coarse());
    CHECK(rep.max_pair_distance <= 1e-6);
    CHECK(rep.results.size() == 6);
}

TEST_CASE("interval length guard") {
    auto g = make_reaction("atan");
    SolverOptions o = coarse();
    o.min_length = 5.0;
    CHECK_THROWS_AS(minimize_signed(0.0, 3.0, Sign::plus, g, make_constant_forcing(0.0), o),
                    ConfigError);
}

TEST_CASE("energy bracket constants") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);

    auto eb = make_energy_bracket(g, p0, 0.01);
    const double m = (M_PI / 2.0) * (M_PI / 2.0) / 24.0; // 0.10280838
    CHECK(eb.alpha_lower == Catch::Approx(m + 0.01));
    CHECK(eb.alpha_upper == Catch::Approx(m - 0.01));
    CHECK(eb.beta_lower == Catch::Approx(m + 0.01));
    CHECK(eb.beta_upper == Catch::Approx(m - 0.01));
    CHECK(eb.C1 == Catch::Approx(2.4674011 / (24.0 * (M_PI / 2.0 + 1.0))).epsilon(1e-6));
    CHECK(eb.ordering == "alpha_lower > beta_lower > alpha_upper > beta_upper");

    // epsilon must stay below the smaller margin^2/24
    CHECK_THROWS_AS(make_energy_bracket(g, p0, 0.2), CertificationFailed);
    // average outside the saturation range never brackets
    CHECK_THROWS_AS(make_energy_bracket(g, make_constant_forcing(2.0), 0.001),
                    HypothesisError);

    const double eps = default_bracket_epsilon(g, make_trig_forcing(0.3, {{0.5, 1.0}}));
    const double k = M_PI / 2.0 - 0.3;
    CHECK(eps == Catch::Approx(0.01 * k * k));
}

TEST_CASE("spacing floor certification") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);

    // at eps = 0.01 the ratio -phi/L^3 enters [alpha_upper, alpha_lower] only
    // from L = 30 on (L = 20 undershoots at 0.0909 < 0.0928)
    auto eb = certify_spacing_floor(g, p0, 0.01, {10.0, 15.0, 20.0, 30.0, 40.0}, coarse());
    CHECK(eb.L == 30.0);

    CHECK_THROWS_AS(certify_spacing_floor(g, p0, 0.01, {10.0, 15.0}, coarse()),
                    CertificationFailed);
    CHECK_THROWS_AS(certify_spacing_floor(g, p0, 0.01, {}, coarse()), ConfigError);
}
