#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <nehari/nehari.hpp>

using namespace nehari;

namespace {
constexpr double half_pi = 1.5707963267948966;
}

TEST_CASE("reaction registry") {
    auto a = make_reaction("atan");
    CHECK(a.g_plus == Catch::Approx(half_pi));
    CHECK(a.g_minus == Catch::Approx(-half_pi));
    CHECK(a.sup_norm == Catch::Approx(half_pi));
    CHECK(a.g(0.0) == 0.0);
    CHECK(a.g(1.0) == Catch::Approx(std::atan(1.0)));

    auto t = make_reaction("tanh");
    CHECK(t.g_plus == Catch::Approx(1.0));
    CHECK(t.g(2.0) == Catch::Approx(std::tanh(2.0)));

    auto s = make_reaction("scaled_atan", 2.0, 3.0);
    CHECK(s.g_plus == Catch::Approx(2.0 * half_pi));
    CHECK(s.g(0.5) == Catch::Approx(2.0 * std::atan(1.5)));

    CHECK_THROWS_AS(make_reaction("cubic"), ConfigError);
}

TEST_CASE("structural hypotheses hold for the registry reactions") {
    {
        auto rep = validate_h1(make_reaction("atan"), 100.0, 2001);
        INFO("atan\n" << rep.summary());
        CHECK(rep.passed());
    }
    // tanh' collapses to an exact double 0 once |s| passes ~19, so the strict
    // clauses are only checkable inside that radius (scaled by the rate)
    {
        auto rep = validate_h1(make_reaction("tanh"), 15.0, 2001);
        INFO("tanh\n" << rep.summary());
        CHECK(rep.passed());
    }
    auto rep = validate_h1(make_reaction("scaled_tanh", 0.5, 4.0), 4.0, 1001);
    INFO(rep.summary());
    CHECK(rep.passed());
}

TEST_CASE("hypothesis validation rejects a non-saturating reaction") {
    // linear g: right monotonicity, wrong shape and wrong limits
    ReactionTerm bad;
    bad.name = "linear";
    bad.g = [](double s) { return s; };
    bad.dg = [](double) { return 1.0; };
    bad.d2g = [](double) { return 0.0; };
    bad.G = [](double s) { return 0.5 * s * s; };
    bad.g_minus = -1.0;
    bad.g_plus = 1.0;
    bad.sup_norm = 1.0;

    auto rep = validate_h1(bad, 10.0, 401);
    REQUIRE_FALSE(rep.passed());
    bool concavity = false, range = false, mean = false;
    for (const auto& c : rep.clauses) {
        if (!c.passed && c.name.find("d2g") != std::string::npos) concavity = true;
        if (!c.passed && c.name.find("g_- < g(s)") != std::string::npos) range = true;
        if (!c.passed && c.name.find("G(s)/s") != std::string::npos) mean = true;
    }
    CHECK(concavity);
    CHECK(range);
    CHECK(mean);
}

TEST_CASE("mirrored problem data") {
    auto g = make_reaction("atan");
    auto gm = mirror(g);
    CHECK(gm.g(2.0) == Catch::Approx(-g.g(-2.0)));
    CHECK(gm.g_plus == Catch::Approx(-g.g_minus));
    CHECK(gm.g_minus == Catch::Approx(-g.g_plus));
    CHECK(gm.dg(1.3) == Catch::Approx(g.dg(-1.3)));

    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    auto pm = mirrored(p);
    CHECK(pm.p(1.23) == Catch::Approx(-p.p(1.23)));
    CHECK(pm.average == Catch::Approx(-0.3));
    CHECK(pm.sup_norm == Catch::Approx(p.sup_norm));
}

TEST_CASE("trig forcing metadata") {
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    CHECK(p.sup_norm == Catch::Approx(0.8));
    CHECK(p.average == Catch::Approx(0.3));
    CHECK(p.M1 == Catch::Approx(1.8));
    REQUIRE(p.period.has_value());
    CHECK(*p.period == Catch::Approx(2.0 * M_PI));
    CHECK(p.p(0.7) == Catch::Approx(0.3 + 0.5 * std::cos(0.7)));

    // two commensurate frequencies share the slower period
    auto q = make_trig_forcing(0.0, {{1.0, 1.0}}, {{0.2, 0.5}});
    REQUIRE(q.period.has_value());
    CHECK(*q.period == Catch::Approx(4.0 * M_PI));

    auto c = make_constant_forcing(-0.4);
    CHECK(c.sup_norm == Catch::Approx(0.4));
    CHECK(c.average == Catch::Approx(-0.4));

    CHECK_THROWS_AS(make_trig_forcing(0.0, {{1.0, -2.0}}), ConfigError);
}

TEST_CASE("incommensurate frequencies have no period") {
    auto p = make_trig_forcing(0.0, {{0.5, 1.0}, {0.25, std::sqrt(2.0)}});
    CHECK_FALSE(p.period.has_value());
    CHECK_THROWS_AS(decompose_periodic(p, 0.1), NotPeriodic);
}

TEST_CASE("average estimation and window error bound") {
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    auto est = estimate_average(p, 8.0 * 2.0 * M_PI, {0.0, 2.0, 4.4, 13.0});
    CHECK(std::abs(est.A_hat - 0.3) <= est.sup_dev + 1e-12);
    CHECK(std::abs(est.A_hat - 0.3) < 0.05);

    // the deviation bound shrinks as the window grows
    double prev = p.average_error(10.0);
    for (double T : {20.0, 40.0, 80.0}) {
        const double cur = p.average_error(T);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("mean-crossing margins") {
    auto g = make_reaction("atan");
    auto inside = landesman_lazer_margin(g, make_trig_forcing(0.3, {{0.5, 1.0}}));
    CHECK(inside.ok);
    CHECK(inside.lower == Catch::Approx(0.3 + half_pi));
    CHECK(inside.upper == Catch::Approx(half_pi - 0.3));

    auto outside = landesman_lazer_margin(g, make_constant_forcing(2.0));
    CHECK_FALSE(outside.ok);
    CHECK(outside.upper < 0.0);
}

TEST_CASE("bounded-primitive splitting of a periodic forcing") {
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    auto d = decompose_periodic(p, 0.2);

    // the slow part hugs the average, the fast part has a bounded primitive
    for (double t = 0.0; t < 13.0; t += 0.37) {
        CHECK(std::abs(d.p1(t) - 0.3) < 0.1 + 1e-12);
        CHECK(std::abs(d.p2(t)) <= d.M_eps);
    }
    CHECK(d.M_eps == Catch::Approx(d.sup_p2 + 1.0));

    // p1 + d/dt p2 reproduces p
    const double fd_h = 1e-6;
    for (double t : {0.0, 0.9, 2.2, 5.81}) {
        const double dp2 = (d.p2(t + fd_h) - d.p2(t - fd_h)) / (2.0 * fd_h);
        CHECK(d.p1(t) + dp2 == Catch::Approx(p.p(t)).margin(1e-6));
    }
}
