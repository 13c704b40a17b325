#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <nehari/nehari.hpp>

using namespace nehari;

TEST_CASE("slope shooting reproduces the variational pieces") {
    auto g = make_reaction("atan");
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    SolverOptions opts;
    opts.h_target = 0.05;

    for (Sign sign : {Sign::plus, Sign::minus}) {
        auto shot = shoot_bvp(0.0, 12.3, sign, g, p);
        auto ref = minimize_signed(0.0, 12.3, sign, g, p, opts);

        INFO((sign == Sign::plus ? "sign +" : "sign -"));
        CHECK(std::abs(shot.endpoint_value) <= 1e-8);
        CHECK(shot.bisection_iterations >= 20);
        CHECK(shot.bisection_iterations <= 60);
        CHECK(shot.rk_steps > 50);
        CHECK(shot.eval(0.0) == 0.0);
        CHECK(sign_value(sign) * shot.initial_slope > 0.0);
        for (std::size_t i = 1; i < shot.t.size(); ++i) CHECK(shot.t[i] > shot.t[i - 1]);

        double dist = 0.0;
        for (std::size_t i = 0; i < ref.u.n(); ++i)
            dist = std::max(dist, std::abs(shot.eval(ref.u.node(i)) - ref.u.values[i]));
        CHECK(dist <= 1e-3);

        double floor_val = 0.0;
        for (double v : shot.u) floor_val = std::min(floor_val, sign_value(sign) * v);
        CHECK(floor_val >= -1e-6 * (1.0 + 40.0));
    }

    CHECK_THROWS_AS(shoot_bvp(3.0, 3.0, Sign::plus, g, p), ConfigError);
    // an absurd reference slope puts the whole ladder above the arch branch
    CHECK_THROWS_AS(shoot_bvp(0.0, 12.3, Sign::plus, g, p, 1e6), NoBracket);
}

TEST_CASE("difference quotients of the piece value match the slope formulas") {
    auto g = make_reaction("atan");
    auto p = make_trig_forcing(0.3, {{0.5, 1.0}});
    SolverOptions opts;
    opts.h_target = 0.02;

    auto ref = minimize_signed(0.0, 20.37, Sign::plus, g, p, opts);
    auto fd = fd_phi_derivative(0.0, 20.37, Sign::plus, g, p, 1e-3, opts);

    const double d_a = 0.5 * ref.slope_a * ref.slope_a;
    const double d_b = -0.5 * ref.slope_b * ref.slope_b;
    CHECK(fd.d_a == Catch::Approx(d_a).epsilon(1e-3));
    CHECK(fd.d_b == Catch::Approx(d_b).epsilon(1e-3));
    CHECK(fd.delta == 1e-3);

    CHECK_THROWS_AS(fd_phi_derivative(0.0, 20.0, Sign::plus, g, p, 0.0, opts), ConfigError);
    SolverOptions floor_opts = opts;
    floor_opts.min_length = 1.0;
    CHECK_THROWS_AS(fd_phi_derivative(0.0, 1.2, Sign::plus, g, p, 0.5, floor_opts), ConfigError);
}

TEST_CASE("exhaustive lattice scan with one interior point") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);
    SolverOptions inner;
    inner.h_target = 0.05;

    auto bf = brute_force_partition(0.0, 45.0, 1, 10.0, 1.0, Sign::plus, g, p0, inner);
    CHECK(bf.evaluations == 52); // 26 lattice points, two pieces each
    REQUIRE(bf.points.size() == 1);
    CHECK(std::abs(bf.points[0] - 22.5) <= 0.51);
    CHECK(bf.psi == Catch::Approx(-2121.2728).epsilon(1e-5));
    CHECK(bf.grid_step == 1.0);

    PartitionOptions popts;
    popts.inner = inner;
    popts.L = 10.0;
    auto ascent = maximize_partition(0.0, 45.0, 1, Sign::plus, g, p0, popts);
    CHECK(std::abs(bf.points[0] - ascent.partition.points[0]) <= bf.grid_step + 1e-9);
    CHECK(ascent.psi >= bf.psi - 1e-6 * (1.0 + std::abs(bf.psi)));
}

TEST_CASE("exhaustive lattice scan with two interior points caches the outer pieces") {
    auto g = make_reaction("atan");
    auto p = make_constant_forcing(0.3);
    SolverOptions inner;
    inner.h_target = 0.05;

    auto bf = brute_force_partition(0.0, 70.0, 2, 20.0, 5.0, Sign::plus, g, p, inner);
    CHECK(bf.evaluations == 12); // 3 left + 3 right (cached) + 6 middle
    REQUIRE(bf.points.size() == 2);
    CHECK(bf.points[0] == Catch::Approx(25.0));
    CHECK(bf.points[1] == Catch::Approx(45.0));
    CHECK(bf.psi == Catch::Approx(-2921.8361).epsilon(1e-5));
}

TEST_CASE("lattice scan rejects bad requests") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);
    CHECK_THROWS_AS(brute_force_partition(0.0, 100.0, 3, 10.0, 1.0, Sign::plus, g, p0),
                    ConfigError);
    CHECK_THROWS_AS(brute_force_partition(0.0, 100.0, 1, 10.0, 0.0, Sign::plus, g, p0),
                    ConfigError);
    CHECK_THROWS_AS(brute_force_partition(0.0, 15.0, 1, 10.0, 1.0, Sign::plus, g, p0),
                    ConfigError);
}
