#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <nehari/nehari.hpp>

using namespace nehari;

TEST_CASE("partition validation") {
    Partition P{0.0, 30.0, {10.0, 20.0}, 10.0, Sign::plus};
    CHECK_NOTHROW(validate_partition(P));

    Partition bad_order{5.0, 5.0, {}, 1.0, Sign::plus};
    CHECK_THROWS_AS(validate_partition(bad_order), ConfigError);

    Partition bad_floor = P;
    bad_floor.L = 0.0;
    CHECK_THROWS_AS(validate_partition(bad_floor), ConfigError);

    Partition tight{0.0, 30.0, {10.0, 19.9}, 10.0, Sign::plus};
    CHECK_THROWS_AS(validate_partition(tight), ConfigError);
}

TEST_CASE("piece signs and lengths") {
    Partition P{0.0, 30.0, {10.0, 19.0}, 5.0, Sign::plus};
    CHECK(partition_sign(P, 0) == Sign::plus);
    CHECK(partition_sign(P, 1) == Sign::minus);
    CHECK(partition_sign(P, 2) == Sign::plus);
    P.start_sign = Sign::minus;
    CHECK(partition_sign(P, 0) == Sign::minus);
    CHECK(partition_sign(P, 1) == Sign::plus);

    const auto len = partition_lengths(P);
    REQUIRE(len.size() == 3);
    CHECK(len[0] == Catch::Approx(10.0));
    CHECK(len[1] == Catch::Approx(9.0));
    CHECK(len[2] == Catch::Approx(11.0));

    const auto rs = partition_ratio_stats(P);
    CHECK(rs.lambda_min_len == Catch::Approx(9.0));
    CHECK(rs.lambda_max_len == Catch::Approx(11.0));
    CHECK(rs.max_adjacent_ratio == Catch::Approx(11.0 / 9.0));
}

TEST_CASE("monotone projection with box") {
    std::vector<double> y = {3.0, 1.0, 2.0};
    detail::isotonic_box_project(y, -10.0, 10.0);
    CHECK(y == std::vector<double>{2.0, 2.0, 2.0});

    y = {5.0, 6.0};
    detail::isotonic_box_project(y, 0.0, 4.0);
    CHECK(y == std::vector<double>{4.0, 4.0});

    y = {-3.0, 7.0};
    detail::isotonic_box_project(y, 0.0, 10.0);
    CHECK(y == std::vector<double>{0.0, 7.0});
}

TEST_CASE("projection onto the spaced slab") {
    std::vector<double> t = {40.0};
    detail::project_points(t, 0.0, 80.0, 10.0);
    CHECK(t[0] == Catch::Approx(40.0));

    t = {2.0};
    detail::project_points(t, 0.0, 80.0, 10.0);
    CHECK(t[0] == Catch::Approx(10.0));

    // with B - A = (k+1) L the slab is a single point
    t = {5.0, 12.0};
    detail::project_points(t, 0.0, 30.0, 10.0);
    CHECK(t[0] == Catch::Approx(10.0));
    CHECK(t[1] == Catch::Approx(20.0));
}

TEST_CASE("gradient needs one minimizer per piece") {
    Partition P{0.0, 30.0, {15.0}, 10.0, Sign::plus};
    std::vector<SignedMinimizerResult> wrong(1);
    CHECK_THROWS_AS(psi_gradient(P, wrong), ConfigError);
}

TEST_CASE("one interior point under even data settles at the midpoint") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);

    PartitionOptions opts;
    opts.inner.h_target = 0.05;
    opts.L = 20.0;
    opts.tol = 1e-6;
    opts.random_probes = 4;
    opts.seed = 99;

    auto res = maximize_partition(0.0, 80.0, 1, Sign::plus, g, p0, opts);

    REQUIRE(res.partition.points.size() == 1);
    const double t1 = res.partition.points[0];
    CHECK(std::abs(t1 - 40.0) <= 1e-3);
    CHECK(res.grad_norm <= opts.tol * (1.0 + std::abs(res.psi)));
    CHECK(res.interior);
    CHECK(res.psi < 0.0);
    CHECK_FALSE(res.below_H);

    REQUIRE(res.minimizers.size() == 2);
    CHECK(res.minimizers[0].sign == Sign::plus);
    CHECK(res.minimizers[1].sign == Sign::minus);
    CHECK(res.psi == Catch::Approx(res.minimizers[0].phi + res.minimizers[1].phi));

    REQUIRE(res.corner_mismatches.size() == 1);
    const double sb = res.minimizers[0].slope_b;
    const double sa = res.minimizers[1].slope_a;
    CHECK(res.corner_mismatches[0] ==
          Catch::Approx(std::abs(0.5 * sa * sa - 0.5 * sb * sb)).margin(1e-12));

    CHECK(res.ratio_stats.lambda_min_len >= opts.L);
    CHECK(res.ratio_stats.lambda_min_len <= 40.0 + 1e-9);
    CHECK(res.ratio_stats.lambda_max_len >= 40.0 - 1e-9);

    CHECK(res.probe_count == 4);
    CHECK(res.probe_violations == 0);
    CHECK(res.stationary_multiplicity == 1);

    // the reported point is a genuine local maximum along the free coordinate
    SolverOptions inner = opts.inner;
    inner.certified_length = 0.0;
    for (double shift : {-0.5, 0.5}) {
        Partition Q{0.0, 80.0, {t1 + shift}, opts.L, Sign::plus};
        auto [psi_q, pieces] = psi_value(Q, g, p0, inner);
        (void)pieces;
        CHECK(psi_q < res.psi);
    }
}

TEST_CASE("window too small for the requested sign changes") {
    auto g = make_reaction("atan");
    auto p0 = make_constant_forcing(0.0);
    PartitionOptions opts;
    opts.L = 10.0;
    CHECK_THROWS_AS(maximize_partition(0.0, 30.0, 3, Sign::plus, g, p0, opts), BoundaryStuck);

    PartitionOptions no_floor;
    CHECK_THROWS_AS(maximize_partition(0.0, 100.0, 1, Sign::plus, g, p0, no_floor), ConfigError);
}
