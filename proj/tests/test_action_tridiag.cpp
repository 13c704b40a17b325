#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <nehari/nehari.hpp>

using namespace nehari;

TEST_CASE("limit problem returns the exact arch") {
    auto lim = limit_minimizer(1.0, 999);
    CHECK(lim.value == Catch::Approx(-1.0 / 24.0).epsilon(1e-15));

    double worst = 0.0;
    for (std::size_t i = 0; i < lim.w.n(); ++i) {
        const double t = lim.w.node(i);
        worst = std::max(worst, std::abs(lim.w.values[i] - 0.5 * t * (1.0 - t)));
    }
    CHECK(worst <= 1e-15);

    CHECK_THROWS_AS(limit_minimizer(0.0, 99), NonPositiveK);
    CHECK_THROWS_AS(limit_minimizer(-2.0, 99), NonPositiveK);
}

// The discrete action of the sampled arch admits a closed form: kinetic and
// forcing sums telescope to -k^2/24 (1 - h^2) exactly, which pins both the
// quadrature convention and the O(h^2) defect of the scheme.
TEST_CASE("discrete action of the sampled arch") {
    auto zero = make_zero_reaction();
    for (double k : {1.0, 2.7}) {
        for (std::size_t n : {99u, 999u}) {
            auto lim = limit_minimizer(k, n);
            const double h = lim.w.h();
            const double J = action(lim.w, zero, make_constant_forcing(-k)).value;
            const double expected = -(k * k / 24.0) * (1.0 - h * h);
            CHECK(J == Catch::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("gradient vanishes at the discrete solution") {
    auto zero = make_zero_reaction();
    auto lim = limit_minimizer(2.0, 499);
    auto grad = action_gradient(lim.w, zero, make_constant_forcing(-2.0));
    CHECK(grad.sup_norm() <= 1e-10);
}

TEST_CASE("hessian apply matches the gradient differential") {
    auto g = make_reaction("atan");
    auto p = make_constant_forcing(0.2);
    GridFunction u = make_grid(0.0, 3.0, 0.05);
    GridFunction v = u;
    for (std::size_t i = 0; i < u.n(); ++i) {
        const double t = u.node(i);
        u.values[i] = std::sin(t) + 0.3;
        v.values[i] = std::cos(2.0 * t);
    }
    auto Hv = action_hessian_apply(u, v, g);

    const double eps = 1e-6;
    GridFunction up = u, um = u;
    for (std::size_t i = 0; i < u.n(); ++i) {
        up.values[i] += eps * v.values[i];
        um.values[i] -= eps * v.values[i];
    }
    auto gp = action_gradient(up, g, p);
    auto gm = action_gradient(um, g, p);
    for (std::size_t i = 0; i < u.n(); ++i) {
        const double fd = (gp.values[i] - gm.values[i]) / (2.0 * eps);
        CHECK(Hv.values[i] == Catch::Approx(fd).margin(1e-8));
    }
}

TEST_CASE("unit-interval conjugation round trip") {
    GridFunction u = make_grid(2.0, 7.5, 0.05);
    for (std::size_t i = 0; i < u.n(); ++i) u.values[i] = std::sin(u.node(i));
    auto s = scale_to_unit(u);
    CHECK(s.a == 0.0);
    CHECK(s.b == 1.0);
    auto back = unscale(s, u.a, u.b);
    REQUIRE(back.n() == u.n());
    for (std::size_t i = 0; i < u.n(); ++i)
        CHECK(back.values[i] == Catch::Approx(u.values[i]).epsilon(1e-14));
}

TEST_CASE("dirichlet laplacian spectrum on (0,pi)") {
    GridFunction u = make_grid(0.0, M_PI, 0.05);
    const std::size_t n = u.n();
    const double h = u.h();
    Tridiagonal T;
    T.diag.assign(n, 2.0 / (h * h));
    T.off.assign(n - 1, -1.0 / (h * h));

    auto lam = [&](std::size_t j) {
        const double s = std::sin(0.5 * static_cast<double>(j) * M_PI * h / M_PI);
        return 4.0 * s * s / (h * h);
    };

    auto pair = smallest_eigenvalue(T);
    CHECK(pair.lambda == Catch::Approx(lam(1)).epsilon(1e-10));
    // discrete eigenvalue sits just below the continuum value 1
    CHECK(pair.lambda < 1.0);
    CHECK(pair.lambda == Catch::Approx(1.0).margin(1e-3));

    CHECK(detail::eigenvalues_below(T, 0.5 * (lam(1) + lam(2))) == 1);
    CHECK(detail::eigenvalues_below(T, 0.5 * (lam(3) + lam(4))) == 3);
    CHECK(detail::eigenvalues_below(T, lam(1) * 0.5) == 0);
}

TEST_CASE("linearization eigenvalue at the zero function") {
    // control case: at u = 0 the linearized operator is -u'' - u, which is
    // indefinite on a long interval
    auto g = make_reaction("atan");
    GridFunction z = make_grid(0.0, 10.0, 0.025);
    const double h = z.h();
    const double lap1 = 4.0 * std::pow(std::sin(0.5 * M_PI * h / 10.0), 2) / (h * h);

    const double lam = nondegeneracy_eigenvalue(z, g);
    CHECK(lam == Catch::Approx(lap1 - 1.0).epsilon(1e-10));
    CHECK(lam == Catch::Approx(M_PI * M_PI / 100.0 - 1.0).margin(1e-4));
    CHECK(lam < 0.0);
}

TEST_CASE("tridiagonal factorization and solve") {
    Tridiagonal T;
    T.diag = {4.0, 5.0, 4.2, 6.0};
    T.off = {-1.0, 2.0, -0.7};
    std::vector<double> x = {1.0, -2.0, 0.5, 3.0};
    // rhs = T x
    std::vector<double> rhs = {4.0 * 1 - 1.0 * (-2), -1.0 * 1 + 5.0 * (-2) + 2.0 * 0.5,
                               2.0 * (-2) + 4.2 * 0.5 - 0.7 * 3, -0.7 * 0.5 + 6.0 * 3};
    REQUIRE(solve_positive_tridiagonal(T, rhs));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(rhs[i] == Catch::Approx(x[i]));

    Tridiagonal bad;
    bad.diag = {1.0, -3.0, 1.0};
    bad.off = {0.0, 0.0};
    std::vector<double> r2 = {1.0, 1.0, 1.0};
    CHECK_FALSE(solve_positive_tridiagonal(bad, r2));
}
