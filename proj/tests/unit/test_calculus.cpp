#include "support.hpp"

#include "psdocalc/calculus.hpp"

using namespace psdocalc;

TEST_SUITE("calculus") {

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
    std::vector<double> x, w;
    gauss_legendre(6, x, w);
    REQUIRE(x.size() == 6);
    for (int deg = 0; deg <= 11; ++deg) {
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
        double exact = (deg % 2) ? 0.0 : 2.0 / (deg + 1);
        CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("xi_derivative on polynomials and exponentials") {
    auto cube = [](double x) { return x * x * x; };
    CHECK(xi_derivative(cube, 2.0, 1) == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(xi_derivative(cube, 2.0, 2) == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(xi_derivative(cube, 2.0, 3) == doctest::Approx(6.0).epsilon(1e-4));
    auto e = [](double x) { return std::exp(-x); };
    CHECK(xi_derivative(e, 1.5, 4) == doctest::Approx(std::exp(-1.5)).epsilon(1e-3));
    CHECK_THROWS(xi_derivative(e, 1.0, 5));
}

TEST_CASE("xi_derivative of vector-valued functions") {
    auto f = [](double x) {
        Vec v(2);
        v << x * x, 1.0 / (1.0 + x);
        return v;
    };
    for (int order = 1; order <= 2; ++order) {
        Vec d = xi_derivative(f, 0.5, order);
        CHECK(d[0] == doctest::Approx(order == 1 ? 1.0 : 2.0).epsilon(1e-6));
        CHECK(d[1] == doctest::Approx(order == 1 ? -1.0 / 2.25 : 2.0 / 3.375).epsilon(1e-6));
    }
}

TEST_CASE("eta is a smooth cutoff") {
    PartitionOfUnity pu;
    CHECK(pu.eta(0.3) == 1.0);
    CHECK(pu.eta(1.0) == doctest::Approx(1.0));
    CHECK(pu.eta(2.0) == doctest::Approx(0.0));
    CHECK(pu.eta(5.0) == 0.0);
    double prev = 1.0;
    for (double xi = 1.0; xi <= 2.0; xi += 1.0 / 64) {
        double v = pu.eta(xi);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("psi is supported in [1,2]") {
    PartitionOfUnity pu;
    CHECK(pu.psi(0.9) == 0.0);
    CHECK(pu.psi(2.1) == 0.0);
    CHECK(pu.psi(1.5) > 0.0);
    for (double u = 0.5; u < 3.0; u += 0.01)
        if (pu.psi(u) != 0.0) CHECK(pu.psi_tilde(u) == 1.0);
}

TEST_CASE("dyadic partition sums to one") {
    PartitionOfUnity pu(8);
    for (double xi : {0.01, 0.3, 1.0, 1.7, 3.0, 40.0, 200.0}) CHECK(pu.dyadic_sum(xi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("continuous partition sums to one above the grid floor") {
    PartitionOfUnity pu(8, 16);
    auto grid = pu.grid(1.0 / 512);
    for (double xi : {2.0, 3.3, 17.0, 100.0, 250.0}) CHECK(pu.continuous_sum(xi, grid) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-smooth cutoffs are rejected") {
    CHECK_THROWS_AS(PartitionOfUnity(8, 8, EtaShape::cubic), InvalidArgument);
    CHECK_THROWS_AS(PartitionOfUnity(8, 8, EtaShape::linear), InvalidArgument);
    CHECK_NOTHROW(PartitionOfUnity(8, 8, EtaShape::smooth_plain));
    CHECK(parse_eta_shape(to_string(EtaShape::smooth_plain)) == EtaShape::smooth_plain);
}

TEST_CASE("eta junction jump detects a kink") {
    PartitionOfUnity pu;
    CHECK(eta_junction_jump([&](double x) { return pu.eta(x); }) < 1e-3);
    auto lin = [](double x) { return x <= 1 ? 1.0 : x >= 2 ? 0.0 : 2.0 - x; };
    CHECK(eta_junction_jump(lin) > 0.5);
}

TEST_CASE("scale grid nodes and weights") {
    auto g = geometric_scale_grid(1.0 / 64, 1.0, 4);
    REQUIRE(g.size() >= 24);
    CHECK(g.t[0] == doctest::Approx(std::pow(2.0, -0.125)));
    CHECK(g.t.back() * std::pow(2.0, -0.125) <= 1.0 / 64 * (1 + 1e-12));
    CHECK(g.t.back() > 1.0 / 64);
    for (double w : g.w) CHECK(w == doctest::Approx(std::log(2.0) / 4));
}

TEST_CASE("multiplier matrix agrees with multiplier_apply") {
    auto fx = testing::cycle(20);
    auto F = [](double x) { return x / (1 + x * x); };
    Vec f = testing::random_vec(20, 2);
    CHECK((multiplier_matrix(fx.sd, F) * f - multiplier_apply(fx.sd, F, f)).norm() < 1e-12);
}

TEST_CASE("almost orthogonality decays for vanishing-moment families") {
    auto fx = testing::cycle(128);
    auto psi_s = [](double s, double x) { return (s * x) * std::exp(-s * x); };
    auto psi_t = [](double t, double x) { return (t * x) * std::exp(-t * x); };
    auto ao = almost_orthogonality(fx.sd, psi_s, psi_t, 1.0, {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4});
    REQUIRE(ao.norms.size() == 5);
    CHECK(ao.norms.front() < ao.norms.back());
    CHECK(ao.slope > 0.5);
}

}
