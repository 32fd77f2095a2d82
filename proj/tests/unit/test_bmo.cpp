#include "support.hpp"

#include "psdocalc/bmo.hpp"
#include "psdocalc/psido.hpp"

#include <sstream>

using namespace psdocalc;

TEST_SUITE("bmo") {

TEST_CASE("constants have zero oscillation") {
    auto fx = testing::cycle(40);
    auto radii = default_bmo_radii(fx.space);
    CHECK(bmo_norm(fx.sd, fx.space, Vec(Vec::Constant(40, -2.0)), 2, radii).norm < 1e-12);
}

TEST_CASE("single eigenmode oscillation") {
    auto fx = testing::cycle(30);
    const PointId k = 3;
    Vec u = fx.sd.eigenvectors.col(k);
    const double lam = fx.sd.eigenvalues[k];
    const std::vector<double> radii{1.0, 2.0, 5.0};
    const int M = 2;
    auto data = bmo_norm(fx.sd, fx.space, u, M, radii);
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double r = radii[j];
        auto b = make_ball(fx.space, 7, r);
        double avg = 0;
        for (auto y : b.members) avg += u[y] * u[y];
        avg /= double(b.members.size());
        const double ref = std::pow(1 - std::exp(-r * r * lam), M) * std::sqrt(avg);
        CHECK(data.oscillation(7, Eigen::Index(j)) == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("homogeneous and invariant under constants") {
    auto fx = testing::make_fixture(SpaceKind::grid_torus, 6, 6);
    auto radii = default_bmo_radii(fx.space);
    Vec f = testing::random_vec(36, 4);
    const double a = bmo_norm(fx.sd, fx.space, f, 2, radii).norm;
    CHECK(bmo_norm(fx.sd, fx.space, Vec(-3.0 * f), 2, radii).norm == doctest::Approx(3 * a));
    CHECK(bmo_norm(fx.sd, fx.space, Vec(f.array() + 5.0), 2, radii).norm == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("argument validation") {
    auto fx = testing::cycle(20);
    Vec f = testing::random_vec(20, 1);
    CHECK_THROWS(bmo_norm(fx.sd, fx.space, f, 0, {1.0}));
    CHECK_THROWS(bmo_norm(fx.sd, fx.space, f, 1, {}));
    CHECK_THROWS(bmo_norm(fx.sd, fx.space, f, 1, {100.0}));
    CHECK(default_bmo_M(1.0) == 2);
    CHECK(default_bmo_M(4.5) == 3);
}

TEST_CASE("psi semigroup kills constants") {
    auto fx = testing::cycle(32);
    CHECK(psi_semigroup_apply(fx.sd, 0.8, 2, Vec::Ones(32)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("paraproduct with constant g is a spectral multiplier") {
    auto fx = testing::cycle(36);
    auto grid = default_paraproduct_grid(fx.sd);
    const int M = 2;
    const double c = 1.7;
    Vec f = testing::random_vec(36, 9);
    Vec got = paraproduct(fx.sd, Vec::Constant(36, c), f, M, grid);
    Vec Gk = fx.sd.tabulate([&](double x) {
        double s = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) s += grid.w[j] * std::pow(grid.t[j] * x, M) * std::exp(-grid.t[j] * x);
        return c * s;
    });
    CHECK((got - fx.sd.apply_values(Gk, f)).cwiseAbs().maxCoeff() < 1e-8);
    Mat P = paraproduct_matrix(fx.sd, Vec::Constant(36, c), M, grid);
    CHECK((P * f - got).norm() < 1e-10);
}

TEST_CASE("paraproduct symbol reproduces the operator") {
    auto fx = testing::cycle(24);
    auto grid = default_paraproduct_grid(fx.sd);
    Vec g = testing::random_vec(24, 2), f = testing::random_vec(24, 3);
    auto sym = symbol_of_paraproduct(fx.sd, g, 2, grid);
    CHECK((apply(sym, fx.sd, f).real() - paraproduct(fx.sd, g, f, 2, grid)).norm() < 1e-10);
}

TEST_CASE("T1 of the identity is constant") {
    auto fx = testing::cycle(32);
    auto r = t1_test(constant_symbol(1.0), fx.op, fx.sd, fx.space, 2);
    CHECK(r.bmo_t1 < 1e-10);
    CHECK(r.l2_norm == doctest::Approx(1.0));
    std::ostringstream os;
    write_correlation_csv({{"one", r.l2_norm, r.bmo_t1, r.seminorms.sum()}}, os);
    CHECK(os.str().rfind("symbol_id,opnorm2,bmo_t1,seminorm_sum\n", 0) == 0);
}

}
