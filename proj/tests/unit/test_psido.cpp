#include "support.hpp"

#include "psdocalc/calculus.hpp"
#include "psdocalc/psido.hpp"

using namespace psdocalc;

TEST_SUITE("psido") {

TEST_CASE("symbol a(x) acts by multiplication") {
    auto fx = testing::make_fixture(SpaceKind::binary_tree, 4, 0, MeasureChoice::degree);
    Vec a = testing::random_vec(fx.sd.size(), 2);
    Symbol s([a](PointId x, double) { return cdouble(a[x]); }, {}, SymbolSource::table, "a(x)");
    CVec f = testing::random_cvec(fx.sd.size(), 3);
    CHECK((apply(s, fx.sd, f) - a.cast<cdouble>().cwiseProduct(f)).norm() < 1e-12);
}

TEST_CASE("multiplier symbols are bitwise equal to multiplier_apply") {
    auto fx = testing::cycle(24);
    auto F = [](double x) { return std::exp(-0.4 * x) / (1 + x); };
    Vec f = testing::random_vec(24, 5);
    CVec got = apply(multiplier_symbol(F), fx.sd, f);
    Vec ref = multiplier_apply(fx.sd, F, f);
    CHECK(got.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((got.real() - ref).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel agrees with apply") {
    auto fx = testing::cycle(8);
    auto s = symbol_from_text("cos(2*pi*x0) * xi/(1+xi) + 0.5", fx.space, {});
    auto K = kernel_matrix(s, fx.sd);
    CVec f = testing::random_cvec(8, 6);
    CHECK((K.apply(f) - apply(s, fx.sd, f)).norm() < 1e-12);
}

TEST_CASE("mu-adjoint is the L2(mu) adjoint") {
    auto fx = testing::make_fixture(SpaceKind::path, 7, 0, MeasureChoice::degree);
    auto s = symbol_from_text("x0 * xi + 1", fx.space, {});
    auto K = kernel_matrix(s, fx.sd);
    CMat Ks = K.adjoint();
    CVec f = testing::random_cvec(7, 1), g = testing::random_cvec(7, 2);
    const Vec& mu = fx.sd.measure;
    auto inner = [&](const CVec& u, const CVec& v) { return (u.cwiseProduct(v.conjugate())).dot(mu.cast<cdouble>()); };
    CHECK(std::abs(inner(K.apply(f), g) - inner(f, Ks * g)) < 1e-12);
}

TEST_CASE("identity symbol has norm one at every exponent") {
    auto fx = testing::cycle(16);
    for (double p : {1.0, 2.0, double(INFINITY)}) CHECK(opnorm(constant_symbol(1.0), fx.sd, p).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("real multipliers are self-adjoint") {
    auto fx = testing::make_fixture(SpaceKind::sierpinski, 2, 0, MeasureChoice::degree);
    auto s = multiplier_symbol([](double x) { return x / (1 + x); });
    CHECK(adjoint_defect(s, fx.sd, 2).value < 1e-12);
    auto t = symbol_from_text("x0 * xi/(1+xi)", fx.space, {});
    CHECK(adjoint_defect(t, fx.sd, 2).value > 1e-6);
}

TEST_CASE("local block norms never exceed the global norm") {
    auto fx = testing::cycle(48);
    auto s = builtin_symbol("s10_test", fx.space, fx.sd);
    auto K = kernel_matrix(s, fx.sd);
    double global = opnorm(s, fx.sd, 2).value;
    for (const auto& pr : ball_pair_grid(fx.space, 0, 4.0, 12)) {
        auto bn = block_norm(K.K, fx.sd.measure, fx.sd.measure, pr.b1.members, pr.b2.members, 2, 2);
        CHECK(bn.value <= global * (1 + 1e-10));
    }
}

TEST_CASE("truncation at the top scale keeps only the low-frequency part") {
    auto fx = testing::cycle(32);
    auto sigma = builtin_symbol("decompose_test", fx.space, fx.sd);
    const PartitionOfUnity pu(8, 16);
    auto d = decompose(sigma, 32, pu, pu.grid(1.0 / 64), 8, 36);
    CVec f = testing::random_cvec(32, 8);
    CVec got = apply_truncated(d, fx.sd, f, 1.0);
    Symbol tau([&d](PointId x, double xi) { return d.tau(x, xi); }, {}, SymbolSource::table, "tau", false);
    CHECK((got - apply(tau, fx.sd, f)).norm() < 1e-12);
    CHECK_THROWS(apply_truncated(d, fx.sd, f, 2.0));
    auto sweep = truncation_sweep(d, fx.sd, f);
    CHECK_FALSE(sweep.empty());
}

TEST_CASE("psi-tilde family is normalized") {
    auto fx = testing::cycle(64);
    PsiTildeFamily fam;
    Vec v = fam.values(fx.sd, 0.5);
    CHECK(v.maxCoeff() == doctest::Approx(1.0));
    CHECK(v.minCoeff() >= 0.0);
}

TEST_CASE("off-diagonal decay report") {
    auto fx = testing::cycle(128);
    auto K = kernel_matrix(builtin_symbol("s10_test", fx.space, fx.sd), fx.sd);
    auto rep = psdo_offdiag(K, fx.sd, fx.space, PsiTildeFamily{}, 4.0, 2.0, 2.0, 2.0);
    CHECK(rep.model == DecayModel::polynomial);
    CHECK_FALSE(rep.rows.empty());
    CHECK(rep.max_ratio > 0);
    CHECK_THROWS(psdo_offdiag(K, fx.sd, fx.space, PsiTildeFamily{}, 0.0, 2.0, 2.0, 2.0));
}

}
