#include "support.hpp"

#include "psdocalc/symbols.hpp"

#include <numbers>
#include <sstream>

using namespace psdocalc;

TEST_SUITE("symbols") {

TEST_CASE("separable symbol tabulates a(x) F(lambda_k)") {
    auto fx = testing::cycle(10);
    Vec a = testing::random_vec(10, 1);
    auto F = [](double x) { return 1.0 / (1.0 + x); };
    auto S = separable_symbol(a, F).on_spectrum(fx.sd);
    for (PointId x = 0; x < 10; ++x)
        for (PointId k = 0; k < 10; ++k) CHECK(std::abs(S(x, k) - a[x] * F(fx.sd.eigenvalues[k])) < 1e-15);
}

TEST_CASE("expression symbols bind point features") {
    auto fx = testing::cycle(8);
    auto sym = symbol_from_text("x0 + xi", fx.space, {});
    for (PointId x = 0; x < 8; ++x) CHECK(sym(x, 2.0).real() == doctest::Approx(fx.space.coords(x)[0] + 2.0));
    CHECK_THROWS_AS(symbol_from_text("x5", fx.space, {}), InvalidArgument);
    CHECK_THROWS_AS(symbol_from_text("log(xi - 10)", fx.space, {}), NumericalError);
}

TEST_CASE("conj, sum and scaling") {
    auto a = constant_symbol(cdouble(1, 2));
    auto b = multiplier_symbol([](double x) { return x; });
    CHECK(a.conj()(0, 1.0) == cdouble(1, -2));
    CHECK((a + b)(0, 3.0) == cdouble(4, 2));
    CHECK(b.scaled(cdouble(0, 1))(0, 2.0) == cdouble(0, 2));
    CHECK_FALSE(a.is_real());
    CHECK(b.is_real());
}

TEST_CASE("invalid class parameters are rejected") {
    auto F = [](double) { return 1.0; };
    CHECK_THROWS_AS(multiplier_symbol(F, {0.0, 1.5, 0.0, 2.0}), InvalidArgument);
    CHECK_THROWS_AS(multiplier_symbol(F, {0.0, 1.0, 0.0, 1.0}), InvalidArgument);
}

TEST_CASE("seminorm of a constant symbol is its modulus") {
    auto fx = testing::cycle(32);
    auto tab = seminorm(constant_symbol(2.5), &fx.sd);
    CHECK(tab.K(0, 0) == doctest::Approx(2.5));
    CHECK(tab.sum() == doctest::Approx(2.5).epsilon(1e-6));
    CHECK_THROWS(seminorm(constant_symbol(1.0), nullptr));
}

TEST_CASE("seminorm beta = 1 of xi/(1+xi)") {
    auto fx = testing::cycle(32);
    auto tab = seminorm(multiplier_symbol([](double x) { return x / (1 + x); }), &fx.sd);
    // sup over the band of (1+ξ)/(1+ξ)^2 = 1/(1+ξ), attained at the spectral gap
    const double lo = fx.sd.lambda_min_positive();
    CHECK(tab.K(0, 1) == doctest::Approx(1.0 / (1 + lo)).epsilon(1e-4));
}

TEST_CASE("spectral power") {
    auto fx = testing::cycle(16);
    CVec one = CVec::Ones(16);
    CHECK(spectral_power(fx.sd, 0.0, one).isApprox(one));
    CHECK(spectral_power(fx.sd, 0.5, one).norm() < 1e-10);
    CVec g = testing::random_cvec(16, 4);
    CVec h = spectral_power(fx.sd, 0.5, spectral_power(fx.sd, 0.5, g));
    CHECK((h - fx.op.matrix.cast<cdouble>() * g).norm() < 1e-10);
}

TEST_CASE("builtins evaluate") {
    auto fx = testing::cycle(64);
    for (const auto& id : builtin_symbol_ids()) {
        auto s = builtin_symbol(id, fx.space, fx.sd);
        CHECK(s.on_spectrum(fx.sd).allFinite());
    }
    CHECK(builtin_symbol("one", fx.space, fx.sd)(3, 1.7) == cdouble(1));
    CHECK_THROWS(builtin_symbol("nope", fx.space, fx.sd));
}

TEST_CASE("decomposition reconstructs the symbol") {
    auto fx = testing::cycle(32);
    auto sigma = builtin_symbol("decompose_test", fx.space, fx.sd);
    const PartitionOfUnity pu(8, 32);
    auto grid = pu.grid(std::ldexp(1.0, -7));
    const int l_max = 32;
    auto d = decompose(sigma, fx.space.size(), pu, grid, l_max, 4 * (l_max + 1));
    CHECK(reconstruct_residual(d, probe_grid(1e-2, d.band_hi(), 8)) < 1e-3);
    CHECK(d.sup_gamma.size() == std::size_t(l_max + 1));
    std::ostringstream os;
    write_decomposition_csv(d, os);
    CHECK(os.str().rfind("l,t,max_abs_gamma", 0) == 0);
    CHECK_THROWS(reconstruct_residual(d, {2 * d.band_hi()}));
}

TEST_CASE("decomposition needs enough Fourier nodes") {
    auto fx = testing::cycle(16);
    const PartitionOfUnity pu;
    CHECK_THROWS_AS(decompose(constant_symbol(1.0), 16, pu, pu.grid(0.1), 8, 35), InvalidArgument);
}

TEST_CASE("bump profile peaks at its centre") {
    auto fx = testing::cycle(40);
    Vec b = bump_profile(fx.space, 5, 3.0);
    Eigen::Index i;
    b.maxCoeff(&i);
    CHECK(i == 5);
    CHECK_THROWS(bump_profile(fx.space, 5, 0.0));
}

}
