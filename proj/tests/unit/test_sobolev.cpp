#include "support.hpp"

#include "psdocalc/psido.hpp"
#include "psdocalc/sobolev.hpp"

#include <sstream>

using namespace psdocalc;

TEST_SUITE("sobolev") {

TEST_CASE("s = 0 is the Lp norm") {
    auto fx = testing::make_fixture(SpaceKind::path, 12, 0, MeasureChoice::degree);
    Vec f = testing::random_vec(12, 1);
    for (double p : {1.0, 2.0, 3.0, double(INFINITY)})
        CHECK(sobolev_norm(fx.sd, f, {0.0, p}) == doctest::Approx(lp_norm(f, fx.sd.measure, p)));
}

TEST_CASE("single mode scales by (1+lambda)^{s/m}") {
    auto fx = testing::cycle(20);
    Vec u = fx.sd.eigenvectors.col(5);
    const double lam = fx.sd.eigenvalues[5];
    CHECK(sobolev_norm(fx.sd, u, {1.5, 2.0}) == doctest::Approx(std::pow(1 + lam, 0.75)));
}

TEST_CASE("Parseval for p = 2") {
    auto fx = testing::cycle(20);
    Vec f = testing::random_vec(20, 2);
    Vec c = fx.sd.coefficients(f);
    double ref = 0;
    for (PointId k = 0; k < 20; ++k) ref += std::pow(1 + fx.sd.eigenvalues[k], 2.0) * c[k] * c[k];
    CHECK(sobolev_norm(fx.sd, f, {2.0, 2.0}) == doctest::Approx(std::sqrt(ref)));
}

TEST_CASE("norm grows with s") {
    auto fx = testing::cycle(20);
    Vec f = testing::random_vec(20, 3);
    double prev = 0;
    for (double s : {0.0, 0.5, 1.0, 2.0}) {
        double v = sobolev_norm(fx.sd, f, {s, 2.0});
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("mapping test") {
    auto fx = testing::cycle(24);
    CHECK(mapping_test(constant_symbol(1.0), fx.sd, fx.sd, 1.0, 0.0, 2.0).value == doctest::Approx(1.0));
    auto s = builtin_symbol("s10_test", fx.space, fx.sd);
    CHECK(mapping_test(s, fx.sd, fx.sd, 0.0, 0.0, 2.0).value == doctest::Approx(opnorm(s, fx.sd, 2.0).value));
    auto other = testing::cycle(12);
    CHECK_THROWS(mapping_test(s, fx.sd, other.sd, 1.0, 0.0, 2.0));
}

TEST_CASE("check modes parse") {
    for (auto m : {CheckMode::sobolev, CheckMode::generalized_poincare, CheckMode::p2_poincare})
        CHECK(parse_check_mode(to_string(m)) == m);
    CHECK(parse_check_mode("p2-poincare") == CheckMode::p2_poincare);
    CHECK_THROWS(parse_check_mode("hardy"));
}

TEST_CASE("band-limited draws") {
    auto fx = testing::cycle(40);
    Mat F = band_limited_draws(fx.sd, 5, 7);
    REQUIRE(F.cols() == 5);
    Mat C = fx.sd.eigenvectors.transpose() * fx.sd.measure.asDiagonal() * F;
    for (PointId k = 0; k < 40; ++k)
        if (fx.sd.eigenvalues[k] > fx.sd.lambda_max() / 4 + 1e-9) CHECK(C.row(k).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((band_limited_draws(fx.sd, 5, 7) - F).norm() == 0.0);
}

TEST_CASE("embedding constants are finite and witnessed") {
    auto fx = testing::cycle(32);
    CheckOptions opt;
    opt.draws = 4;
    auto sob = embedding_poincare_check(fx.sd, fx.space, CheckMode::sobolev, opt);
    REQUIRE(sob.size() == 1);
    CHECK(sob[0].C > 0);
    CHECK(sob[0].witness.ratio == doctest::Approx(sob[0].C));
    auto gp = embedding_poincare_check(fx.sd, fx.space, CheckMode::generalized_poincare, opt);
    CHECK(gp.size() == opt.M.size());
    auto p2 = embedding_poincare_check(fx.sd, fx.space, CheckMode::p2_poincare, opt);
    REQUIRE(p2.size() == 1);
    CHECK(std::isfinite(p2[0].C));
    opt.M0 = 9;
    CHECK_THROWS(embedding_poincare_check(fx.sd, fx.space, CheckMode::sobolev, opt));
    std::ostringstream os;
    write_witness_csv({sob[0].witness}, os);
    CHECK(os.str().rfind("ball_center,radius,lhs,rhs,ratio\n", 0) == 0);
}

TEST_CASE("p2 Poincare on a constant draw is skipped") {
    auto fx = testing::cycle(16);
    Mat F(16, 2);
    F.col(0) = Vec::Ones(16);
    F.col(1) = testing::random_vec(16, 1);
    auto a = embedding_poincare_check(fx.sd, fx.space, CheckMode::p2_poincare, {}, F);
    auto b = embedding_poincare_check(fx.sd, fx.space, CheckMode::p2_poincare, {}, Mat(F.rightCols(1)));
    CHECK(a[0].C == b[0].C);
}

}
