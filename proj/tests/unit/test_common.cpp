#include "support.hpp"

#include "psdocalc/common.hpp"

using namespace psdocalc;

TEST_SUITE("common") {

TEST_CASE("fit_line recovers an exact line") {
    std::vector<double> x{0, 1, 2, 3, 4}, y;
    for (double v : x) y.push_back(-2.5 * v + 1.25);
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.5));
    CHECK(f.intercept == doctest::Approx(1.25));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.count == 5);
}

TEST_CASE("fit_line needs two distinct abscissae") {
    CHECK_THROWS_AS(fit_line({1, 1, 1}, {1, 2, 3}), InvalidArgument);
    CHECK_THROWS_AS(fit_line({1}, {1}), InvalidArgument);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // monotone but nonlinear
    CHECK(spearman({1, 2, 3, 4, 5}, {1, 8, 27, 64, 125}) == doctest::Approx(1.0));
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("geometric_grid covers both ends") {
    auto g = geometric_grid(1.0, 16.0, 4);
    REQUIRE(g.size() == 17);
    CHECK(g.front() == doctest::Approx(1.0));
    CHECK(g.back() == doctest::Approx(16.0));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(2.0, 0.25)));
}

TEST_CASE("lp_norm against direct sums") {
    Vec f(3), mu(3);
    f << 1, -2, 3;
    mu << 0.5, 1, 2;
    CHECK(lp_norm(f, mu, 1) == doctest::Approx(0.5 + 2 + 6));
    CHECK(lp_norm(f, mu, 2) == doctest::Approx(std::sqrt(0.5 + 4 + 18)));
    CHECK(lp_norm(f, mu, INFINITY) == doctest::Approx(3));
    CVec g = f.cast<cdouble>() * cdouble(0, 1);
    CHECK(lp_norm(g, mu, 2) == doctest::Approx(lp_norm(f, mu, 2)));
}

TEST_CASE("conjugate exponent") {
    CHECK(conjugate_exponent(2) == 2);
    CHECK(is_inf(conjugate_exponent(1)));
    CHECK(conjugate_exponent(INFINITY) == 1);
    CHECK(conjugate_exponent(4) == doctest::Approx(4.0 / 3.0));
}

}
