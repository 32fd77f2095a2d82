#include "support.hpp"

#include "psdocalc/norms.hpp"

#include <Eigen/SVD>

using namespace psdocalc;

namespace {

Mat random_mat(int r, int c, unsigned seed) {
    Mat A(r, c);
    Vec v = testing::random_vec(r * c, seed);
    for (int i = 0; i < r * c; ++i) A(i / c, i % c) = v[i];
    return A;
}

}  // namespace

TEST_SUITE("norms") {

TEST_CASE("spectral norm matches the SVD") {
    Mat A = random_mat(7, 5, 1);
    Eigen::JacobiSVD<Mat> svd(A);
    CHECK(spectral_norm(A) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-12));
}

TEST_CASE("weighted 2->2 norm") {
    const int n = 6;
    Mat K = random_mat(n, n, 2);
    Vec mu = (testing::random_vec(n, 3).array().abs() + 0.5).matrix();
    // ||K||_{L2(mu)} = ||M^{1/2} K M^{-1/2}||_2
    Mat S = mu.cwiseSqrt().asDiagonal() * K * mu.cwiseSqrt().cwiseInverse().asDiagonal();
    auto bn = operator_norm(K, mu, 2, 2);
    CHECK_FALSE(bn.lower_bound);
    CHECK(bn.value == doctest::Approx(spectral_norm(S)).epsilon(1e-10));
}

TEST_CASE("p = 1 and p = inf are exact column and row sums") {
    const int n = 5;
    Mat K = random_mat(n, n, 4);
    Vec mu = Vec::Ones(n);
    auto n1 = operator_norm(K, mu, 1, 1);
    auto ninf = operator_norm(K, mu, INFINITY, INFINITY);
    CHECK_FALSE(n1.lower_bound);
    CHECK_FALSE(ninf.lower_bound);
    CHECK(n1.value == doctest::Approx(K.cwiseAbs().colwise().sum().maxCoeff()));
    CHECK(ninf.value == doctest::Approx(K.cwiseAbs().rowwise().sum().maxCoeff()));
}

TEST_CASE("other exponents give a flagged lower bound under Riesz-Thorin") {
    const int n = 6;
    Mat K = random_mat(n, n, 5);
    Vec mu = Vec::Ones(n);
    double a = operator_norm(K, mu, 1, 1).value, b = operator_norm(K, mu, 2, 2).value;
    auto bn = operator_norm(K, mu, 4.0 / 3.0, 4.0 / 3.0, 11);
    CHECK(bn.lower_bound);
    CHECK(bn.value > 0);
    // 1/p = 3/4 = (1-θ)/1 + θ/2 with θ = 1/2
    CHECK(bn.value <= std::sqrt(a * b) * (1 + 1e-9));
    CHECK(exact_norm_case(1, 3));
    CHECK(exact_norm_case(3, INFINITY));
    CHECK_FALSE(exact_norm_case(3, 3));
}

TEST_CASE("block norm restricts rows and columns") {
    Mat K = random_mat(6, 6, 6);
    Vec mu = Vec::Ones(6);
    std::vector<PointId> cols{1, 4}, rows{0, 2, 5};
    Mat sub(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) sub(i, j) = K(rows[std::size_t(i)], cols[std::size_t(j)]);
    CHECK(block_norm(K, mu, mu, cols, rows, 2, 2).value == doctest::Approx(spectral_norm(sub)));
    CHECK_THROWS(block_norm(K, mu, mu, {}, rows, 2, 2));
}

}
