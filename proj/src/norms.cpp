#include "psdocalc/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace psdocalc {

namespace {

constexpr int kRandomVectors = 64;
constexpr int kAscentStarts = 4;
constexpr int kAscentSteps = 60;

double inv(double p) { return is_inf(p) ? 0.0 : 1.0 / p; }

double vec_norm(const CVec& v, double p) {
    if (is_inf(p))
        return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (p == 2)
        return v.norm();
    double s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += std::pow(std::abs(v[i]), p);
    return std::pow(s, 1.0 / p);
}

/// Dual vector: a unit vector in ℓ^{p'} attaining ⟨y, dual⟩ = ||y||_p.
CVec dual_of(const CVec& y, double p) {
    CVec out(y.size());
    const double ny = vec_norm(y, p);
    if (ny == 0)
        return CVec::Zero(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = std::abs(y[i]);
        if (a == 0) {
            out[i] = 0;
            continue;
        }
        const cdouble phase = y[i] / a;
        if (p == 1)
            out[i] = phase;
        else if (is_inf(p))
            out[i] = a == ny ? phase : cdouble(0);
        else
            out[i] = phase * std::pow(a / ny, p - 1);
    }
    if (is_inf(p)) {
        // put all mass on the first maximal entry
        bool first = true;
        for (Eigen::Index i = 0; i < out.size(); ++i)
            if (out[i] != cdouble(0)) {
                if (!first)
                    out[i] = 0;
                first = false;
            }
    }
    return out;
}

double ratio(const CMat& A, const CVec& x, double p, double q) {
    const double nx = vec_norm(x, p);
    return nx > 0 ? vec_norm(A * x, q) / nx : 0.0;
}

}  // namespace

bool exact_norm_case(double p, double q) { return p == 1 || is_inf(q) || (p == 2 && q == 2); }

double spectral_norm(const CMat& A) {
    if (A.size() == 0)
        return 0.0;
    const CMat g = A.rows() <= A.cols() ? CMat(A * A.adjoint()) : CMat(A.adjoint() * A);
    Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double spectral_norm(const Mat& A) {
    if (A.size() == 0)
        return 0.0;
    const Mat g = A.rows() <= A.cols() ? Mat(A * A.transpose()) : Mat(A.transpose() * A);
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

BlockNorm matrix_norm(const CMat& A, double p, double q, std::uint64_t seed) {
    if (p < 1 || q < 1)
        throw InvalidArgument("norm exponents must lie in [1, inf]");
    if (A.size() == 0)
        return {0.0, false};
    if (p == 1) {
        double best = 0;
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            best = std::max(best, vec_norm(A.col(j), q));
        return {best, false};
    }
    if (is_inf(q)) {
        const double pp = conjugate_exponent(p);
        double best = 0;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            best = std::max(best, vec_norm(A.row(i).transpose(), pp));
        return {best, false};
    }
    if (p == 2 && q == 2)
        return {spectral_norm(A), false};

    // Lower bound: random probes, then Boyd's power ascent from the best starts.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<std::pair<double, CVec>> probes;
    for (int k = 0; k < kRandomVectors; ++k) {
        CVec x(A.cols());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = cdouble(gauss(rng), gauss(rng));
        probes.emplace_back(ratio(A, x, p, q), std::move(x));
    }
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        CVec e = CVec::Zero(A.cols());
        e[j] = 1;
        probes.emplace_back(ratio(A, e, p, q), std::move(e));
    }
    std::stable_sort(probes.begin(), probes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = probes.front().first;
    const double pp = conjugate_exponent(p);
    for (int s = 0; s < kAscentStarts && s < int(probes.size()); ++s) {
        CVec x = probes[std::size_t(s)].second;
        x /= vec_norm(x, p);
        for (int it = 0; it < kAscentSteps; ++it) {
            const CVec y = A * x;
            const CVec z = A.adjoint() * dual_of(y, q);
            CVec xn = dual_of(z, pp);
            const double nx = vec_norm(xn, p);
            if (nx == 0)
                break;
            xn /= nx;
            const double val = ratio(A, xn, p, q);
            best = std::max(best, val);
            if ((xn - x).norm() < 1e-12)
                break;
            x = std::move(xn);
        }
    }
    return {best, true};
}

BlockNorm block_norm(const CMat& K, const Vec& mu_in, const Vec& mu_out, const std::vector<PointId>& cols,
                     const std::vector<PointId>& rows, double p, double q, std::uint64_t seed) {
    if (cols.empty() || rows.empty())
        throw InvalidArgument("empty ball in block norm");
    if (mu_in.size() != K.cols() || mu_out.size() != K.rows())
        throw InvalidArgument("measure sizes do not match the operator");
    CMat A(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
    const double ip = inv(p), iq = inv(q);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const double wc = std::pow(mu_in[cols[j]], -ip);
        for (std::size_t i = 0; i < rows.size(); ++i)
            A(Eigen::Index(i), Eigen::Index(j)) = K(rows[i], cols[j]) * wc * std::pow(mu_out[rows[i]], iq);
    }
    return matrix_norm(A, p, q, seed);
}

BlockNorm block_norm(const Mat& K, const Vec& mu_in, const Vec& mu_out, const std::vector<PointId>& cols,
                     const std::vector<PointId>& rows, double p, double q, std::uint64_t seed) {
    if (p == 2 && q == 2) {
        if (cols.empty() || rows.empty())
            throw InvalidArgument("empty ball in block norm");
        if (mu_in.size() != K.cols() || mu_out.size() != K.rows())
            throw InvalidArgument("measure sizes do not match the operator");
        Mat A(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows.size(); ++i)
                A(Eigen::Index(i), Eigen::Index(j)) =
                    K(rows[i], cols[j]) * std::sqrt(mu_out[rows[i]] / mu_in[cols[j]]);
        return {spectral_norm(A), false};
    }
    return block_norm(CMat(K.cast<cdouble>()), mu_in, mu_out, cols, rows, p, q, seed);
}

namespace {

std::vector<PointId> all_points(Eigen::Index n) {
    std::vector<PointId> v(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        v[std::size_t(i)] = i;
    return v;
}

}  // namespace

BlockNorm operator_norm(const CMat& K, const Vec& mu, double p, double q, std::uint64_t seed) {
    return block_norm(K, mu, mu, all_points(K.cols()), all_points(K.rows()), p, q, seed);
}

BlockNorm operator_norm(const Mat& K, const Vec& mu, double p, double q, std::uint64_t seed) {
    return block_norm(K, mu, mu, all_points(K.cols()), all_points(K.rows()), p, q, seed);
}

}  // namespace psdocalc
