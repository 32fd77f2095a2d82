#include "psdocalc/sobolev.hpp"

#include "psdocalc/parallel.hpp"
#include "psdocalc/psido.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <random>

namespace psdocalc {

namespace {

Vec bessel_values(const SpectralData& sd, double power) {
    return sd.tabulate([&](double lam) { return std::pow(1 + lam, power); });
}

void check_params(const SobolevParams& p) {
    if (!(p.s >= 0))
        throw InvalidArgument("Sobolev order s must be >= 0");
    if (!(p.p >= 1))
        throw InvalidArgument("p must be in [1, inf]");
    if (!(p.m > 0))
        throw InvalidArgument("operator order m must be positive");
}

}  // namespace

double sobolev_norm(const SpectralData& sd, const CVec& f, const SobolevParams& params) {
    check_params(params);
    if (params.s == 0)
        return lp_norm(f, sd.measure, params.p);
    return lp_norm(sd.apply_values(bessel_values(sd, params.s / params.m), f), sd.measure, params.p);
}

double sobolev_norm(const SpectralData& sd, const Vec& f, const SobolevParams& params) {
    return sobolev_norm(sd, CVec(f.cast<cdouble>()), params);
}

BlockNorm mapping_test(const Symbol& sigma, const SpectralData& sd_L, const SpectralData& sd_delta, double s,
                       double m_shift, double p, double m, std::uint64_t seed) {
    if (sd_L.size() != sd_delta.size())
        throw InvalidArgument("L and Delta live on different spaces");
    if (!((sd_L.measure - sd_delta.measure).cwiseAbs().maxCoeff() <= 1e-12 * sd_L.measure.cwiseAbs().maxCoeff()))
        throw InvalidArgument("L and Delta use different measures");
    const CMat K = kernel_matrix(sigma, sd_L).K;
    const Mat left = sd_delta.matrix_of(bessel_values(sd_delta, s / 2));
    const Mat right = sd_L.matrix_of(bessel_values(sd_L, -(s + m_shift) / m));
    const CMat T = left.cast<cdouble>() * K * right.cast<cdouble>();
    return operator_norm(T, sd_L.measure, p, p, seed);
}

std::string to_string(CheckMode m) {
    switch (m) {
    case CheckMode::sobolev: return "sobolev";
    case CheckMode::generalized_poincare: return "generalized_poincare";
    case CheckMode::p2_poincare: return "p2_poincare";
    }
    return "?";
}

CheckMode parse_check_mode(const std::string& s) {
    if (s == "sobolev")
        return CheckMode::sobolev;
    if (s == "generalized_poincare" || s == "generalized-poincare")
        return CheckMode::generalized_poincare;
    if (s == "p2_poincare" || s == "p2-poincare")
        return CheckMode::p2_poincare;
    throw InvalidArgument("unknown check mode '" + s + "' (sobolev, generalized_poincare, p2_poincare)");
}

Mat band_limited_draws(const SpectralData& sd, int draws, std::uint64_t seed) {
    if (draws < 1)
        throw InvalidArgument("need at least one draw");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double cut = sd.lambda_max() / 4;
    Mat C = Mat::Zero(sd.size(), draws);
    for (int d = 0; d < draws; ++d)
        for (PointId k = 0; k < sd.size(); ++k) {
            const double c = unif(rng);
            if (sd.eigenvalues[k] <= cut)
                C(k, d) = c;
        }
    return sd.eigenvectors * C;
}

namespace {

struct Best {
    double C = 0.0;
    Witness w;
    std::mutex mu;

    void offer(PointId x, double r, double lhs, double rhs) {
        if (!(lhs > 1e-13))
            return;
        const double ratio = rhs > 0 ? lhs / rhs : HUGE_VAL;
        std::lock_guard lock(mu);
        if (ratio > C) {
            C = ratio;
            w = {x, r, lhs, rhs, ratio};
        }
    }
};

// μ-weighted averages of |G|^power over open balls B(x, R), one entry per draw.
struct ShellSums {
    Mat sums;  // (diameter+1) x draws: Σ_{d(x,y) <= k} μ(y) v(y)
    Vec vol;   // Σ_{d(x,y) <= k} μ(y)

    ShellSums(const MetricMeasureSpace& space, PointId x, const Mat& V) {
        const int D = space.diameter();
        sums = Mat::Zero(D + 1, V.cols());
        vol = Vec::Zero(D + 1);
        for (PointId y = 0; y < space.size(); ++y) {
            const int k = space.dist(x, y);
            sums.row(k) += space.measure(y) * V.row(y);
            vol[k] += space.measure(y);
        }
        for (int k = 1; k <= D; ++k) {
            sums.row(k) += sums.row(k - 1);
            vol[k] += vol[k - 1];
        }
    }

    static int last_shell(double R, int D) { return std::min(D, int(std::ceil(R)) - 1); }

    Eigen::RowVectorXd avg(double R, int D) const {
        const int k = last_shell(R, D);
        return sums.row(k) / vol[k];
    }
};

std::vector<double> check_radii(const MetricMeasureSpace& space, const CheckOptions& opt) {
    if (!opt.radii.empty())
        return opt.radii;
    return geometric_grid(1.0, std::max(1.0, double(space.diameter())), 4);
}

EmbeddingParams sobolev_check(const SpectralData& sd, const MetricMeasureSpace& space, const CheckOptions& opt,
                              const Mat& F) {
    const int D = space.diameter();
    Best best;
    for (double r : check_radii(space, opt)) {
        const double t = r * r;
        const Mat G = sd.apply_values_matrix(sd.tabulate([&](double lam) { return std::pow(1 + t * lam, opt.M0); }),
                                             F)
                          .cwiseAbs();
        parallel_for(std::size_t(space.size()), [&](std::size_t xi) {
            const PointId x = PointId(xi);
            const ShellSums sh(space, x, G);
            Eigen::RowVectorXd lhs = Eigen::RowVectorXd::Zero(F.cols());
            for (PointId y = 0; y < space.size(); ++y)
                if (space.dist(x, y) < r)
                    lhs = lhs.cwiseMax(F.row(y).cwiseAbs());
            Eigen::RowVectorXd rhs = Eigen::RowVectorXd::Zero(F.cols());
            for (int i = 0;; ++i) {
                const double R = std::ldexp(r, i);
                rhs += std::pow(2.0, -i * opt.kappa) * sh.avg(R, D);
                if (ShellSums::last_shell(R, D) >= D)
                    break;
            }
            for (Eigen::Index d = 0; d < F.cols(); ++d)
                best.offer(x, r, lhs[d], rhs[d]);
        });
    }
    EmbeddingParams out;
    out.mode = CheckMode::sobolev;
    out.M = opt.M0;
    out.kappa = opt.kappa;
    out.C = best.C;
    out.witness = best.w;
    return out;
}

EmbeddingParams generalized_poincare_check(const SpectralData& sd, const MetricMeasureSpace& space,
                                           const CheckOptions& opt, const Mat& F, int M) {
    const int D = space.diameter();
    const Vec& mu = space.measure();
    Best best;
    for (double r : check_radii(space, opt)) {
        const double t = r * r;
        const Mat G2 = sd.apply_values_matrix(sd.tabulate([&](double lam) { return std::pow(1 + t * lam, M); }), F)
                           .cwiseAbs2();
        const Mat DG2 =
            sd.apply_values_matrix(sd.tabulate([&](double lam) { return lam * std::pow(1 + t * lam, M); }), F)
                .cwiseAbs2();
        parallel_for(std::size_t(space.size()), [&](std::size_t xi) {
            const PointId x = PointId(xi);
            const ShellSums sg(space, x, G2), sdg(space, x, DG2);
            Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(F.cols());
            double vol = 0;
            for (PointId y = 0; y < space.size(); ++y)
                if (space.dist(x, y) < r) {
                    avg += mu[y] * F.row(y);
                    vol += mu[y];
                }
            avg /= vol;
            Eigen::RowVectorXd lhs = Eigen::RowVectorXd::Zero(F.cols());
            for (PointId y = 0; y < space.size(); ++y)
                if (space.dist(x, y) < 2 * r)
                    lhs = lhs.cwiseMax((F.row(y) - avg).cwiseAbs());
            Eigen::RowVectorXd rhs = Eigen::RowVectorXd::Zero(F.cols());
            for (int i = 0;; ++i) {
                const double R = std::ldexp(r, i);
                rhs += std::pow(2.0, -i * opt.kappa) *
                       (sdg.avg(R, D).array().sqrt().sqrt() * sg.avg(R, D).array().sqrt().sqrt()).matrix();
                if (ShellSums::last_shell(R, D) >= D)
                    break;
            }
            rhs *= r;
            for (Eigen::Index d = 0; d < F.cols(); ++d)
                best.offer(x, r, lhs[d], rhs[d]);
        });
    }
    EmbeddingParams out;
    out.mode = CheckMode::generalized_poincare;
    out.M = M;
    out.kappa = opt.kappa;
    out.C = best.C;
    out.witness = best.w;
    return out;
}

EmbeddingParams p2_poincare_check(const MetricMeasureSpace& space, const CheckOptions& opt, const Mat& F) {
    const Vec& mu = space.measure();
    Mat grad2 = Mat::Zero(F.rows(), F.cols());
    for (PointId x = 0; x < space.size(); ++x)
        for (PointId y : space.neighbors(x))
            grad2.row(x) += 0.5 * (F.row(x) - F.row(y)).cwiseAbs2();
    Best best;
    for (double r : check_radii(space, opt)) {
        parallel_for(std::size_t(space.size()), [&](std::size_t xi) {
            const PointId x = PointId(xi);
            const Ball b = make_ball(space, x, r);
            if (b.members.size() < 2)
                return;
            Eigen::RowVectorXd avg = Eigen::RowVectorXd::Zero(F.cols()), g = avg;
            double vol = 0;
            for (PointId y : b.members) {
                avg += mu[y] * F.row(y);
                g += mu[y] * grad2.row(y);
                vol += mu[y];
            }
            avg /= vol;
            Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(F.cols());
            for (PointId y : b.members)
                var += mu[y] * (F.row(y) - avg).cwiseAbs2();
            for (Eigen::Index d = 0; d < F.cols(); ++d)
                best.offer(x, r, std::sqrt(var[d] / vol), r * std::sqrt(g[d] / vol));
        });
    }
    EmbeddingParams out;
    out.mode = CheckMode::p2_poincare;
    out.M = 0;
    out.C = best.C;
    out.witness = best.w;
    return out;
}

}  // namespace

std::vector<EmbeddingParams> embedding_poincare_check(const SpectralData& sd_delta, const MetricMeasureSpace& space,
                                                      CheckMode mode, const CheckOptions& opt, const Mat& F) {
    if (sd_delta.size() != space.size() || F.rows() != space.size())
        throw InvalidArgument("size mismatch between operator, space and draws");
    if (!(opt.kappa > 0))
        throw InvalidArgument("kappa must be positive");
    switch (mode) {
    case CheckMode::sobolev:
        if (opt.M0 < 0 || opt.M0 > 8)
            throw InvalidArgument("M0 must be in [0, 8]");
        return {sobolev_check(sd_delta, space, opt, F)};
    case CheckMode::generalized_poincare: {
        std::vector<EmbeddingParams> out;
        for (int M : opt.M) {
            if (M < 1 || M > 8)
                throw InvalidArgument("Poincare M must be in [1, 8]");
            out.push_back(generalized_poincare_check(sd_delta, space, opt, F, M));
        }
        return out;
    }
    case CheckMode::p2_poincare: return {p2_poincare_check(space, opt, F)};
    }
    return {};
}

std::vector<EmbeddingParams> embedding_poincare_check(const SpectralData& sd_delta, const MetricMeasureSpace& space,
                                                      CheckMode mode, const CheckOptions& opt) {
    return embedding_poincare_check(sd_delta, space, mode, opt, band_limited_draws(sd_delta, opt.draws, opt.seed));
}

void write_witness_csv(const std::vector<Witness>& rows, std::ostream& os) {
    os << "ball_center,radius,lhs,rhs,ratio\n";
    char buf[160];
    for (const auto& w : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%.10g,%.12e,%.12e,%.12e\n", static_cast<long long>(w.ball_center),
                      w.radius, w.lhs, w.rhs, w.ratio);
        os << buf;
    }
}

}  // namespace psdocalc
