#include "psdocalc/psido.hpp"

#include "psdocalc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace psdocalc {

CMat mu_adjoint(const CMat& K, const Vec& mu) {
    return mu.cwiseInverse().cast<cdouble>().asDiagonal() * K.adjoint() * mu.cast<cdouble>().asDiagonal();
}

CMat PsdoKernel::adjoint() const { return mu_adjoint(K, measure); }

namespace {

// Real values of an x-independent table, if it is one.
std::optional<Vec> multiplier_row(const CMat& S) {
    if (S.rows() == 0 || S.imag().cwiseAbs().maxCoeff() != 0)
        return std::nullopt;
    for (Eigen::Index x = 1; x < S.rows(); ++x)
        if (S.row(x) != S.row(0))
            return std::nullopt;
    return Vec(S.row(0).real().transpose());
}

}  // namespace

CVec apply(const Symbol& sigma, const SpectralData& sd, const CVec& f) {
    const CMat S = sigma.on_spectrum(sd);
    if (auto F = multiplier_row(S))
        return sd.apply_values(*F, f);
    const CVec c = sd.coefficients(f);
    return S.cwiseProduct(sd.eigenvectors.cast<cdouble>()) * c;
}

CVec apply(const Symbol& sigma, const SpectralData& sd, const Vec& f) {
    const CMat S = sigma.on_spectrum(sd);
    if (auto F = multiplier_row(S))
        return sd.apply_values(*F, f).cast<cdouble>();
    return S.cwiseProduct(sd.eigenvectors.cast<cdouble>()) * sd.coefficients(CVec(f.cast<cdouble>()));
}

PsdoKernel kernel_matrix(const Symbol& sigma, const SpectralData& sd) {
    if (sd.size() > kDenseKernelBudget)
        throw InvalidArgument("kernel materialization exceeds the dense budget of " +
                              std::to_string(kDenseKernelBudget) + " points");
    const CMat S = sigma.on_spectrum(sd);
    const CMat SU = S.cwiseProduct(sd.eigenvectors.cast<cdouble>());
    PsdoKernel k;
    k.measure = sd.measure;
    k.K = SU * (sd.eigenvectors.transpose() * sd.measure.asDiagonal()).cast<cdouble>();
    return k;
}

namespace {

double smallest_node(const ElementaryDecomposition& d) { return *std::min_element(d.grid.t.begin(), d.grid.t.end()); }

}  // namespace

CVec apply_truncated(const ElementaryDecomposition& d, const SpectralData& sd, const CVec& f, double eps) {
    if (sd.size() != d.npoints)
        throw InvalidArgument("decomposition and spectral data have different sizes");
    const double lo = smallest_node(d);
    if (!(eps >= lo * (1 - 1e-12)) || !(eps <= d.grid.t_max * (1 + 1e-12)))
        throw InvalidArgument("eps = " + std::to_string(eps) + " lies outside the t grid [" + std::to_string(lo) +
                              ", " + std::to_string(d.grid.t_max) + "]");
    const PointId n = sd.size();
    const CVec c = sd.coefficients(f);
    const Mat& U = sd.eigenvectors;
    CVec out = CVec::Zero(n);
    for (PointId k = 0; k < n; ++k) {
        const double lam = sd.eigenvalues[k];
        if (d.partition->phi(lam) == 0)
            continue;
        for (PointId x = 0; x < n; ++x)
            out[x] += d.tau(x, lam) * U(x, k) * c[k];
    }
    for (std::size_t j = 0; j < d.grid.size(); ++j) {
        const double t = d.grid.t[j];
        if (t < eps * (1 - 1e-12))
            continue;
        std::vector<PointId> ks;
        for (PointId k = 0; k < n; ++k)
            if (d.partition->psi_tilde(t * sd.eigenvalues[k]) != 0)
                ks.push_back(k);
        if (ks.empty())
            continue;
        for (int l = -d.l_max; l <= d.l_max; ++l) {
            CVec v = CVec::Zero(n);
            for (PointId k : ks) {
                const cdouble ck = c[k] * std::polar(1.0, 2 * std::numbers::pi * l * t * sd.eigenvalues[k]);
                v += ck * U.col(k);
            }
            for (PointId x = 0; x < n; ++x)
                out[x] += d.grid.w[j] * d.gamma_at(l, j, x) * v[x];
        }
    }
    return out;
}

std::vector<double> truncation_sweep(const ElementaryDecomposition& d, const SpectralData& sd, const CVec& f) {
    std::vector<double> out;
    const double lo = smallest_node(d);
    for (double eps = 0.5; eps / 2 >= lo * (1 - 1e-12); eps /= 2)
        out.push_back((apply_truncated(d, sd, f, eps) - apply_truncated(d, sd, f, eps / 2)).norm());
    return out;
}

BlockNorm opnorm(const Symbol& sigma, const SpectralData& sd, double p, std::uint64_t seed) {
    return operator_norm(kernel_matrix(sigma, sd).K, sd.measure, p, p, seed);
}

BlockNorm adjoint_defect(const Symbol& sigma, const SpectralData& sd, double p, std::uint64_t seed) {
    const CMat T = kernel_matrix(sigma, sd).adjoint() - kernel_matrix(sigma.conj(), sd).K;
    return operator_norm(T, sd.measure, p, p, seed);
}

ScaleDefect per_scale_defect(const std::function<Vec(double)>& gamma_t,
                             const std::function<double(double, double)>& psi_t, const SpectralData& sd,
                             const std::vector<double>& t_grid, double p) {
    if (t_grid.size() < 2)
        throw InvalidArgument("per-scale defect needs at least two scales");
    ScaleDefect out;
    out.t = t_grid;
    out.norms = parallel_map<double>(t_grid.size(), [&](std::size_t i) {
        const double t = t_grid[i];
        const Vec g = gamma_t(t);
        const Mat P = sd.matrix_of(sd.tabulate([&](double lam) { return psi_t(t, lam); }));
        const CMat A = (g.asDiagonal() * P).cast<cdouble>();
        const CMat T = mu_adjoint(A, sd.measure) - A;
        return operator_norm(T, sd.measure, p, p, i).value;
    });
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        if (out.norms[i] > kNormFloor) {
            xs.push_back(std::log(t_grid[i]));
            ys.push_back(std::log(out.norms[i]));
        }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        out.slope = fit.slope;
        out.r2 = fit.r2;
    }
    return out;
}

Vec PsiTildeFamily::values(const SpectralData& sd, double t) const {
    Vec v = sd.tabulate([&](double lam) { return std::pow(t * lam, order) * std::exp(-t * lam); });
    const double mx = v.cwiseAbs().maxCoeff();
    if (mx > 0)
        v /= mx;
    return v;
}

namespace {

void check_admissible(double nu, double p, double n_growth) {
    const double threshold = n_growth * std::abs(1.0 / p - 0.5);
    if (!(nu > threshold))
        throw InvalidArgument("inadmissible nu = " + std::to_string(nu) + " (needs nu > n|1/p - 1/2| = " +
                              std::to_string(threshold) + ")");
}

DecayReport offdiag_core(const CMat& T, const SpectralData& sd, const MetricMeasureSpace& space, double t,
                         double nu, double p, double m, const PsdoOffdiagOptions& opt) {
    const double r = std::pow(t, 1 / m);
    auto pairs = ball_pair_grid(space, opt.base, r, opt.max_separation);
    if (pairs.empty())
        throw InvalidArgument("empty pair grid");
    return finalize_polynomial(measure_pairs(T, sd.measure, pairs, t, p, p, opt.seed), nu, m, opt.seed);
}

}  // namespace

DecayReport psdo_offdiag(const PsdoKernel& kernel, const SpectralData& sd, const MetricMeasureSpace& space,
                         const PsiTildeFamily& family, double t, double nu, double p, double m,
                         const PsdoOffdiagOptions& opt) {
    check_admissible(nu, p, opt.n_growth);
    if (!(family.order > nu / m))
        throw InvalidArgument("psi_tilde order " + std::to_string(family.order) + " does not satisfy eps2 > nu/m");
    if (!(t > 0))
        throw InvalidArgument("scale t must be positive");
    const Mat P = sd.matrix_of(family.values(sd, t));
    const CMat T = kernel.K * P.cast<cdouble>();
    return offdiag_core(T, sd, space, t, nu, p, m, opt);
}

DecayReport psdo_offdiag_bare(const PsdoKernel& kernel, const SpectralData& sd, const MetricMeasureSpace& space,
                              double nu, double p, const PsdoOffdiagOptions& opt) {
    check_admissible(nu, p, opt.n_growth);
    return offdiag_core(kernel.K, sd, space, 1.0, nu, p, 2.0, opt);
}

}  // namespace psdocalc
