#include "psdocalc/bmo.hpp"

#include "psdocalc/parallel.hpp"
#include "psdocalc/psido.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace psdocalc {

std::vector<double> default_bmo_radii(const MetricMeasureSpace& space) {
    return geometric_grid(1.0, std::max(1.0, double(space.diameter())), 4);
}

int default_bmo_M(double n) { return int(std::ceil(n / 4)) + 1; }

BMOData bmo_norm(const SpectralData& sd, const MetricMeasureSpace& space, const CVec& f, int M,
                 const std::vector<double>& radii) {
    if (M < 1)
        throw InvalidArgument("BMO order M must be >= 1");
    if (radii.empty())
        throw InvalidArgument("empty radius grid");
    if (f.size() != space.size() || sd.size() != space.size())
        throw InvalidArgument("size mismatch between f, spectral data and space");
    for (double r : radii)
        if (!(r > 0) || r > space.diameter() * (1 + 1e-12) + 1e-12)
            throw InvalidArgument("radius " + std::to_string(r) + " outside (0, diameter]");
    const PointId n = space.size();
    BMOData out;
    out.M = M;
    out.radii = radii;
    out.oscillation = Mat::Zero(n, PointId(radii.size()));
    const Vec& mu = space.measure();
    parallel_for(radii.size(), [&](std::size_t j) {
        const double r = radii[j];
        const Vec Fk = sd.tabulate([&](double lam) { return std::pow(1 - std::exp(-r * r * lam), M); });
        const Vec g2 = sd.apply_values(Fk, f).cwiseAbs2();
        for (PointId x = 0; x < n; ++x) {
            double num = 0, den = 0;
            for (PointId y = 0; y < n; ++y)
                if (space.dist(x, y) < r) {
                    num += mu[y] * g2[y];
                    den += mu[y];
                }
            out.oscillation(x, PointId(j)) = std::sqrt(num / den);
        }
    });
    Eigen::Index row = 0, col = 0;
    out.norm = out.oscillation.maxCoeff(&row, &col);
    out.argmax_center = row;
    out.argmax_radius = radii[std::size_t(col)];
    return out;
}

BMOData bmo_norm(const SpectralData& sd, const MetricMeasureSpace& space, const Vec& f, int M,
                 const std::vector<double>& radii) {
    return bmo_norm(sd, space, CVec(f.cast<cdouble>()), M, radii);
}

Vec psi_semigroup_apply(const SpectralData& sd, double t, int M, const Vec& f) {
    return sd.apply_values(sd.tabulate([&](double lam) { return std::pow(t * lam, M) * std::exp(-t * lam); }), f);
}

T1Result t1_test(const Symbol& sigma, const SelfAdjointOperator& op, const SpectralData& sd,
                 const MetricMeasureSpace& space, int M, const SeminormOptions& opt) {
    const double scale = std::max(1.0, op.matrix.cwiseAbs().maxCoeff());
    if (constants_defect(op) > 1e-10 * scale)
        throw InvalidArgument("T(1) test needs L(1) = 0; ||L 1||_inf = " + std::to_string(constants_defect(op)));
    const PsdoKernel k = kernel_matrix(sigma, sd);
    T1Result out;
    out.t_star_one = k.adjoint() * CVec::Ones(sd.size());
    out.bmo_t1 = bmo_norm(sd, space, out.t_star_one, M, default_bmo_radii(space)).norm;
    out.l2_norm = operator_norm(k.K, sd.measure, 2, 2).value;
    out.seminorms = seminorm(sigma, &sd, opt);
    return out;
}

void write_correlation_csv(const std::vector<CorrelationRecord>& records, std::ostream& os) {
    os << "symbol_id,opnorm2,bmo_t1,seminorm_sum\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, ",%.12e,%.12e,%.12e\n", r.opnorm2, r.bmo_t1, r.seminorm_sum);
        os << r.symbol_id << buf;
    }
}

ScaleGrid default_paraproduct_grid(const SpectralData& sd) {
    const double lmax = sd.lambda_max();
    if (!(lmax > 1))
        throw InvalidArgument("paraproduct grid needs lambda_max > 1");
    return geometric_scale_grid(1.0 / lmax, 1.0, 8);
}

namespace {

void check_grid(const ScaleGrid& grid, int M) {
    if (grid.t.empty())
        throw InvalidArgument("empty t grid");
    if (M < 1)
        throw InvalidArgument("paraproduct order M must be >= 1");
}

// Column j: e^{-t_j L} g.
Mat smoothed(const SpectralData& sd, const Vec& g, const ScaleGrid& grid) {
    Mat H(sd.size(), PointId(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        H.col(PointId(j)) = semigroup_apply(sd, grid.t[j], g);
    return H;
}

}  // namespace

Vec paraproduct(const SpectralData& sd, const Vec& g, const Vec& f, int M, const ScaleGrid& grid) {
    check_grid(grid, M);
    const Mat H = smoothed(sd, g, grid);
    Vec out = Vec::Zero(sd.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
        out += grid.w[j] * H.col(PointId(j)).cwiseProduct(psi_semigroup_apply(sd, grid.t[j], M, f));
    return out;
}

Mat paraproduct_matrix(const SpectralData& sd, const Vec& g, int M, const ScaleGrid& grid) {
    check_grid(grid, M);
    const Mat H = smoothed(sd, g, grid);
    Mat out = Mat::Zero(sd.size(), sd.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.t[j];
        const Mat P = sd.matrix_of(sd.tabulate([&](double lam) { return std::pow(t * lam, M) * std::exp(-t * lam); }));
        out += grid.w[j] * H.col(PointId(j)).asDiagonal() * P;
    }
    return out;
}

Symbol symbol_of_paraproduct(const SpectralData& sd, const Vec& g, int M, const ScaleGrid& grid) {
    check_grid(grid, M);
    const Mat H = smoothed(sd, g, grid);
    auto fn = [H, grid, M](PointId x, double xi) {
        double s = 0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double u = grid.t[j] * xi;
            s += grid.w[j] * H(x, PointId(j)) * std::pow(u, M) * std::exp(-u);
        }
        return cdouble(s);
    };
    return Symbol(fn, ClassParams{0, 1, 1, 2}, SymbolSource::table, "paraproduct symbol", true);
}

}  // namespace psdocalc
