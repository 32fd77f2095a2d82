#include "psdocalc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psdocalc {

namespace {

constexpr double kWidth = 7.0 / 8.0;  // width of the smooth ramp in log2 ξ
constexpr double kBox = 1.0 / 8.0;    // box smoothing width
constexpr int kGaussNodes = 64;

double smooth_step(double x) {
    if (x <= 0)
        return 0.0;
    if (x >= 1)
        return 1.0;
    const double g = 1.0 / x - 1.0 / (1.0 - x);
    if (g > 700)
        return 0.0;
    if (g < -700)
        return 1.0;
    return 1.0 / (1.0 + std::exp(g));
}

double smooth_step_prime(double x) {
    if (x <= 0 || x >= 1)
        return 0.0;
    const double s = smooth_step(x);
    return s * (1 - s) * (1.0 / (x * x) + 1.0 / ((1 - x) * (1 - x)));
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1)
        throw InvalidArgument("gauss_legendre: n must be positive");
    nodes.assign(std::size_t(n), 0.0);
    weights.assign(std::size_t(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        nodes[std::size_t(i)] = -x;
        nodes[std::size_t(n - 1 - i)] = x;
        const double w = 2.0 / ((1 - x * x) * dp * dp);
        weights[std::size_t(i)] = weights[std::size_t(n - 1 - i)] = w;
    }
}

std::string to_string(EtaShape s) {
    switch (s) {
    case EtaShape::smooth_box: return "smooth_box";
    case EtaShape::smooth_plain: return "smooth_plain";
    case EtaShape::cubic: return "cubic";
    case EtaShape::linear: return "linear";
    }
    return "?";
}

EtaShape parse_eta_shape(const std::string& s) {
    if (s == "smooth_box") return EtaShape::smooth_box;
    if (s == "smooth_plain") return EtaShape::smooth_plain;
    if (s == "cubic") return EtaShape::cubic;
    if (s == "linear") return EtaShape::linear;
    throw InvalidArgument("unknown eta shape '" + s + "'");
}

ScaleGrid geometric_scale_grid(double t_min, double t_max, int q) {
    if (!(t_min > 0) || !(t_max > t_min))
        throw InvalidArgument("scale grid needs 0 < t_min < t_max");
    if (q < 1)
        throw InvalidArgument("scale grid needs q >= 1");
    ScaleGrid g;
    g.q = q;
    g.t_min = t_min;
    g.t_max = t_max;
    const int J = int(std::ceil(q * std::log2(t_max / t_min) - 1e-9));
    const double w = std::numbers::ln2 / q;
    for (int j = 0; j < J; ++j) {
        g.t.push_back(t_max * std::exp2(-(j + 0.5) / q));
        g.w.push_back(w);
    }
    return g;
}

PartitionOfUnity::PartitionOfUnity(int J, int points_per_octave, EtaShape shape)
    : J_(J), q_(points_per_octave), shape_(shape) {
    if (J < 1)
        throw InvalidArgument("partition of unity needs J >= 1");
    if (points_per_octave < 4)
        throw InvalidArgument("partition of unity needs >= 4 points per octave");
    gauss_legendre(kGaussNodes, gl_nodes_, gl_weights_);
    const double jump = eta_junction_jump([this](double xi) { return eta(xi); });
    if (jump > 1e-2)
        throw InvalidArgument("eta shape '" + to_string(shape) + "' is not smooth at the junctions (derivative jump " +
                              std::to_string(jump) + ")");
    for (double u : {0.25, 0.5, 0.99, 2.01, 3.0, 8.0})
        if (psi(u) != 0.0)
            throw NumericalError("psi support is not contained in [1,2]");
}

double PartitionOfUnity::step(double x) const {
    switch (shape_) {
    case EtaShape::smooth_plain: return smooth_step(x);
    case EtaShape::cubic: {
        const double c = std::clamp(x, 0.0, 1.0);
        return c * c * (3 - 2 * c);
    }
    case EtaShape::linear: return std::clamp(x, 0.0, 1.0);
    case EtaShape::smooth_box: break;
    }
    return smooth_step(x);
}

double PartitionOfUnity::step_prime(double x) const {
    switch (shape_) {
    case EtaShape::cubic: return (x <= 0 || x >= 1) ? 0.0 : 6 * x * (1 - x);
    case EtaShape::linear: return (x <= 0 || x >= 1) ? 0.0 : 1.0;
    default: return smooth_step_prime(x);
    }
}

double PartitionOfUnity::box_integral(double x) const {
    if (x <= 0)
        return 0.0;
    if (x >= kWidth)
        return kWidth / 2 + (x - kWidth);
    double acc = 0;
    for (std::size_t i = 0; i < gl_nodes_.size(); ++i)
        acc += gl_weights_[i] * smooth_step(0.5 * x * (1 + gl_nodes_[i]) / kWidth);
    return 0.5 * x * acc;
}

double PartitionOfUnity::eta(double xi) const {
    if (!(xi > 1))
        return 1.0;
    if (xi >= 2)
        return 0.0;
    if (shape_ == EtaShape::smooth_box) {
        const double v = std::log2(xi);
        return 1.0 - (box_integral(v) - box_integral(v - kBox)) / kBox;
    }
    return 1.0 - step(xi - 1);
}

double PartitionOfUnity::psi(double u) const {
    if (!(u > 1) || !(u < 2))
        return 0.0;
    if (shape_ == EtaShape::smooth_box) {
        const double v = std::log2(u);
        return (smooth_step(v / kWidth) - smooth_step((v - kBox) / kWidth)) / kBox / std::numbers::ln2;
    }
    return u * step_prime(u - 1);
}

double PartitionOfUnity::dyadic_sum(double xi) const {
    double s = 0;
    for (int j = -J_; j <= J_; ++j)
        s += delta(std::ldexp(xi, -j));
    return s;
}

double PartitionOfUnity::continuous_sum(double xi, const ScaleGrid& grid) const {
    double s = phi(xi);
    for (std::size_t j = 0; j < grid.size(); ++j)
        s += grid.w[j] * psi(grid.t[j] * xi);
    return s;
}

double eta_junction_jump(const std::function<double(double)>& eta) {
    constexpr double h = 1e-3;
    static constexpr double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    double worst = 0;
    for (double x0 : {1.0, 2.0})
        for (int k = 1; k <= 3; ++k) {
            double right = 0, left = 0;
            for (int i = 0; i <= k; ++i) {
                const double sign = ((k - i) % 2) ? -1.0 : 1.0;
                right += sign * binom[k][i] * eta(x0 + i * h);
                left += sign * binom[k][i] * eta(x0 - (k - i) * h);
            }
            worst = std::max(worst, std::abs(right - left) / std::pow(h, k));
        }
    return worst;
}

Vec multiplier_apply(const SpectralData& sd, const std::function<double(double)>& F, const Vec& f) {
    return sd.apply_values(sd.tabulate(F), f);
}

Mat multiplier_matrix(const SpectralData& sd, const std::function<double(double)>& F) {
    return sd.matrix_of(sd.tabulate(F));
}

McondProbe probe_mcond1(const MultiplierSpec& spec, double band_lo, double band_hi, int points) {
    if (!spec.F)
        throw InvalidArgument("multiplier spec has no function");
    if (!(band_lo > 0) || !(band_hi > band_lo) || points < 2)
        throw InvalidArgument("probe band must satisfy 0 < lo < hi");
    if (spec.beta_max < 0 || spec.beta_max > 4)
        throw InvalidArgument("probe supports beta_max in 0..4");
    McondProbe out;
    out.K_beta.assign(std::size_t(spec.beta_max) + 1, 0.0);
    const double rm = std::pow(spec.r, spec.m);
    for (int i = 0; i < points; ++i) {
        const double xi = band_lo * std::pow(band_hi / band_lo, double(i) / (points - 1));
        const double weight = std::min(1.0, std::pow(rm * xi, spec.N));
        for (int b = 0; b <= spec.beta_max; ++b) {
            const double d = xi_derivative(spec.F, xi, b);
            const double v = std::abs(d) * std::pow(xi, b) / weight;
            out.K_beta[std::size_t(b)] = std::max(out.K_beta[std::size_t(b)], v);
        }
    }
    out.K = *std::max_element(out.K_beta.begin(), out.K_beta.end());
    out.ok = std::isfinite(out.K) && out.K <= spec.k_max;
    return out;
}

DecayReport multiplier_offdiag_check(const SpectralData& sd, const MetricMeasureSpace& space,
                                     const std::function<MultiplierSpec(double)>& family,
                                     const std::vector<double>& r_grid, double nu, double n_growth,
                                     const MultiplierCheckOptions& opt) {
    if (r_grid.empty())
        throw InvalidArgument("empty r grid");
    const double threshold = n_growth * std::abs(1.0 / opt.p - 0.5);
    if (!(nu > threshold))
        throw InvalidArgument("nu = " + std::to_string(nu) + " is below the threshold n|1/p - 1/2| = " +
                              std::to_string(threshold));
    std::vector<DecayRow> rows;
    double m = 2.0;
    int next_id = 0;
    for (double r : r_grid) {
        const MultiplierSpec spec = family(r);
        m = spec.m;
        if (!(spec.N > nu / spec.m))
            throw InvalidArgument("decay order N must exceed nu/m");
        const McondProbe probe = probe_mcond1(spec, sd.lambda_min_positive(), sd.lambda_max());
        if (!probe.ok)
            throw InvalidArgument("F fails the (m-cond1) probe at r = " + std::to_string(r) +
                                  " (K = " + std::to_string(probe.K) + ")");
        const Mat K = multiplier_matrix(sd, spec.F);
        const int max_sep = int(std::ceil(opt.x_max * r + 2 * r));
        auto pairs = ball_pair_grid(space, opt.base, r, max_sep);
        std::erase_if(pairs, [&](const BallPair& p) { return p.distance / r > opt.x_max; });
        if (pairs.empty())
            throw InvalidArgument("empty pair grid");
        for (auto& row : measure_pairs(K, sd.measure, pairs, std::pow(r, spec.m), opt.p, opt.p, opt.seed)) {
            row.pair_id = next_id++;
            rows.push_back(row);
        }
    }
    return finalize_polynomial(std::move(rows), nu, m, opt.seed);
}

AlmostOrthogonality almost_orthogonality(const SpectralData& sd, const std::function<double(double, double)>& psi_s,
                                         const std::function<double(double, double)>& psi_tilde_t, double t,
                                         const std::vector<double>& ratios) {
    AlmostOrthogonality out;
    std::vector<double> xs, ys;
    for (double ratio : ratios) {
        const double s = ratio * t;
        double nrm = 0;
        for (Eigen::Index k = 0; k < sd.size(); ++k) {
            const double lam = sd.eigenvalues[k];
            nrm = std::max(nrm, std::abs(psi_s(s, lam) * psi_tilde_t(t, lam)));
        }
        out.ratios.push_back(ratio);
        out.norms.push_back(nrm);
        if (ratio <= 1 && nrm > kNormFloor) {
            xs.push_back(std::log(ratio));
            ys.push_back(std::log(nrm));
        }
    }
    if (xs.size() >= 2) {
        const LineFit fit = fit_line(xs, ys);
        out.slope = fit.slope;
        out.r2 = fit.r2;
    }
    return out;
}

}  // namespace psdocalc
