#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace psdocalc {

/// Relative-step central difference of order 0..4 with one Richardson step.
/// `f` may return double, Vec or CVec. Requires x > 0.
template <class F>
auto xi_derivative(F&& f, double x, int order) -> decltype(f(x)) {
    static constexpr std::array<int, 5> kStepExp{0, 17, 10, 7, 5};
    if (order < 0 || order > 4)
        throw InvalidArgument("derivative order must lie in 0..4");
    if (order == 0)
        return f(x);
    using R = decltype(f(x));
    auto central = [&](double h) -> R {
        static constexpr std::array<std::array<double, 5>, 5> binom{
            {{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}}};
        R acc = f(x + (0.5 * order) * h) * 0.0;
        for (int i = 0; i <= order; ++i) {
            const double c = binom[std::size_t(order)][std::size_t(i)] * ((i % 2) ? -1.0 : 1.0);
            acc = acc + f(x + (0.5 * order - i) * h) * c;
        }
        return acc * (1.0 / std::pow(h, order));
    };
    const double h = x * std::exp2(-kStepExp[std::size_t(order)]);
    const R coarse = central(h);
    const R fine = central(0.5 * h);
    return fine * (4.0 / 3.0) - coarse * (1.0 / 3.0);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Shape of the cutoff η. `smooth_box` is the default (see README); the other
/// smooth option is the plain e^{-1/x} step on [1,2]. `cubic` and `linear`
/// exist to exercise the smoothness probe and are rejected at construction.
enum class EtaShape { smooth_box, smooth_plain, cubic, linear };

std::string to_string(EtaShape s);
EtaShape parse_eta_shape(const std::string& s);

/// Midpoint rule in log t: t_j = t_max 2^{-(j+1/2)/q}, weight ln2/q, with
/// enough nodes to reach below t_min.
struct ScaleGrid {
    std::vector<double> t;
    std::vector<double> w;
    int q = 8;
    double t_min = 0.0;
    double t_max = 1.0;

    std::size_t size() const { return t.size(); }
};

ScaleGrid geometric_scale_grid(double t_min, double t_max, int q);

class PartitionOfUnity {
public:
    PartitionOfUnity(int J = 8, int points_per_octave = 8, EtaShape shape = EtaShape::smooth_box);

    double eta(double xi) const;
    double delta(double xi) const { return eta(xi) - eta(2 * xi); }
    /// ψ(u) = -u η'(u), supported in [1,2].
    double psi(double u) const;
    double phi(double xi) const { return eta(xi); }
    /// Indicator of [1,2]; equals 1 on supp ψ.
    double psi_tilde(double u) const { return (u >= 1 && u <= 2) ? 1.0 : 0.0; }

    /// Σ_{j=-J}^{J} δ(2^{-j} ξ), summed term by term.
    double dyadic_sum(double xi) const;
    /// Σ_j w_j ψ(t_j ξ) + φ(ξ).
    double continuous_sum(double xi, const ScaleGrid& grid) const;

    /// Scale grid with q = points_per_octave over [t_min, 1].
    ScaleGrid grid(double t_min) const { return geometric_scale_grid(t_min, 1.0, q_); }

    int J() const { return J_; }
    int points_per_octave() const { return q_; }
    EtaShape shape() const { return shape_; }

private:
    double step(double x) const;       // profile on [0,1]
    double step_prime(double x) const; // its derivative (plain profiles)
    double box_integral(double x) const;

    int J_;
    int q_;
    EtaShape shape_;
    std::vector<double> gl_nodes_, gl_weights_;
};

/// Max jump of the one-sided derivatives (orders 1..3) of η at ξ = 1 and ξ = 2.
double eta_junction_jump(const std::function<double(double)>& eta);

/// F(L) f = Σ_k F(λ_k) ⟨f,u_k⟩_μ u_k.
Vec multiplier_apply(const SpectralData& sd, const std::function<double(double)>& F, const Vec& f);
Mat multiplier_matrix(const SpectralData& sd, const std::function<double(double)>& F);

struct MultiplierSpec {
    std::function<double(double)> F;
    double r = 1.0;
    double N = 1.0;
    int beta_max = 4;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double nu = 0.0;
    double m = 2.0;
    double k_max = 1e6;  // probe fails above this constant
};

struct McondProbe {
    double K = 0.0;
    std::vector<double> K_beta;
    bool ok = false;
};

/// sup over a log grid of the band of |∂^β F(ξ)| ξ^β / min(1, (r^m ξ)^N), β <= beta_max.
McondProbe probe_mcond1(const MultiplierSpec& spec, double band_lo, double band_hi, int points = 512);

struct MultiplierCheckOptions {
    double p = 2.0;
    double x_max = 16.0;  // largest d / r in the pair grid
    PointId base = 0;
    std::uint64_t seed = 0;
};

/// Off-diagonal decay of F_r(L) between balls of radius r, one polynomial model
/// (1 + d/r)^{-ν} with a single constant across the r grid. Rows carry t = r^m.
DecayReport multiplier_offdiag_check(const SpectralData& sd, const MetricMeasureSpace& space,
                                     const std::function<MultiplierSpec(double)>& family,
                                     const std::vector<double>& r_grid, double nu, double n_growth,
                                     const MultiplierCheckOptions& opt = {});

struct AlmostOrthogonality {
    std::vector<double> ratios;  // s/t
    std::vector<double> norms;   // ||ψ_s(L) ψ̃_t(L)||_{2->2}
    double slope = 0.0;          // of log norm vs log(s/t) on ratios <= 1
    double r2 = 0.0;
};

AlmostOrthogonality almost_orthogonality(const SpectralData& sd, const std::function<double(double, double)>& psi_s,
                                         const std::function<double(double, double)>& psi_tilde_t, double t,
                                         const std::vector<double>& ratios);

}  // namespace psdocalc
