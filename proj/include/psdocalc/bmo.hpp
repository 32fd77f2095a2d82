#pragma once

#include "psdocalc/calculus.hpp"
#include "psdocalc/common.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace psdocalc {

/// Oscillations (avg_B |(I - e^{-r^2 L})^M f|^2)^{1/2} over centers x radii.
struct BMOData {
    int M = 1;
    std::vector<double> radii;
    Mat oscillation;  // rows: centers (all points), cols: radii
    double norm = 0.0;
    PointId argmax_center = 0;
    double argmax_radius = 0.0;
};

/// 4 radii per octave from 1 to the diameter.
std::vector<double> default_bmo_radii(const MetricMeasureSpace& space);

/// ceil(n/4) + 1.
int default_bmo_M(double n);

BMOData bmo_norm(const SpectralData& sd, const MetricMeasureSpace& space, const CVec& f, int M,
                 const std::vector<double>& radii);
BMOData bmo_norm(const SpectralData& sd, const MetricMeasureSpace& space, const Vec& f, int M,
                 const std::vector<double>& radii);

/// Ψ(tL) f = (tL)^M e^{-tL} f.
Vec psi_semigroup_apply(const SpectralData& sd, double t, int M, const Vec& f);

struct T1Result {
    CVec t_star_one;
    double bmo_t1 = 0.0;
    double l2_norm = 0.0;
    SeminormTable seminorms;
};

/// T_σ^*(1) through the μ-adjoint kernel, its BMO_L norm, ||T_σ||_{2->2} and
/// seminorms against Δ = L. Requires ||L 1||_inf <= 1e-10 * ||L||.
T1Result t1_test(const Symbol& sigma, const SelfAdjointOperator& op, const SpectralData& sd,
                 const MetricMeasureSpace& space, int M, const SeminormOptions& opt = {});

struct CorrelationRecord {
    std::string symbol_id;
    double opnorm2 = 0.0;
    double bmo_t1 = 0.0;
    double seminorm_sum = 0.0;
};

/// CSV `symbol_id,opnorm2,bmo_t1,seminorm_sum`.
void write_correlation_csv(const std::vector<CorrelationRecord>& records, std::ostream& os);

/// Default paraproduct grid: t in [1/lambda_max, 1], 8 nodes per octave.
ScaleGrid default_paraproduct_grid(const SpectralData& sd);

/// Π_g f = Σ_j w_j (e^{-t_j L} g) · ((t_j L)^M e^{-t_j L} f).
Vec paraproduct(const SpectralData& sd, const Vec& g, const Vec& f, int M, const ScaleGrid& grid);
Mat paraproduct_matrix(const SpectralData& sd, const Vec& g, int M, const ScaleGrid& grid);

/// σ_g(x, ξ) = Σ_j w_j (e^{-t_j L} g)(x) (t_j ξ)^M e^{-t_j ξ}.
Symbol symbol_of_paraproduct(const SpectralData& sd, const Vec& g, int M, const ScaleGrid& grid);

}  // namespace psdocalc
