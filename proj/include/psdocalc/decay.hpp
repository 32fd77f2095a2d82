#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/norms.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace psdocalc {

struct DecayRow {
    double t = 0.0;  // scale; the spatial scale is t^{1/m}
    int pair_id = 0;
    double distance = 0.0;
    double norm = 0.0;
    double model_bound = 0.0;
    double ratio = 0.0;              // norm / model_bound (volume factor included)
    double ratio_unnormalized = 0.0; // same without the volume factor
    double volume_factor = 1.0;      // μ(B1)^{1/q - 1/p}
    bool lower_bound = false;
};

enum class DecayModel { gaussian, polynomial };

/// Gaussian model: norm <= C vol e^{-c x^{m/(m-1)}}, x = d / t^{1/m}.
/// Polynomial model: norm <= C vol (1 + d / t^{1/m})^{-ν}.
/// C is reported as the max ratio against the model with unit constant.
struct DecayReport {
    DecayModel model = DecayModel::gaussian;
    std::vector<DecayRow> rows;
    double C = 0.0;
    double c = 0.0;         // fitted Gaussian rate (gaussian model)
    double exponent = 0.0;  // m/(m-1) for gaussian; fitted order for polynomial
    double target_order = 0.0;
    double r2 = 0.0;
    std::size_t fit_rows = 0;
    double max_ratio = 0.0;
    double max_ratio_unnormalized = 0.0;
    std::uint64_t seed = 0;
    bool lower_bound = false;
};

/// Rows with d > 0 and norm > floor enter the regression.
inline constexpr double kNormFloor = 1e-12;

DecayReport finalize_gaussian(std::vector<DecayRow> rows, double m, std::uint64_t seed);
DecayReport finalize_polynomial(std::vector<DecayRow> rows, double nu, double m, std::uint64_t seed);

/// Measures ||K||_{L^p(B1) -> L^q(B2)} for each pair, filling t, pair_id,
/// distance, norm, volume_factor and lower_bound. Parallel over pairs.
std::vector<DecayRow> measure_pairs(const Mat& K, const Vec& mu, const std::vector<BallPair>& pairs, double t,
                                    double p, double q, std::uint64_t seed);
std::vector<DecayRow> measure_pairs(const CMat& K, const Vec& mu, const std::vector<BallPair>& pairs, double t,
                                    double p, double q, std::uint64_t seed);

/// Single block: ||K||_{L^p(B1) -> L^q(B2)}.
BlockNorm offdiag_norm(const Mat& K, const Vec& mu, const Ball& b1, const Ball& b2, double p, double q,
                       std::uint64_t seed = 0);

struct HeatDecayOptions {
    double p = 2.0;
    double q = 2.0;
    double x_max = 6.0;  // largest d / t^{1/m} included
    PointId base = 0;
    std::uint64_t seed = 0;
};

/// Heat semigroup off-diagonal sweep with balls of radius t^{1/m} centred at
/// `base` and at points of increasing distance from it.
DecayReport heat_decay(const SpectralData& sd, const MetricMeasureSpace& space, const std::vector<double>& t_grid,
                       double m, const HeatDecayOptions& opt = {});

/// CSV schema `t,pair_id,distance,norm,model_bound,ratio`.
void write_decay_csv(const DecayReport& report, std::ostream& os);

std::string to_string(DecayModel m);

}  // namespace psdocalc
