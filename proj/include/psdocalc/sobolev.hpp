#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/norms.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace psdocalc {

enum class OperatorTag { L, Delta };

struct SobolevParams {
    double s = 0.0;
    double p = 2.0;
    OperatorTag op = OperatorTag::L;
    double m = 2.0;  // order of the tagged operator
};

/// ||(1 + A)^{s/m} f||_p for the operator A behind `sd`.
double sobolev_norm(const SpectralData& sd, const Vec& f, const SobolevParams& params);
double sobolev_norm(const SpectralData& sd, const CVec& f, const SobolevParams& params);

/// Norm of (1+Δ)^{s/2} T_σ (1+L)^{-(s+m_shift)/m} at p. Δ has order 2.
BlockNorm mapping_test(const Symbol& sigma, const SpectralData& sd_L, const SpectralData& sd_delta, double s,
                       double m_shift, double p, double m = 2.0, std::uint64_t seed = 0);

enum class CheckMode { sobolev, generalized_poincare, p2_poincare };

std::string to_string(CheckMode m);
CheckMode parse_check_mode(const std::string& s);

struct CheckOptions {
    int M0 = 2;                // sobolev mode
    std::vector<int> M{1, 2, 3, 4};  // generalized_poincare sweep
    double kappa = 1.0;
    int draws = 32;
    std::uint64_t seed = 7;
    std::vector<double> radii;  // empty: 4 per octave in [1, diameter]
};

struct Witness {
    PointId ball_center = 0;
    double radius = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// Smallest constant C for which the inequality holds on every probed ball
/// and draw; `witness` is the ball attaining it.
struct EmbeddingParams {
    CheckMode mode = CheckMode::sobolev;
    int M = 0;  // M0, or the Poincaré M
    double kappa = 0.0;
    double C = 0.0;
    Witness witness;
};

/// Band-limited draws: uniform coefficients in [-1, 1] on λ <= λ_max/4, columns are draws.
Mat band_limited_draws(const SpectralData& sd, int draws, std::uint64_t seed);

/// One entry per M for generalized_poincare, a single entry otherwise.
/// p2_poincare uses |∇f|^2(x) = 1/2 Σ_{y~x} |f(x) - f(y)|^2 and skips single-point balls.
std::vector<EmbeddingParams> embedding_poincare_check(const SpectralData& sd_delta, const MetricMeasureSpace& space,
                                                      CheckMode mode, const CheckOptions& opt = {});

/// Same inequality on the given draws (columns of F).
std::vector<EmbeddingParams> embedding_poincare_check(const SpectralData& sd_delta, const MetricMeasureSpace& space,
                                                      CheckMode mode, const CheckOptions& opt, const Mat& F);

/// CSV `ball_center,radius,lhs,rhs,ratio`.
void write_witness_csv(const std::vector<Witness>& rows, std::ostream& os);

}  // namespace psdocalc
