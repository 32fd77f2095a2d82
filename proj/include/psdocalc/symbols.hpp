#pragma once

#include "psdocalc/calculus.hpp"
#include "psdocalc/common.hpp"
#include "psdocalc/expr.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace psdocalc {

/// Class parameters of S^s_{ρ,δ} for an operator of order m.
struct ClassParams {
    double s = 0.0;
    double rho = 1.0;
    double delta = 0.0;
    double m = 2.0;
};

enum class SymbolSource { expression, builtin, table };
std::string to_string(SymbolSource s);

class Symbol {
public:
    using Fn = std::function<cdouble(PointId, double)>;

    Symbol(Fn fn, ClassParams params, SymbolSource source, std::string description, bool real = true);

    cdouble operator()(PointId x, double xi) const { return fn_(x, xi); }

    const ClassParams& params() const { return params_; }
    SymbolSource source() const { return source_; }
    const std::string& description() const { return description_; }
    bool is_real() const { return real_; }

    /// S(x, k) = σ(x, λ_k). Throws if any value is not finite.
    CMat on_spectrum(const SpectralData& sd) const;

    /// Values σ(·, ξ) over all points.
    CVec at(double xi, PointId npoints) const;

    Symbol conj() const;
    Symbol operator+(const Symbol& other) const;
    Symbol scaled(cdouble c) const;

private:
    Fn fn_;
    ClassParams params_;
    SymbolSource source_;
    std::string description_;
    bool real_;
};

/// Binds the point features x0, x1, ... of `space`; checks finiteness on a
/// probe grid over [lo, hi] (defaults to [1e-3, 1e3]).
Symbol symbol_from_expression(const SymbolExpr& expr, const MetricMeasureSpace& space, ClassParams params,
                              double probe_lo = 1e-3, double probe_hi = 1e3);
Symbol symbol_from_text(const std::string& text, const MetricMeasureSpace& space, ClassParams params);

Symbol multiplier_symbol(std::function<double(double)> F, ClassParams params = {}, std::string description = "F(xi)");
Symbol constant_symbol(cdouble c);
/// σ(x, ξ) = a(x) F(ξ).
Symbol separable_symbol(Vec a, std::function<double(double)> F, ClassParams params = {},
                        std::string description = "a(x)F(xi)");

/// Gaussian bump of width w around `center`: chord distance on cycles, graph distance otherwise.
Vec bump_profile(const MetricMeasureSpace& space, PointId center, double width);

/// Builtin symbols:
///   one            σ = 1
///   s10_test       (1 + cos(2πx0)/2) ξ/(1+ξ) + sin(2πx0)/(4(1+ξ))           class S^0_{1,0}
///   decompose_test cos(2πx0) ξ/(1+ξ)                                         class S^0_{1,0}
///   elementary     Σ_j w_j cos(2πx0 + t_j) ψ(t_j ξ) on the scale grid         class S^0_{1,0}
///   s1delta        φ(ξ) + Σ_j w_j γ_j(x) ψ(t_j ξ), γ_j a bump at point 0 of
///                  width 8 t_j^{δ/2}                                         class S^0_{1,δ}
std::vector<std::string> builtin_symbol_ids();
Symbol builtin_symbol(const std::string& id, const MetricMeasureSpace& space, const SpectralData& sd,
                      ClassParams params = {});

/// Random S^0_{1,1} symbol: Σ_j w_j a_j(x) ψ(t_j ξ) + φ(ξ) a_0(x) with a_j
/// band-limited to λ <= 1/t_j and normalized in sup norm.
Symbol random_s11_symbol(const MetricMeasureSpace& space, const SpectralData& sd, std::uint64_t seed);

/// Seminorm table K_{α,β} for α in {0, 1/2, ..., alpha_max}, β in 0..beta_max.
struct SeminormTable {
    std::vector<double> alphas;
    std::vector<int> betas;
    Mat K;  // rows α, cols β

    double sum() const { return K.sum(); }
};

struct SeminormOptions {
    double alpha_max = 1.0;
    int beta_max = 2;
    int per_octave = 64;
    double band_lo = 0.0;  // 0: smallest positive eigenvalue
    double band_hi = 0.0;  // 0: lambda_max
};

SeminormTable seminorm(const Symbol& sigma, const SpectralData* delta_sd, const SeminormOptions& opt = {});

/// Spectral power Δ^α g (0^0 = 1).
CVec spectral_power(const SpectralData& sd, double alpha, const CVec& g);

struct ElementaryDecomposition {
    ScaleGrid grid;
    int l_max = 0;
    int nodes = 0;
    PointId npoints = 0;
    std::vector<CMat> gamma;  // gamma[j](l + l_max, x)
    std::shared_ptr<const PartitionOfUnity> partition;
    std::shared_ptr<const Symbol> sigma;
    std::vector<double> sup_gamma;  // per l >= 0: max over t, x and ±l
    double decay_M = 0.0;
    double decay_r2 = 0.0;
    std::string psi_tilde = "indicator[1,2]";

    cdouble gamma_at(int l, std::size_t j, PointId x) const { return gamma[j](l + l_max, x); }
    /// τ(x, ξ) = φ(ξ) σ(x, ξ).
    cdouble tau(PointId x, double xi) const;
    /// τ + Σ_{|l| <= l_max} σ_l at (x, ξ).
    cdouble reconstruct(PointId x, double xi) const;
    /// Upper end of the ξ band covered by the scale grid.
    double band_hi() const { return 1.0 / grid.t_min; }
};

ElementaryDecomposition decompose(const Symbol& sigma, PointId npoints, const PartitionOfUnity& partition,
                                  const ScaleGrid& grid, int l_max, int fourier_nodes);

/// sup over points and probe ξ of |σ - τ - Σ σ_l|.
double reconstruct_residual(const ElementaryDecomposition& d, const std::vector<double>& probe_xi);

/// 64 log-spaced nodes per octave over [lo, hi].
std::vector<double> probe_grid(double lo, double hi, int per_octave = 64);

/// CSV `l,t,max_abs_gamma`.
void write_decomposition_csv(const ElementaryDecomposition& d, std::ostream& os);

}  // namespace psdocalc
