#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/norms.hpp"
#include "psdocalc/operator.hpp"
#include "psdocalc/space.hpp"
#include "psdocalc/symbols.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace psdocalc {

/// K(x,y) = Σ_k σ(x,λ_k) u_k(x) u_k(y) μ(y), so (T f)(x) = Σ_y K(x,y) f(y).
struct PsdoKernel {
    CMat K;
    Vec measure;

    CVec apply(const CVec& f) const { return K * f; }
    /// μ-adjoint: K*(x,y) = conj(K(y,x)) μ(y)/μ(x).
    CMat adjoint() const;
};

inline constexpr PointId kDenseKernelBudget = 3000;

CVec apply(const Symbol& sigma, const SpectralData& sd, const CVec& f);
CVec apply(const Symbol& sigma, const SpectralData& sd, const Vec& f);

PsdoKernel kernel_matrix(const Symbol& sigma, const SpectralData& sd);

/// μ-adjoint of an arbitrary kernel matrix.
CMat mu_adjoint(const CMat& K, const Vec& mu);

/// τ(x,L)f + Σ_{t_j >= ε} w_j Σ_l γ_{l,t_j}(x) [ψ̃(t_j L) e^{2πi l t_j L} f](x).
CVec apply_truncated(const ElementaryDecomposition& d, const SpectralData& sd, const CVec& f, double eps);

/// ||T^{ε} f - T^{ε/2} f||_2 for ε = 1/2, 1/4, ... while ε/2 stays on the grid.
std::vector<double> truncation_sweep(const ElementaryDecomposition& d, const SpectralData& sd, const CVec& f);

BlockNorm opnorm(const Symbol& sigma, const SpectralData& sd, double p, std::uint64_t seed = 0);

/// ||[σ(x,L)]^* - σ̄(x,L)||_{p->p}.
BlockNorm adjoint_defect(const Symbol& sigma, const SpectralData& sd, double p, std::uint64_t seed = 0);

struct ScaleDefect {
    std::vector<double> t;
    std::vector<double> norms;
    double slope = 0.0;
    double r2 = 0.0;
};

/// Per-scale pieces T_t = [γ_t ψ_t(L)]^* - γ̄_t ψ_t(L), slope of log||T_t|| vs log t.
ScaleDefect per_scale_defect(const std::function<Vec(double)>& gamma_t,
                             const std::function<double(double, double)>& psi_t, const SpectralData& sd,
                             const std::vector<double>& t_grid, double p);

/// ψ̃_t(ξ) = (tξ)^order e^{-tξ}, normalized to max 1 over the spectrum.
struct PsiTildeFamily {
    int order = 4;
    Vec values(const SpectralData& sd, double t) const;
};

struct PsdoOffdiagOptions {
    int max_separation = 60;
    PointId base = 0;
    double n_growth = 1.0;  // doubling exponent for the admissibility check
    std::uint64_t seed = 0;
};

/// Decay of T_σ ψ̃_t(L) between balls of radius t^{1/m}, polynomial model of order ν.
DecayReport psdo_offdiag(const PsdoKernel& kernel, const SpectralData& sd, const MetricMeasureSpace& space,
                         const PsiTildeFamily& family, double t, double nu, double p, double m,
                         const PsdoOffdiagOptions& opt = {});

/// Bare T_σ at scale 1.
DecayReport psdo_offdiag_bare(const PsdoKernel& kernel, const SpectralData& sd, const MetricMeasureSpace& space,
                              double nu, double p, const PsdoOffdiagOptions& opt = {});

}  // namespace psdocalc
