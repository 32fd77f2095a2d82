#pragma once

#include "psdocalc/common.hpp"
#include "psdocalc/space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace psdocalc {

/// Difference operators X_1..X_κ with rows weighted by `row_weights`, so that
/// the μ-adjoint is X_i^* = M^{-1} X_i^T W_i and Σ X_i^* X_i = M^{-1} Σ X_i^T W_i X_i.
struct VectorFieldFamily {
    std::vector<Mat> fields;
    std::vector<Vec> row_weights;

    std::size_t count() const { return fields.size(); }
    bool square() const;

    /// X_I = X_{i_1} ... X_{i_p}; only defined when all fields are square.
    Mat compose(const std::vector<int>& index) const;

    /// M^{-1} Σ X_i^T W_i X_i.
    Mat assemble(const Vec& mu) const;
};

/// Forward differences along each lattice direction on cycles and tori (square
/// fields, one row per vertex); a single oriented incidence matrix otherwise.
VectorFieldFamily edge_difference_fields(const MetricMeasureSpace& space);

enum class OperatorKind { graph_laplacian, divergence_form, sub_laplacian };

std::string to_string(OperatorKind k);
OperatorKind parse_operator_kind(const std::string& s);

struct SelfAdjointOperator {
    OperatorKind kind = OperatorKind::graph_laplacian;
    Mat matrix;
    Vec measure;
    double order_m = 2.0;
    double p0 = 1.0;
    std::optional<VectorFieldFamily> fields;

    PointId size() const { return matrix.rows(); }
    double p0_conjugate() const { return conjugate_exponent(p0); }
};

/// L = M^{-1}(D - A).
SelfAdjointOperator build_graph_laplacian(const MetricMeasureSpace& space);

/// L = M^{-1} Σ_{edges} a_e (δ_u - δ_v)(δ_u - δ_v)^T with `coeffs` a symmetric
/// point-indexed matrix whose entries on edges are positive and vanish elsewhere.
SelfAdjointOperator build_divergence_form(const MetricMeasureSpace& space, const Mat& coeffs);

/// Per-edge coefficients aligned with space.edges().
SelfAdjointOperator build_divergence_form(const MetricMeasureSpace& space, const std::vector<double>& edge_coeffs);

SelfAdjointOperator build_sub_laplacian(const MetricMeasureSpace& space, VectorFieldFamily fields);

/// max |(ML)_{xy} - (ML)_{yx}|, scaled by max |ML|.
double mu_symmetry_defect(const SelfAdjointOperator& op);

/// ||L 1||_inf.
double constants_defect(const SelfAdjointOperator& op);

struct SpectralData {
    Vec eigenvalues;   // ascending
    Mat eigenvectors;  // columns u_k, μ-orthonormal
    Vec measure;

    PointId size() const { return eigenvalues.size(); }
    double lambda_max() const { return eigenvalues.size() ? eigenvalues[eigenvalues.size() - 1] : 0.0; }
    /// Smallest eigenvalue above 1e-9 (the spectral gap), or lambda_max if none.
    double lambda_min_positive() const;

    /// ⟨f, u_k⟩_μ for all k.
    Vec coefficients(const Vec& f) const;
    CVec coefficients(const CVec& f) const;

    /// Σ_k F_k ⟨f,u_k⟩_μ u_k for tabulated F_k = F(λ_k).
    Vec apply_values(const Vec& Fk, const Vec& f) const;
    CVec apply_values(const Vec& Fk, const CVec& f) const;

    /// F(L) applied to each column of F.
    Mat apply_values_matrix(const Vec& Fk, const Mat& F) const;

    /// Matrix of F(L) = U diag(F_k) U^T M.
    Mat matrix_of(const Vec& Fk) const;

    /// Tabulates F on the eigenvalues; throws if any value is not finite.
    Vec tabulate(const std::function<double(double)>& F) const;
};

SpectralData eigendecompose(const SelfAdjointOperator& op, double symmetry_tol = 1e-10);

/// e^{-tL} f.
Vec semigroup_apply(const SpectralData& sd, double t, const Vec& f);

/// Matrix of e^{-tL}.
Mat semigroup_matrix(const SpectralData& sd, double t);

/// r^{|I|} X_I e^{-r^2 L}; needs square fields. Output rows carry the
/// row weights of the last applied field as their measure.
Mat family_operator(const SpectralData& sd, const VectorFieldFamily& fam, const std::vector<int>& index, double r);

}  // namespace psdocalc
