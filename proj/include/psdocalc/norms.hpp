#pragma once

#include "psdocalc/common.hpp"

#include <cstdint>
#include <vector>

namespace psdocalc {

struct BlockNorm {
    double value = 0.0;
    bool lower_bound = false;  // true when (p, q) has no exact formula
};

/// Whether the L^p -> L^q norm has an exact finite formula: p = 1, q = inf, or p = q = 2.
bool exact_norm_case(double p, double q);

/// Norm of f |-> (K f)|_{rows} for f supported on `cols`, from L^p(cols, mu_in)
/// to L^q(rows, mu_out). Empty index lists are rejected.
BlockNorm block_norm(const CMat& K, const Vec& mu_in, const Vec& mu_out, const std::vector<PointId>& cols,
                     const std::vector<PointId>& rows, double p, double q, std::uint64_t seed = 0);
BlockNorm block_norm(const Mat& K, const Vec& mu_in, const Vec& mu_out, const std::vector<PointId>& cols,
                     const std::vector<PointId>& rows, double p, double q, std::uint64_t seed = 0);

/// Whole-space norm with a shared measure.
BlockNorm operator_norm(const CMat& K, const Vec& mu, double p, double q, std::uint64_t seed = 0);
BlockNorm operator_norm(const Mat& K, const Vec& mu, double p, double q, std::uint64_t seed = 0);

/// Unweighted ℓ^p -> ℓ^q norm of a dense matrix (exact cases or lower bound).
BlockNorm matrix_norm(const CMat& A, double p, double q, std::uint64_t seed = 0);

/// Largest singular value.
double spectral_norm(const CMat& A);
double spectral_norm(const Mat& A);

}  // namespace psdocalc
