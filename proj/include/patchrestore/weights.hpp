#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patchrestore/features.hpp"
#include "patchrestore/linsolve.hpp"

namespace patchrestore {

enum class EstimatorKind { nadaraya_watson, kernel_ridge };

/// Coefficients alpha_i(y) of the patch regularizer estimate
/// sum_i alpha_i(y) loss(x, x_i).
struct WeightVector {
  std::vector<double> alphas;
  EstimatorKind kind = EstimatorKind::nadaraya_watson;

  double sum() const;
};

/// alpha = v / (1'v). When the similarities have all underflowed to zero the
/// uniform vector 1/m is returned and a warning is logged.
WeightVector nw_weights(std::span<const double> v);

/// Nadaraya-Watson weights directly from squared feature distances, shifted
/// by the minimum distance before exponentiation. Identical to
/// nw_weights(exp(-d / (2 bw^2))) in exact arithmetic but never underflows.
void nw_weights_from_sq_distances(std::span<const double> sq_distances, double bandwidth, std::span<double> out);

/// Solves (K + m lambda I) alpha = v by conjugate gradient, certified to
/// |(K + m lambda I) alpha - v| <= 1e-8 |v|.
WeightVector krr_weights(const DenseMatrix& k, std::span<const double> v, double lambda, std::size_t m);

/// The shifted kernel system K + m lambda I as a matrix-free operator.
LinearOperator krr_operator(const DenseMatrix& k, double lambda, std::size_t m);

/// Solves (K + m lambda I) x = rhs to relative residual 1e-8; throws
/// NonConvergence if the certified residual cannot be reached.
std::vector<double> krr_solve(const DenseMatrix& k, std::span<const double> rhs, double lambda, std::size_t m);

/// lambda = r (1/m + q / (|P| n))^(1/2).
double krr_lambda(double r, std::size_t m, double q, std::size_t num_patches, std::size_t n);

}  // namespace patchrestore
