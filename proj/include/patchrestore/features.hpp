#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "patchrestore/image.hpp"

namespace patchrestore {

using FeatureVector = std::vector<double>;

/// Separable orthonormal 2-D DCT-II for square patches.
class DctTransform {
 public:
  explicit DctTransform(int side);

  int side() const { return side_; }
  /// Coefficients in row-major frequency order; `out` has length side^2.
  void forward(std::span<const double> patch, std::span<double> out) const;

 private:
  int side_;
  std::vector<double> basis_;  // basis_[k * side + n] = a_k cos(pi (2n + 1) k / (2 side))
};

FeatureVector dct_features(const Patch& patch);

/// Row-major n x dim matrix of feature vectors.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

/// DCT features of every row of an n x side^2 patch array. With drop_dc the
/// DC coefficient is zeroed so the kernel ignores patch means.
FeatureMatrix dct_features_all(std::span<const double> patches, int side, bool drop_dc = false);

/// Gaussian similarity k(f, g) = exp(-|f - g|^2 / (2 bandwidth^2)).
struct KernelModel {
  double bandwidth = 1.0;
  double scale = 0.2;
  /// sup_y k(y, y); exactly 1 for the Gaussian kernel.
  static constexpr double r_squared = 1.0;
};

/// scale * || (std_1, ..., std_D) ||_2 with population standard deviations
/// per feature coordinate.
double bandwidth_from_dataset(const FeatureMatrix& features, double scale = 0.2);
KernelModel kernel_model_from_dataset(const FeatureMatrix& features, double scale = 0.2);

double squared_distance(std::span<const double> a, std::span<const double> b);
double kernel_eval(std::span<const double> f1, std::span<const double> f2, const KernelModel& model);

/// out[i] = |query - features.row(i)|^2.
void squared_distances(std::span<const double> query, const FeatureMatrix& features, std::span<double> out);

std::vector<double> kernel_vector(std::span<const double> query, const FeatureMatrix& features,
                                  const KernelModel& model);

/// Dense row-major square matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n_) : n(n_), values(n_ * n_, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// K_ij = k(f_i, f_j); symmetric with unit diagonal.
DenseMatrix kernel_matrix(const FeatureMatrix& features, const KernelModel& model);

}  // namespace patchrestore
