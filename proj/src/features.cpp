#include "patchrestore/features.hpp"

#include <cmath>
#include <numbers>

#include "patchrestore/error.hpp"
#include "patchrestore/parallel.hpp"

namespace patchrestore {

DctTransform::DctTransform(int side) : side_(side), basis_(static_cast<std::size_t>(side) * side) {
  if (side < 1) throw ParameterError("DctTransform: side must be >= 1");
  const double n = static_cast<double>(side);
  for (int k = 0; k < side; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < side; ++i) {
      basis_[static_cast<std::size_t>(k) * side + i] = a * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
  }
}

void DctTransform::forward(std::span<const double> patch, std::span<double> out) const {
  const std::size_t d = static_cast<std::size_t>(side_);
  if (patch.size() != d * d || out.size() != d * d) throw DimensionError("DctTransform: expected side^2 values");
  // Rows first (tmp = P C^T), then columns (out = C tmp).
  double tmp[64 * 64];
  std::vector<double> heap;
  double* t = tmp;
  if (d * d > 64 * 64) {
    heap.resize(d * d);
    t = heap.data();
  }
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += patch[r * d + i] * basis_[k * d + i];
      t[r * d + k] = s;
    }
  }
  for (std::size_t u = 0; u < d; ++u) {
    for (std::size_t v = 0; v < d; ++v) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += basis_[u * d + r] * t[r * d + v];
      out[u * d + v] = s;
    }
  }
}

FeatureVector dct_features(const Patch& patch) {
  if (patch.values.size() != static_cast<std::size_t>(patch.side) * patch.side) {
    throw DimensionError("dct_features: patch is not square");
  }
  FeatureVector out(patch.values.size());
  DctTransform(patch.side).forward(patch.values, out);
  return out;
}

FeatureMatrix dct_features_all(std::span<const double> patches, int side, bool drop_dc) {
  const std::size_t dim = static_cast<std::size_t>(side) * side;
  if (dim == 0 || patches.size() % dim != 0) throw DimensionError("dct_features_all: length is not a multiple of side^2");
  FeatureMatrix fm;
  fm.rows = patches.size() / dim;
  fm.dim = dim;
  fm.values.resize(patches.size());
  const DctTransform dct(side);
  parallel_for_chunks(fm.rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      dct.forward(patches.subspan(i * dim, dim), fm.row(i));
      if (drop_dc) fm.row(i)[0] = 0.0;
    }
  });
  return fm;
}

double bandwidth_from_dataset(const FeatureMatrix& features, double scale) {
  if (features.rows < 2) throw ParameterError("bandwidth_from_dataset: need at least 2 feature vectors");
  if (!(scale > 0.0)) throw ParameterError("bandwidth_from_dataset: scale must be positive");
  const double n = static_cast<double>(features.rows);
  std::vector<double> mean(features.dim, 0.0);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const auto f = features.row(i);
    for (std::size_t j = 0; j < features.dim; ++j) mean[j] += f[j];
  }
  for (double& v : mean) v /= n;
  // sum_j var_j is the squared norm of the std vector.
  double total_var = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    const auto f = features.row(i);
    for (std::size_t j = 0; j < features.dim; ++j) {
      const double e = f[j] - mean[j];
      total_var += e * e;
    }
  }
  total_var /= n;
  if (!(total_var > 0.0)) throw ParameterError("bandwidth_from_dataset: features have zero variance");
  return scale * std::sqrt(total_var);
}

KernelModel kernel_model_from_dataset(const FeatureMatrix& features, double scale) {
  return KernelModel{bandwidth_from_dataset(features, scale), scale};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("feature length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}

double kernel_eval(std::span<const double> f1, std::span<const double> f2, const KernelModel& model) {
  if (!(model.bandwidth > 0.0)) throw ParameterError("kernel bandwidth must be positive");
  return std::exp(-squared_distance(f1, f2) / (2.0 * model.bandwidth * model.bandwidth));
}

void squared_distances(std::span<const double> query, const FeatureMatrix& features, std::span<double> out) {
  if (features.rows > 0 && query.size() != features.dim) throw DimensionError("query feature length mismatch");
  if (out.size() != features.rows) throw DimensionError("squared_distances: output length != rows");
  const std::size_t dim = features.dim;
  const double* q = query.data();
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* f = features.values.data() + i * dim;
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double e = q[j] - f[j];
      s += e * e;
    }
    out[i] = s;
  }
}

std::vector<double> kernel_vector(std::span<const double> query, const FeatureMatrix& features,
                                  const KernelModel& model) {
  if (!(model.bandwidth > 0.0)) throw ParameterError("kernel bandwidth must be positive");
  std::vector<double> v(features.rows);
  squared_distances(query, features, v);
  const double inv = 1.0 / (2.0 * model.bandwidth * model.bandwidth);
  for (double& x : v) x = std::exp(-x * inv);
  return v;
}

DenseMatrix kernel_matrix(const FeatureMatrix& features, const KernelModel& model) {
  DenseMatrix k(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < features.rows; ++j) {
      const double v = kernel_eval(features.row(i), features.row(j), model);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace patchrestore
