#include "patchrestore/weights.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "patchrestore/error.hpp"
#include "patchrestore/image.hpp"
#include "patchrestore/log.hpp"

namespace patchrestore {
namespace {

std::atomic<bool> g_muted{false};
std::atomic<long> g_warnings{0};

constexpr double kKrrTolerance = 1e-8;

}  // namespace

void log_warning(const std::string& msg) {
  g_warnings.fetch_add(1);
  if (!g_muted.load()) std::cerr << "patchrestore: warning: " << msg << '\n';
}

void set_warnings_muted(bool muted) { g_muted.store(muted); }
long warning_count() { return g_warnings.load(); }

double WeightVector::sum() const { return std::accumulate(alphas.begin(), alphas.end(), 0.0); }

WeightVector nw_weights(std::span<const double> v) {
  if (v.empty()) throw ParameterError("nw_weights: empty kernel vector");
  WeightVector w;
  w.kind = EstimatorKind::nadaraya_watson;
  double total = 0.0;
  for (double x : v) {
    if (x < 0.0 || !std::isfinite(x)) throw ParameterError("nw_weights: similarities must be finite and >= 0");
    total += x;
  }
  if (total > 0.0) {
    w.alphas.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w.alphas[i] = v[i] / total;
  } else {
    log_warning("Nadaraya-Watson denominator vanished; using uniform weights");
    w.alphas.assign(v.size(), 1.0 / static_cast<double>(v.size()));
  }
  return w;
}

void nw_weights_from_sq_distances(std::span<const double> sq_distances, double bandwidth, std::span<double> out) {
  if (sq_distances.empty()) throw ParameterError("nw_weights: empty dataset");
  if (out.size() != sq_distances.size()) throw DimensionError("nw_weights: output length mismatch");
  if (!(bandwidth > 0.0)) throw ParameterError("nw_weights: bandwidth must be positive");
  const double dmin = *std::min_element(sq_distances.begin(), sq_distances.end());
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  double total = 0.0;
  for (std::size_t i = 0; i < sq_distances.size(); ++i) {
    out[i] = std::exp(-(sq_distances[i] - dmin) * inv);
    total += out[i];
  }
  // total >= 1 because the nearest sample contributes exp(0).
  for (double& a : out) a /= total;
}

LinearOperator krr_operator(const DenseMatrix& k, double lambda, std::size_t m) {
  const double shift = static_cast<double>(m) * lambda;
  return LinearOperator{k.n, [&k, shift](std::span<const double> x, std::span<double> y) {
                          const std::size_t n = k.n;
                          for (std::size_t i = 0; i < n; ++i) {
                            const double* row = k.values.data() + i * n;
                            double s = shift * x[i];
                            for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
                            y[i] = s;
                          }
                        }};
}

std::vector<double> krr_solve(const DenseMatrix& k, std::span<const double> rhs, double lambda, std::size_t m) {
  if (!(lambda > 0.0)) throw ParameterError("krr: lambda must be positive");
  if (m == 0) throw ParameterError("krr: m must be >= 1");
  if (k.values.size() != k.n * k.n) throw DimensionError("krr: kernel matrix is not square");
  if (rhs.size() != k.n) throw DimensionError("krr: kernel vector length != kernel matrix size");
  const LinearOperator op = krr_operator(k, lambda, m);
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) return std::vector<double>(k.n, 0.0);

  CGConfig cfg;
  cfg.rel_tolerance = 0.5 * kKrrTolerance;
  cfg.max_iterations = static_cast<int>(std::max<std::size_t>(500, 4 * k.n));
  std::vector<double> residual(k.n);
  // The recursive CG residual can drift from the true one; restart from the
  // current iterate until the explicitly computed residual is certified.
  for (int attempt = 0; attempt < 4; ++attempt) {
    CGResult res = conjugate_gradient(op, rhs, cfg);
    op.apply(res.x, residual);
    for (std::size_t i = 0; i < k.n; ++i) residual[i] -= rhs[i];
    const double rel = std::sqrt(dot(residual, residual)) / bnorm;
    if (rel <= kKrrTolerance) return res.x;
    cfg.initial_guess = std::move(res.x);
  }
  throw NonConvergence("krr: residual certification failed", cfg.max_iterations, 0.0);
}

WeightVector krr_weights(const DenseMatrix& k, std::span<const double> v, double lambda, std::size_t m) {
  WeightVector w;
  w.kind = EstimatorKind::kernel_ridge;
  w.alphas = krr_solve(k, v, lambda, m);
  return w;
}

double krr_lambda(double r, std::size_t m, double q, std::size_t num_patches, std::size_t n) {
  if (!(r > 0.0)) throw ParameterError("krr_lambda: r must be positive");
  if (m < 1 || num_patches < 1 || n < 1) throw ParameterError("krr_lambda: m, |P| and n must be >= 1");
  if (q < 0.0) throw ParameterError("krr_lambda: q must be >= 0");
  return r * std::sqrt(1.0 / static_cast<double>(m) +
                       q / (static_cast<double>(num_patches) * static_cast<double>(n)));
}

}  // namespace patchrestore
