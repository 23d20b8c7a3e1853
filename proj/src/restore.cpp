#include "patchrestore/restore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "patchrestore/error.hpp"
#include "patchrestore/parallel.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {
namespace {

double norm2(std::span<const double> v) { return dot(v, v); }

double weighted_distance_sum(const double* z, std::span<const double> alphas, const SdcaTargets& targets) {
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.m; ++i) {
    if (alphas[i] == 0.0) continue;
    const double* x = targets.values.data() + i * targets.dim;
    double s = 0.0;
    for (std::size_t k = 0; k < targets.dim; ++k) {
      const double e = z[k] - x[k];
      s += e * e;
    }
    loss += alphas[i] * std::sqrt(s);
  }
  return loss;
}

double data_term(const Image& x, const Image& y, const DegradationOperator& op, double gamma) {
  const Image bx = op.apply(x);
  double s = 0.0;
  for (std::size_t j = 0; j < bx.size(); ++j) {
    const double e = y.data()[j] - bx.data()[j];
    s += e * e;
  }
  return 0.5 * gamma * s;
}

void check_observation(const Image& y, const DegradationOperator& op) {
  if (y.width() != op.output_width() || y.height() != op.output_height()) {
    throw DimensionError("observation is " + std::to_string(y.width()) + "x" + std::to_string(y.height()) +
                         " but the operator produces " + std::to_string(op.output_width()) + "x" +
                         std::to_string(op.output_height()));
  }
}

// A x = c * x + gamma B'B x, with c a per-pixel diagonal.
LinearOperator diagonal_plus_normal(const std::vector<double>& diag, const DegradationOperator& op, double gamma,
                                    int width, int height) {
  LinearOperator a;
  a.dim = diag.size();
  a.apply = [&diag, &op, gamma, width, height](std::span<const double> x, std::span<double> out) {
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = diag[j] * x[j];
    if (gamma == 0.0) return;
    const Image img(width, height, std::vector<double>(x.begin(), x.end()));
    const Image n = op.normal(img);
    for (std::size_t j = 0; j < x.size(); ++j) out[j] += gamma * n.data()[j];
  };
  return a;
}

Image solve_diagonal_plus_normal(const std::vector<double>& diag, const std::vector<double>& rhs,
                                 const DegradationOperator& op, double gamma, int width, int height,
                                 const CGConfig& cg) {
  const LinearOperator a = diagonal_plus_normal(diag, op, gamma, width, height);
  CGResult res = conjugate_gradient(a, rhs, cg);
  return Image(width, height, std::move(res.x));
}

std::vector<double> gamma_bty(const Image& y, const DegradationOperator& op, double gamma) {
  std::vector<double> rhs = op.apply_adjoint(y).data();
  for (double& v : rhs) v *= gamma;
  return rhs;
}

KernelModel degraded_kernel(const PatchDataset& data, const SolverConfig& cfg) {
  const FeatureMatrix& src =
      cfg.bandwidth_source == BandwidthSource::degraded ? data.degraded_features : data.clean_features;
  return kernel_model_from_dataset(src, cfg.bandwidth_scale);
}

// Sparse copy of a patch's touched duals, carried between HQS iterations.
struct SavedDuals {
  std::vector<std::uint32_t> index;
  std::vector<double> values;
};

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw ParameterError("gamma must be finite and >= 0");
  if (!(cfg.beta0 > 0.0) || !std::isfinite(cfg.beta0)) throw ParameterError("beta0 must be finite and > 0");
  if (!(cfg.delta >= 1.0) || !std::isfinite(cfg.delta)) throw ParameterError("delta must be finite and >= 1");
  if (cfg.iterations < 0) throw ParameterError("iterations must be >= 0");
  if (!(cfg.bandwidth_scale > 0.0)) throw ParameterError("bandwidth scale must be > 0");
  if (!(cfg.cg_tolerance > 0.0)) throw ParameterError("cg tolerance must be > 0");
  if (cfg.cg_max_iterations < 1) throw ParameterError("cg iteration cap must be >= 1");
  if (cfg.sdca.max_steps < 0) throw ParameterError("sdca step budget must be >= 0");
  if (!(cfg.sdca.gap_tolerance >= 0.0)) throw ParameterError("sdca gap tolerance must be >= 0");
  if (cfg.sdca.gap_recompute_period < 1) throw ParameterError("sdca gap recompute period must be >= 1");
  if (cfg.krr_q < 0.0) throw ParameterError("krr q must be >= 0");
}

Image solve_mse(const Image& y, const DegradationOperator& op, const PatchGrid& grid, const MseTargets& targets,
                double gamma, const CGConfig& cg) {
  check_observation(y, op);
  if (grid.width() != op.input_width() || grid.height() != op.input_height()) {
    throw DimensionError("solve_mse: patch grid does not match the operator input size");
  }
  if (!(gamma >= 0.0)) throw ParameterError("solve_mse: gamma must be >= 0");
  const std::size_t np = grid.count();
  const std::size_t dim = static_cast<std::size_t>(grid.patch_area());
  if (targets.mass.size() != np || targets.weighted_patches.size() != np * dim) {
    throw DimensionError("solve_mse: targets do not match the patch grid");
  }
  const int w = grid.width();
  const int h = grid.height();
  Image mass(w, h, 0.0);
  Image rhs_patch(w, h, 0.0);
  std::vector<double> window(dim);
  for (std::size_t p = 0; p < np; ++p) {
    std::fill(window.begin(), window.end(), targets.mass[p]);
    scatter_patch_add(mass, grid, p, window);
    scatter_patch_add(rhs_patch, grid, p, std::span<const double>(targets.weighted_patches.data() + p * dim, dim));
  }
  std::vector<double> rhs = gamma_bty(y, op, gamma);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += rhs_patch.data()[j];
  return solve_diagonal_plus_normal(mass.data(), rhs, op, gamma, w, h, cg);
}

Image solve_mse(const Image& y, const DegradationOperator& op, const PatchDataset& data,
                std::span<const WeightVector> weights, double gamma, const CGConfig& cg) {
  const PatchGrid grid(op.input_width(), op.input_height(), data.clean_side);
  if (weights.size() != grid.count()) throw DimensionError("solve_mse: need one weight vector per patch");
  const std::size_t dim = data.clean_dim();
  MseTargets t;
  t.mass.resize(grid.count());
  t.weighted_patches.assign(grid.count() * dim, 0.0);
  for (std::size_t p = 0; p < grid.count(); ++p) {
    const auto& a = weights[p].alphas;
    if (a.size() != data.m) throw DimensionError("solve_mse: weight vector length != m");
    t.mass[p] = weights[p].sum();
    double* out = t.weighted_patches.data() + p * dim;
    for (std::size_t i = 0; i < data.m; ++i) {
      if (a[i] == 0.0) continue;
      const auto xi = data.clean_patch(i);
      for (std::size_t k = 0; k < dim; ++k) out[k] += a[i] * xi[k];
    }
  }
  return solve_mse(y, op, grid, t, gamma, cg);
}

CGResult x_update(std::span<const double> z_patches, const PatchGrid& grid, const Image& y,
                  const DegradationOperator& op, double beta, double gamma, const CGConfig& cg) {
  check_observation(y, op);
  if (grid.width() != op.input_width() || grid.height() != op.input_height()) {
    throw DimensionError("x_update: patch grid does not match the operator input size");
  }
  if (!(beta > 0.0)) throw ParameterError("x_update: beta must be > 0");
  if (!(gamma >= 0.0)) throw ParameterError("x_update: gamma must be >= 0");
  if (z_patches.size() != grid.count() * static_cast<std::size_t>(grid.patch_area())) {
    throw DimensionError("x_update: z array is not |P| x d^2");
  }
  std::vector<double> diag = coverage_counts(grid).data();
  for (double& c : diag) c *= beta;
  const Image zsum = scatter_all_patches(z_patches, grid);
  std::vector<double> rhs = gamma_bty(y, op, gamma);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += beta * zsum.data()[j];
  const LinearOperator a = diagonal_plus_normal(diag, op, gamma, grid.width(), grid.height());
  return conjugate_gradient(a, rhs, cg);
}

double energy_l2(const Image& x, const Image& y, const DegradationOperator& op, const PatchDataset& data,
                 std::span<const WeightVector> weights, double gamma) {
  check_observation(y, op);
  const PatchGrid grid(x.width(), x.height(), data.clean_side);
  if (weights.size() != grid.count()) throw DimensionError("energy_l2: need one weight vector per patch");
  const SdcaTargets targets = make_sdca_targets(data, false);
  std::vector<double> patch(data.clean_dim());
  double loss = 0.0;
  for (std::size_t p = 0; p < grid.count(); ++p) {
    if (weights[p].alphas.size() != data.m) throw DimensionError("energy_l2: weight vector length != m");
    extract_patch_into(x, grid, p, patch);
    loss += weighted_distance_sum(patch.data(), weights[p].alphas, targets);
  }
  return loss + data_term(x, y, op, gamma);
}

double hqs_energy(const Image& x, std::span<const double> z_patches, const PatchGrid& grid, const Image& y,
                  const DegradationOperator& op, const SdcaTargets& targets, std::span<const WeightVector> weights,
                  std::span<const double> shifts, double beta, double gamma) {
  check_observation(y, op);
  grid.check_image(x);
  const std::size_t np = grid.count();
  const std::size_t dim = targets.dim;
  if (dim != static_cast<std::size_t>(grid.patch_area())) throw DimensionError("hqs_energy: target dim != d^2");
  if (z_patches.size() != np * dim) throw DimensionError("hqs_energy: z array is not |P| x d^2");
  if (weights.size() != np) throw DimensionError("hqs_energy: need one weight vector per patch");
  if (!shifts.empty() && shifts.size() != np) throw DimensionError("hqs_energy: need one shift per patch");
  std::vector<double> xp(dim);
  std::vector<double> zc(dim);
  double loss = 0.0;
  double coupling = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    if (weights[p].alphas.size() != targets.m) throw DimensionError("hqs_energy: weight vector length != m");
    const double* z = z_patches.data() + p * dim;
    const double s = shifts.empty() ? 0.0 : shifts[p];
    extract_patch_into(x, grid, p, xp);
    for (std::size_t k = 0; k < dim; ++k) {
      zc[k] = z[k] - s;
      coupling += (xp[k] - z[k]) * (xp[k] - z[k]);
    }
    loss += weighted_distance_sum(zc.data(), weights[p].alphas, targets);
  }
  return loss + data_term(x, y, op, gamma) + 0.5 * beta * coupling;
}

Image initial_estimate(const Image& y, const DegradationOperator& op) {
  check_observation(y, op);
  if (op.kind() == DegradationOperator::Kind::downsample) {
    return upsample_bicubic(y, op.factor(), op.input_width(), op.input_height());
  }
  return y;
}

FeatureMatrix degraded_query_features(const Image& y, const DegradationOperator& op, const PatchGrid& grid,
                                      int degraded_side, bool drop_dc) {
  check_observation(y, op);
  const int k = op.factor();
  if (degraded_side * k != grid.patch_size()) {
    throw DimensionError("degraded patch side " + std::to_string(degraded_side) + " does not match clean side " +
                         std::to_string(grid.patch_size()) + " at factor " + std::to_string(k));
  }
  const std::size_t ddim = static_cast<std::size_t>(degraded_side) * degraded_side;
  std::vector<double> patches(grid.count() * ddim);
  for (std::size_t p = 0; p < grid.count(); ++p) {
    const int r0 = grid.row_of(p) / k;
    const int c0 = grid.col_of(p) / k;
    double* out = patches.data() + p * ddim;
    for (int r = 0; r < degraded_side; ++r) {
      for (int c = 0; c < degraded_side; ++c) *out++ = y(r0 + r, c0 + c);
    }
  }
  return dct_features_all(patches, degraded_side, drop_dc);
}

std::vector<WeightVector> compute_patch_weights(const FeatureMatrix& queries, const FeatureMatrix& train,
                                                const KernelModel& kernel, EstimatorKind kind, double krr_lambda_value) {
  if (queries.dim != train.dim) throw DimensionError("compute_patch_weights: feature dimensions differ");
  std::vector<WeightVector> out(queries.rows);
  if (kind == EstimatorKind::nadaraya_watson) {
    parallel_for_chunks(queries.rows, [&](std::size_t begin, std::size_t end) {
      std::vector<double> sqd(train.rows);
      for (std::size_t p = begin; p < end; ++p) {
        squared_distances(queries.row(p), train, sqd);
        out[p].kind = kind;
        out[p].alphas.resize(train.rows);
        nw_weights_from_sq_distances(sqd, kernel.bandwidth, out[p].alphas);
      }
    });
    return out;
  }
  const double lambda =
      krr_lambda_value > 0.0 ? krr_lambda_value : krr_lambda(1.0, train.rows, 0.0, queries.rows, 1);
  const DenseMatrix k = kernel_matrix(train, kernel);
  for (std::size_t p = 0; p < queries.rows; ++p) {
    out[p] = krr_weights(k, kernel_vector(queries.row(p), train, kernel), lambda, train.rows);
  }
  return out;
}

Image restore_mse(const Image& y, const DegradationOperator& op, const PatchDataset& data, const SolverConfig& cfg) {
  validate(cfg);
  check_observation(y, op);
  const PatchGrid grid(op.input_width(), op.input_height(), data.clean_side);
  const FeatureMatrix queries = degraded_query_features(y, op, grid, data.degraded_side, cfg.drop_dc);
  const FeatureMatrix& train = data.degraded_features;
  const KernelModel kernel = degraded_kernel(data, cfg);
  const std::size_t np = grid.count();
  const std::size_t dim = data.clean_dim();
  const std::size_t m = data.m;

  MseTargets t;
  t.mass.assign(np, 0.0);
  t.weighted_patches.assign(np * dim, 0.0);
  if (cfg.estimator == EstimatorKind::nadaraya_watson) {
    parallel_for_chunks(
        np,
        [&](std::size_t begin, std::size_t end) {
          std::vector<double> sqd(m);
          std::vector<double> alpha(m);
          for (std::size_t p = begin; p < end; ++p) {
            squared_distances(queries.row(p), train, sqd);
            nw_weights_from_sq_distances(sqd, kernel.bandwidth, alpha);
            double* out = t.weighted_patches.data() + p * dim;
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
              if (alpha[i] == 0.0) continue;
              mass += alpha[i];
              const auto xi = data.clean_patch(i);
              for (std::size_t k = 0; k < dim; ++k) out[k] += alpha[i] * xi[k];
            }
            t.mass[p] = mass;
          }
        },
        cfg.workers);
  } else {
    // alpha_p = A^{-1} v_p with A = K + m lambda I, so a_p = u'v_p and
    // w_p = C'v_p for u = A^{-1} 1 and C = A^{-1} X, solved once.
    const double lambda = cfg.krr_lambda > 0.0 ? cfg.krr_lambda : krr_lambda(1.0, m, cfg.krr_q, np, 1);
    const DenseMatrix kmat = kernel_matrix(train, kernel);
    const std::vector<double> u = krr_solve(kmat, std::vector<double>(m, 1.0), lambda, m);
    std::vector<double> c(m * dim);  // row-major m x dim
    std::vector<std::vector<double>> columns(dim);
    parallel_for_chunks(
        dim,
        [&](std::size_t begin, std::size_t end) {
          std::vector<double> col(m);
          for (std::size_t k = begin; k < end; ++k) {
            for (std::size_t i = 0; i < m; ++i) col[i] = data.clean[i * dim + k];
            columns[k] = krr_solve(kmat, col, lambda, m);
          }
        },
        cfg.workers);
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t i = 0; i < m; ++i) c[i * dim + k] = columns[k][i];
    }
    parallel_for_chunks(
        np,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t p = begin; p < end; ++p) {
            const std::vector<double> v = kernel_vector(queries.row(p), train, kernel);
            t.mass[p] = dot(v, u);
            double* out = t.weighted_patches.data() + p * dim;
            for (std::size_t i = 0; i < m; ++i) {
              const double* ci = c.data() + i * dim;
              for (std::size_t k = 0; k < dim; ++k) out[k] += v[i] * ci[k];
            }
          }
        },
        cfg.workers);
  }
  CGConfig cg;
  cg.rel_tolerance = cfg.cg_tolerance;
  cg.max_iterations = cfg.cg_max_iterations;
  return solve_mse(y, op, grid, t, cfg.gamma, cg);
}

HqsResult hqs_restore(const Image& y, const DegradationOperator& op, const PatchDataset& data,
                      const SolverConfig& cfg, const Image* reference) {
  validate(cfg);
  check_observation(y, op);
  if (cfg.estimator != EstimatorKind::nadaraya_watson) {
    throw ParameterError("HQS with SDCA needs nonnegative weights; use the Nadaraya-Watson estimator");
  }
  const int width = op.input_width();
  const int height = op.input_height();
  if (reference && (reference->width() != width || reference->height() != height)) {
    throw DimensionError("hqs_restore: reference image has the wrong size");
  }
  const PatchGrid grid(width, height, data.clean_side);
  const std::size_t np = grid.count();
  const std::size_t dim = data.clean_dim();
  const std::size_t m = data.m;

  const SdcaTargets targets = make_sdca_targets(data, cfg.center_patches);
  const KernelModel kernel_deg = degraded_kernel(data, cfg);
  const KernelModel kernel_clean = kernel_model_from_dataset(data.clean_features, cfg.bandwidth_scale);
  const FeatureMatrix deg_queries = degraded_query_features(y, op, grid, data.degraded_side, cfg.drop_dc);

  HqsResult result;
  Image x = initial_estimate(y, op);
  std::vector<double> z = extract_all_patches(x, grid);
  std::vector<SavedDuals> saved(cfg.warm_start_duals ? np : 0);

  std::vector<double> shifts(np, 0.0), loss_before(np), loss_after(np), gap(np), coupling_before(np), coupling_after(np);
  std::vector<int> steps(np);
  std::vector<char> kept(np);

  double beta = cfg.beta0;
  for (int t = 1; t <= cfg.iterations; ++t) {
    const bool use_degraded = t == 1 || !cfg.recompute_alpha || cfg.alpha_schedule == AlphaSchedule::always_degraded;
    const KernelModel& kernel = use_degraded ? kernel_deg : kernel_clean;
    if (cfg.observer) {
      HqsIterationView view;
      view.iteration = t;
      view.beta = beta;
      view.estimate = &x;
      view.query_image = use_degraded ? &y : &x;
      view.query_is_degraded = use_degraded;
      view.kernel = kernel;
      cfg.observer(view);
    }
    FeatureMatrix clean_queries;
    if (!use_degraded) clean_queries = dct_features_all(extract_all_patches(x, grid), data.clean_side, cfg.drop_dc);
    const FeatureMatrix& queries = use_degraded ? deg_queries : clean_queries;
    const FeatureMatrix& train = use_degraded ? data.degraded_features : data.clean_features;

    parallel_for_chunks(
        np,
        [&](std::size_t begin, std::size_t end) {
          DualState state(m, dim);
          std::vector<double> sqd(m), alpha(m), anchor(dim), zprev(dim);
          for (std::size_t p = begin; p < end; ++p) {
            squared_distances(queries.row(p), train, sqd);
            nw_weights_from_sq_distances(sqd, kernel.bandwidth, alpha);
            extract_patch_into(x, grid, p, anchor);
            double shift = 0.0;
            if (targets.centered) shift = std::accumulate(anchor.begin(), anchor.end(), 0.0) / static_cast<double>(dim);
            shifts[p] = shift;
            double* zp = z.data() + p * dim;
            double cb = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              cb += (anchor[k] - zp[k]) * (anchor[k] - zp[k]);
              anchor[k] -= shift;
              zprev[k] = zp[k] - shift;
            }
            coupling_before[p] = cb;

            state.reset(anchor);
            if (cfg.warm_start_duals) {
              const SavedDuals& sd = saved[p];
              for (std::size_t j = 0; j < sd.index.size(); ++j) {
                const std::size_t i = sd.index[j];
                const double* src = sd.values.data() + j * dim;
                const double nrm = std::sqrt(norm2(std::span<const double>(src, dim)));
                const double scale = nrm > alpha[i] ? alpha[i] / nrm : 1.0;
                auto mu = state.mu(i);
                for (std::size_t k = 0; k < dim; ++k) mu[k] = src[k] * scale;
                state.mark_touched(i);
              }
            }
            Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t), p));
            const SdcaResult res = sdca_solve(state, anchor, alpha, targets, beta, cfg.sdca, rng);

            const double lprev = weighted_distance_sum(zprev.data(), alpha, targets);
            const double lnew = weighted_distance_sum(res.z.data(), alpha, targets);
            double cprev = 0.0, cnew = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              cprev += (zprev[k] - anchor[k]) * (zprev[k] - anchor[k]);
              cnew += (res.z[k] - anchor[k]) * (res.z[k] - anchor[k]);
            }
            loss_before[p] = lprev;
            const bool keep = cfg.monotone_safeguard && lprev + 0.5 * beta * cprev < lnew + 0.5 * beta * cnew;
            kept[p] = keep ? 1 : 0;
            if (keep) {
              loss_after[p] = lprev;
              coupling_after[p] = cprev;
            } else {
              loss_after[p] = lnew;
              coupling_after[p] = cnew;
              for (std::size_t k = 0; k < dim; ++k) zp[k] = res.z[k] + shift;
            }
            gap[p] = res.gap;
            steps[p] = res.steps;

            if (cfg.warm_start_duals) {
              SavedDuals& sd = saved[p];
              sd.index.clear();
              sd.values.clear();
              for (std::size_t i : state.touched()) {
                sd.index.push_back(static_cast<std::uint32_t>(i));
                const auto mu = state.mu(i);
                sd.values.insert(sd.values.end(), mu.begin(), mu.end());
              }
            }
          }
        },
        cfg.workers);

    HqsIterationRecord rec;
    rec.iteration = t;
    rec.beta = beta;
    const double fidelity_prev = data_term(x, y, op, cfg.gamma);
    double lb = 0.0, la = 0.0, cb = 0.0, ca = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      lb += loss_before[p];
      la += loss_after[p];
      cb += coupling_before[p];
      ca += coupling_after[p];
      rec.mean_gap += gap[p];
      rec.max_gap = std::max(rec.max_gap, gap[p]);
      rec.sdca_steps += steps[p];
      rec.safeguard_kept += kept[p];
    }
    rec.mean_gap /= static_cast<double>(np);
    rec.energy_before = lb + fidelity_prev + 0.5 * beta * cb;
    rec.energy_after_z = la + fidelity_prev + 0.5 * beta * ca;

    auto notify = [&](HqsStepView::Stage stage) {
      if (!cfg.step_observer) return;
      HqsStepView view;
      view.iteration = t;
      view.stage = stage;
      view.beta = beta;
      view.x = &x;
      view.z_patches = z;
      view.shifts = shifts;
      cfg.step_observer(view);
    };
    notify(HqsStepView::Stage::after_z);

    CGConfig cg;
    cg.rel_tolerance = cfg.cg_tolerance;
    cg.max_iterations = cfg.cg_max_iterations;
    cg.initial_guess = x.data();
    CGResult xr = x_update(z, grid, y, op, beta, cfg.gamma, cg);
    rec.cg_iterations = xr.iterations;
    x = Image(width, height, std::move(xr.x));

    std::vector<double> xp(dim);
    double coupling = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      extract_patch_into(x, grid, p, xp);
      const double* zp = z.data() + p * dim;
      for (std::size_t k = 0; k < dim; ++k) coupling += (xp[k] - zp[k]) * (xp[k] - zp[k]);
    }
    rec.energy = la + data_term(x, y, op, cfg.gamma) + 0.5 * beta * coupling;
    notify(HqsStepView::Stage::after_x);
    rec.psnr = reference ? psnr(x, *reference) : std::numeric_limits<double>::quiet_NaN();
    result.trace.push_back(rec);
    beta *= cfg.delta;
  }
  result.x = std::move(x);
  return result;
}

}  // namespace patchrestore
