#include "patchrestore/sdca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "patchrestore/error.hpp"

namespace patchrestore {
namespace {

constexpr double kFeasibilitySlack = 1e-12;

double distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = a[k] - b[k];
    s += e * e;
  }
  return std::sqrt(s);
}

void check_problem(std::span<const double> anchor, std::span<const double> alphas, const SdcaTargets& targets,
                   double beta) {
  if (!(beta > 0.0)) throw ParameterError("sdca: beta must be positive");
  if (anchor.size() != targets.dim) throw DimensionError("sdca: anchor length != target dimension");
  if (alphas.size() != targets.m) throw DimensionError("sdca: weight count != number of targets");
  for (double a : alphas) {
    if (!(a >= 0.0)) throw ParameterError("sdca: weights must be nonnegative (Nadaraya-Watson); got " + std::to_string(a));
  }
}

// Full recompute of the per-sample gaps into state.gaps(); returns the total.
// Also resynchronizes z with the duals to cancel accumulated drift.
double refresh(DualState& state, std::span<const double> anchor, std::span<const double> alphas,
               const SdcaTargets& targets, double beta) {
  const std::size_t dim = targets.dim;
  auto z = state.z();
  std::copy(anchor.begin(), anchor.end(), z.begin());
  for (std::size_t i : state.touched()) {
    const auto mu = state.mu(i);
    for (std::size_t k = 0; k < dim; ++k) z[k] += mu[k] / beta;
  }
  auto gaps = state.gaps();
  for (std::size_t i = 0; i < targets.m; ++i) gaps[i] = alphas[i] * distance(z.data(), targets.values.data() + i * dim, dim);
  for (std::size_t i : state.touched()) {
    const auto mu = state.mu(i);
    const double* x = targets.values.data() + i * dim;
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += mu[k] * (z[k] - x[k]);
    gaps[i] += s;
  }
  double total = 0.0;
  for (double& g : gaps) {
    g = std::max(g, 0.0);  // Cauchy-Schwarz makes g_i >= 0 up to round-off
    total += g;
  }
  return total;
}

}  // namespace

SdcaTargets make_sdca_targets(std::span<const double> patches, std::size_t dim, bool center) {
  if (dim == 0 || patches.size() % dim != 0) throw DimensionError("sdca targets: length is not a multiple of dim");
  SdcaTargets t;
  t.dim = dim;
  t.m = patches.size() / dim;
  t.values.assign(patches.begin(), patches.end());
  t.centered = center;
  if (center) {
    for (std::size_t i = 0; i < t.m; ++i) {
      double* row = t.values.data() + i * dim;
      const double mean = std::accumulate(row, row + dim, 0.0) / static_cast<double>(dim);
      for (std::size_t k = 0; k < dim; ++k) row[k] -= mean;
    }
  }
  return t;
}

SdcaTargets make_sdca_targets(const PatchDataset& data, bool center) {
  return make_sdca_targets(data.clean, data.clean_dim(), center);
}

DualState::DualState(std::size_t m, std::size_t dim)
    : m_(m), dim_(dim), mu_(m * dim, 0.0), z_(dim, 0.0), gaps_(m, 0.0), is_touched_(m, 0) {}

void DualState::reset(std::span<const double> anchor) {
  if (anchor.size() != dim_) throw DimensionError("DualState::reset: anchor length != dim");
  for (std::size_t i : touched_) {
    std::fill_n(mu_.begin() + static_cast<std::ptrdiff_t>(i * dim_), dim_, 0.0);
    is_touched_[i] = 0;
  }
  touched_.clear();
  std::copy(anchor.begin(), anchor.end(), z_.begin());
  std::fill(gaps_.begin(), gaps_.end(), 0.0);
}

void DualState::mark_touched(std::size_t i) {
  if (!is_touched_[i]) {
    is_touched_[i] = 1;
    touched_.push_back(i);
  }
}

GapReport dual_gap(const DualState& state, std::span<const double> anchor, std::span<const double> alphas,
                   const SdcaTargets& targets, double beta) {
  check_problem(anchor, alphas, targets, beta);
  if (state.m() != targets.m || state.dim() != targets.dim) throw DimensionError("dual_gap: state shape mismatch");
  GapReport rep;
  rep.per_sample.resize(targets.m);
  const auto z = state.z();
  for (std::size_t i = 0; i < targets.m; ++i) {
    const auto mu = state.mu(i);
    const double* x = targets.values.data() + i * targets.dim;
    double mu_norm2 = 0.0;
    double inner = 0.0;
    for (std::size_t k = 0; k < targets.dim; ++k) {
      mu_norm2 += mu[k] * mu[k];
      inner += mu[k] * (z[k] - x[k]);
    }
    if (std::sqrt(mu_norm2) > alphas[i] * (1.0 + kFeasibilitySlack) + kFeasibilitySlack) {
      throw ParameterError("dual_gap: infeasible dual variable " + std::to_string(i));
    }
    rep.per_sample[i] = alphas[i] * distance(z.data(), x, targets.dim) + inner;
    rep.total += rep.per_sample[i];
  }
  return rep;
}

double sdca_primal(std::span<const double> z, std::span<const double> anchor, std::span<const double> alphas,
                   const SdcaTargets& targets, double beta) {
  check_problem(anchor, alphas, targets, beta);
  if (z.size() != targets.dim) throw DimensionError("sdca_primal: z length != dim");
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.m; ++i) {
    if (alphas[i] != 0.0) loss += alphas[i] * distance(z.data(), targets.values.data() + i * targets.dim, targets.dim);
  }
  double coupling = 0.0;
  for (std::size_t k = 0; k < targets.dim; ++k) coupling += (z[k] - anchor[k]) * (z[k] - anchor[k]);
  return loss + 0.5 * beta * coupling;
}

double sdca_dual(const DualState& state, std::span<const double> anchor, const SdcaTargets& targets, double beta) {
  const std::size_t dim = targets.dim;
  std::vector<double> s(dim, 0.0);
  double cross = 0.0;
  for (std::size_t i = 0; i < targets.m; ++i) {
    const auto mu = state.mu(i);
    const double* x = targets.values.data() + i * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      s[k] += mu[k] / beta;
      cross += mu[k] * x[k];
    }
  }
  double quad = 0.0;
  double lin = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    quad += s[k] * s[k];
    lin += s[k] * anchor[k];
  }
  return -beta * (0.5 * quad + lin) + cross;
}

std::size_t gap_sample(std::span<const double> gaps, Rng& rng) {
  double total = 0.0;
  for (double g : gaps) total += std::max(g, 0.0);
  if (!(total > 0.0)) throw ParameterError("gap_sample: all gaps are zero");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double g = std::max(gaps[i], 0.0);
    if (g <= 0.0) continue;
    acc += g;
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

std::size_t gap_sample_greedy(std::span<const double> gaps) {
  if (gaps.empty()) throw ParameterError("gap_sample: empty gap vector");
  const auto it = std::max_element(gaps.begin(), gaps.end());  // first maximum
  if (!(*it > 0.0)) throw ParameterError("gap_sample: all gaps are zero");
  return static_cast<std::size_t>(it - gaps.begin());
}

SdcaResult sdca_solve(DualState& state, std::span<const double> anchor, std::span<const double> alphas,
                      const SdcaTargets& targets, double beta, const SdcaConfig& cfg, Rng& rng,
                      const SdcaObserver& observer) {
  check_problem(anchor, alphas, targets, beta);
  if (state.m() != targets.m || state.dim() != targets.dim) throw DimensionError("sdca: state shape mismatch");
  if (cfg.max_steps < 0) throw ParameterError("sdca: max_steps must be >= 0");
  if (!(cfg.gap_tolerance >= 0.0)) throw ParameterError("sdca: gap tolerance must be >= 0");
  if (cfg.gap_recompute_period < 1) throw ParameterError("sdca: gap recompute period must be >= 1");

  const std::size_t dim = targets.dim;
  const std::size_t m = targets.m;
  std::vector<double> cumulative(m);
  std::vector<double> b(dim);
  auto rebuild_cumulative = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      acc += state.gaps()[i];
      cumulative[i] = acc;
    }
  };

  double total = refresh(state, anchor, alphas, targets, beta);
  rebuild_cumulative();
  int step = 0;
  while (step < cfg.max_steps && total > cfg.gap_tolerance) {
    for (int inner = 0; inner < cfg.gap_recompute_period && step < cfg.max_steps; ++inner) {
      std::size_t i = 0;
      switch (cfg.selection) {
        case CoordinateSelection::gap_proportional: {
          const double u = rng.uniform() * cumulative.back();
          i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
          if (i >= m) i = m - 1;
          break;
        }
        case CoordinateSelection::gap_greedy: {
          const auto gaps = state.gaps();
          const auto it = std::max_element(gaps.begin(), gaps.end());
          if (!(*it > 0.0)) break;
          i = static_cast<std::size_t>(it - gaps.begin());
          break;
        }
        case CoordinateSelection::uniform:
          i = rng.index(m);
          break;
      }
      if (cfg.selection == CoordinateSelection::gap_greedy && !(state.gaps()[i] > 0.0)) break;
      auto mu = state.mu(i);
      auto z = state.z();
      const double* x = targets.values.data() + i * dim;
      double nb2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        b[k] = z[k] - mu[k] / beta - x[k];
        nb2 += b[k] * b[k];
      }
      const double nb = std::sqrt(nb2);
      // mu_i <- -b min(alpha_i / |b|, beta): projection onto the alpha_i-ball.
      const double scale = nb > 0.0 ? std::min(alphas[i] / nb, beta) : 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double updated = -b[k] * scale;
        z[k] += (updated - mu[k]) / beta;
        mu[k] = updated;
      }
      state.mark_touched(i);
      if (cfg.selection == CoordinateSelection::gap_greedy) {
        // Keep the greedy choice from repeating a stale maximum.
        double inner_prod = 0.0;
        for (std::size_t k = 0; k < dim; ++k) inner_prod += mu[k] * (z[k] - x[k]);
        state.gaps()[i] = std::max(0.0, alphas[i] * distance(z.data(), x, dim) + inner_prod);
      }
      ++step;
      if (observer) observer(state, i, step);
    }
    total = refresh(state, anchor, alphas, targets, beta);
    rebuild_cumulative();
  }
  const auto z = state.z();
  return SdcaResult{std::vector<double>(z.begin(), z.end()), total, step};
}

SdcaResult z_update_sdca(std::span<const double> anchor, std::span<const double> alphas, const SdcaTargets& targets,
                         double beta, const SdcaConfig& cfg, Rng& rng, DualState* workspace) {
  if (anchor.size() != targets.dim) throw DimensionError("z_update_sdca: anchor length != target dimension");
  DualState local;
  DualState& state = workspace ? *workspace : local;
  if (state.m() != targets.m || state.dim() != targets.dim) state = DualState(targets.m, targets.dim);

  double mean = 0.0;
  std::vector<double> centered(anchor.begin(), anchor.end());
  if (targets.centered) {
    mean = std::accumulate(centered.begin(), centered.end(), 0.0) / static_cast<double>(centered.size());
    for (double& v : centered) v -= mean;
  }
  state.reset(centered);
  SdcaResult res = sdca_solve(state, centered, alphas, targets, beta, cfg, rng);
  if (targets.centered) {
    for (double& v : res.z) v += mean;
  }
  return res;
}

}  // namespace patchrestore
