#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "patchrestore/dataset.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {

// Stochastic dual coordinate ascent for the weighted Euclidean-loss
// subproblem
//
//   min_z  sum_i alpha_i |z - x_i|_2 + (beta / 2) |z - a|_2^2
//
// with anchor a and nonnegative weights alpha. Each dual variable mu_i lives
// in the ball of radius alpha_i; the primal iterate is tied to the duals by
// z = a + sum_i mu_i / beta.

/// Training targets x_i as an m x dim row-major array, optionally
/// mean-subtracted per patch.
struct SdcaTargets {
  std::size_t m = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  bool centered = false;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

SdcaTargets make_sdca_targets(const PatchDataset& data, bool center = true);
SdcaTargets make_sdca_targets(std::span<const double> patches, std::size_t dim, bool center);

/// Dual variables, per-sample gaps from the last recompute, and the primal
/// iterate. Rows of mu that were never updated are exactly zero.
class DualState {
 public:
  DualState() = default;
  DualState(std::size_t m, std::size_t dim);

  /// mu = 0, z = anchor.
  void reset(std::span<const double> anchor);

  std::size_t m() const { return m_; }
  std::size_t dim() const { return dim_; }
  std::span<double> mu(std::size_t i) { return {mu_.data() + i * dim_, dim_}; }
  std::span<const double> mu(std::size_t i) const { return {mu_.data() + i * dim_, dim_}; }
  std::span<double> z() { return z_; }
  std::span<const double> z() const { return z_; }
  std::span<double> gaps() { return gaps_; }
  std::span<const double> gaps() const { return gaps_; }
  const std::vector<std::size_t>& touched() const { return touched_; }
  void mark_touched(std::size_t i);

 private:
  std::size_t m_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> mu_;
  std::vector<double> z_;
  std::vector<double> gaps_;
  std::vector<char> is_touched_;
  std::vector<std::size_t> touched_;
};

struct GapReport {
  double total = 0.0;
  std::vector<double> per_sample;
};

/// g_i = alpha_i |z - x_i| + mu_i'(z - x_i), summing to primal minus dual.
/// Throws ParameterError if some |mu_i| exceeds alpha_i.
GapReport dual_gap(const DualState& state, std::span<const double> anchor, std::span<const double> alphas,
                   const SdcaTargets& targets, double beta);

/// sum_i alpha_i |z - x_i| + (beta / 2) |z - a|^2.
double sdca_primal(std::span<const double> z, std::span<const double> anchor, std::span<const double> alphas,
                   const SdcaTargets& targets, double beta);
/// -beta (|s|^2 / 2 + s'a) + sum_i mu_i'x_i with s = sum_i mu_i / beta.
double sdca_dual(const DualState& state, std::span<const double> anchor, const SdcaTargets& targets, double beta);

/// Draws i with probability g_i / sum_j g_j. Throws if every gap is zero.
std::size_t gap_sample(std::span<const double> gaps, Rng& rng);
/// argmax_i g_i, ties to the lowest index. Throws if every gap is zero.
std::size_t gap_sample_greedy(std::span<const double> gaps);

enum class CoordinateSelection { gap_proportional, gap_greedy, uniform };

struct SdcaConfig {
  int max_steps = 500;
  double gap_tolerance = 1e-4;
  /// Steps between full gap recomputations; sampling reuses stale gaps.
  int gap_recompute_period = 25;
  CoordinateSelection selection = CoordinateSelection::gap_proportional;
};

struct SdcaResult {
  std::vector<double> z;
  /// Exact duality gap of the returned iterate.
  double gap = 0.0;
  int steps = 0;
};

/// Called after every coordinate step with the sampled index.
using SdcaObserver = std::function<void(const DualState& state, std::size_t index, int step)>;

/// Runs coordinate steps on `state` until the gap drops to the tolerance or
/// the step budget is spent. The state must satisfy the primal-dual link on
/// entry (reset() establishes it).
SdcaResult sdca_solve(DualState& state, std::span<const double> anchor, std::span<const double> alphas,
                      const SdcaTargets& targets, double beta, const SdcaConfig& cfg, Rng& rng,
                      const SdcaObserver& observer = {});

/// One HQS z_p update. When the targets are centered the anchor is centered
/// too and its mean is added back to the solution. `workspace` may be reused
/// across calls with the same (m, dim).
SdcaResult z_update_sdca(std::span<const double> anchor, std::span<const double> alphas, const SdcaTargets& targets,
                         double beta, const SdcaConfig& cfg, Rng& rng, DualState* workspace = nullptr);

}  // namespace patchrestore
