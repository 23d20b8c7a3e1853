#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "patchrestore/dataset.hpp"
#include "patchrestore/degrade.hpp"
#include "patchrestore/features.hpp"
#include "patchrestore/image.hpp"
#include "patchrestore/linsolve.hpp"
#include "patchrestore/sdca.hpp"
#include "patchrestore/weights.hpp"

namespace patchrestore {

/// Which patch population the similarity kernel compares after the first
/// HQS iteration.
enum class AlphaSchedule {
  always_degraded,  ///< degraded input patches vs degraded training patches
  switch_to_clean,  ///< from iteration 2: current estimate vs clean training patches
};

/// Population used to set the bandwidth of the degraded-patch kernel.
enum class BandwidthSource { degraded, clean };

struct HqsIterationView;
struct HqsStepView;

struct SolverConfig {
  /// Fidelity weight on (1/2)|y - Bx|^2.
  double gamma = 3200.0;
  /// Initial coupling weight on (1/2)|x_p - z_p|^2.
  double beta0 = 3.0;
  double delta = 2.0;
  int iterations = 8;
  SdcaConfig sdca{};
  EstimatorKind estimator = EstimatorKind::nadaraya_watson;
  /// KRR regularization; <= 0 selects krr_lambda(1, m, krr_q, |P|, 1).
  double krr_lambda = 0.0;
  double krr_q = 0.0;
  bool recompute_alpha = true;
  AlphaSchedule alpha_schedule = AlphaSchedule::switch_to_clean;
  double bandwidth_scale = 0.2;
  BandwidthSource bandwidth_source = BandwidthSource::degraded;
  bool drop_dc = false;
  bool center_patches = true;
  /// Reuse each patch's duals (projected onto the new weight balls) in the
  /// next HQS iteration instead of restarting from zero.
  bool warm_start_duals = false;
  /// Keep the previous z_p when it scores lower on the current z-subproblem
  /// than the SDCA output (possible when SDCA stops on its step budget).
  bool monotone_safeguard = true;
  double cg_tolerance = 1e-6;
  int cg_max_iterations = 1000;
  std::uint64_t seed = 0;
  /// 0 = worker_count().
  int workers = 0;
  std::function<void(const HqsIterationView&)> observer;
  /// Called after the z-step and after the x-step of every iteration.
  std::function<void(const HqsStepView&)> step_observer;
};

void validate(const SolverConfig& cfg);

/// Per-patch quantities of the MSE normal equations: a_p = sum_i alpha_i and
/// w_p = sum_i alpha_i x_i (|P| x d^2).
struct MseTargets {
  std::vector<double> mass;
  std::vector<double> weighted_patches;
};

/// Solves (gamma B'B + sum_p a_p R_p'R_p) x = gamma B'y + sum_p R_p' w_p.
Image solve_mse(const Image& y, const DegradationOperator& op, const PatchGrid& grid, const MseTargets& targets,
                double gamma, const CGConfig& cg = {});

/// Same system with explicit per-patch weights over the dataset's clean patches.
Image solve_mse(const Image& y, const DegradationOperator& op, const PatchDataset& data,
                std::span<const WeightVector> weights, double gamma, const CGConfig& cg = {});

/// Solves (beta sum_p R_p'R_p + gamma B'B) x = beta sum_p R_p' z_p + gamma B'y
/// for a |P| x d^2 array of z patches; cg.initial_guess warm-starts it.
CGResult x_update(std::span<const double> z_patches, const PatchGrid& grid, const Image& y,
                  const DegradationOperator& op, double beta, double gamma, const CGConfig& cg = {});

/// sum_p sum_i alpha_i(p) |x_p - x_i| + (gamma / 2) |y - Bx|^2.
double energy_l2(const Image& x, const Image& y, const DegradationOperator& op, const PatchDataset& data,
                 std::span<const WeightVector> weights, double gamma);

/// The split objective
///   sum_p sum_i alpha_i(p) |z_p - s_p - t_i| + (gamma/2)|y - Bx|^2 + (beta/2) sum_p |x_p - z_p|^2
/// where t_i are the SDCA targets and s_p the per-patch shift (zero unless the
/// targets are centered, in which case it is the anchor mean of patch p).
double hqs_energy(const Image& x, std::span<const double> z_patches, const PatchGrid& grid, const Image& y,
                  const DegradationOperator& op, const SdcaTargets& targets, std::span<const WeightVector> weights,
                  std::span<const double> shifts, double beta, double gamma);

/// x^(0): y itself, or its bicubic upsampling when B decimates.
Image initial_estimate(const Image& y, const DegradationOperator& op);

/// Features of the degraded query patch co-located with each clean patch of
/// `grid`. For decimating operators the query is the (d/k) x (d/k) patch of y
/// at the low-resolution corner (row / k, col / k).
FeatureMatrix degraded_query_features(const Image& y, const DegradationOperator& op, const PatchGrid& grid,
                                      int degraded_side, bool drop_dc = false);

/// Per-patch weights for every row of `queries` against `train`.
std::vector<WeightVector> compute_patch_weights(const FeatureMatrix& queries, const FeatureMatrix& train,
                                                const KernelModel& kernel, EstimatorKind kind,
                                                double krr_lambda = 0.0);

/// One-shot MSE restoration: weights from the degraded input, then solve_mse.
Image restore_mse(const Image& y, const DegradationOperator& op, const PatchDataset& data, const SolverConfig& cfg);

struct HqsIterationRecord {
  int iteration = 0;
  double beta = 0.0;
  /// Split objective at (x^(t-1), z^(t-1)), after z-step, after x-step.
  double energy_before = 0.0;
  double energy_after_z = 0.0;
  double energy = 0.0;
  /// PSNR of x^(t) against the reference; NaN without one.
  double psnr = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
  long sdca_steps = 0;
  int cg_iterations = 0;
  /// Patches whose previous z_p was kept by the monotone safeguard.
  long safeguard_kept = 0;
};

struct HqsResult {
  Image x;
  std::vector<HqsIterationRecord> trace;
};

/// State handed to SolverConfig::observer at the start of each iteration,
/// before the weights are computed.
struct HqsIterationView {
  int iteration = 0;  // 1-based
  double beta = 0.0;
  /// The estimate x^(t-1).
  const Image* estimate = nullptr;
  /// Image whose patches are compared against the training set, and the
  /// kernel used: y with the degraded kernel, or x^(t-1) with the clean one.
  const Image* query_image = nullptr;
  bool query_is_degraded = true;
  KernelModel kernel;
};

struct HqsStepView {
  enum class Stage { after_z, after_x };
  int iteration = 0;
  Stage stage = Stage::after_z;
  double beta = 0.0;
  const Image* x = nullptr;
  std::span<const double> z_patches;
  /// Per-patch shifts of this iteration's loss term (see hqs_energy).
  std::span<const double> shifts;
};

/// Half-quadratic splitting over the Euclidean-loss energy with SDCA z-updates.
/// Requires Nadaraya-Watson weights.
HqsResult hqs_restore(const Image& y, const DegradationOperator& op, const PatchDataset& data,
                      const SolverConfig& cfg, const Image* reference = nullptr);

}  // namespace patchrestore
