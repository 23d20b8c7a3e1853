#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "patchrestore/dataset.hpp"
#include "patchrestore/degrade.hpp"
#include "patchrestore/restore.hpp"

namespace patchrestore {

enum class Task { deblur, upsample, inpaint, denoise };
enum class SolverKind { mse, l2_hqs };

std::string to_string(Task task);
std::string to_string(SolverKind solver);
Task parse_task(const std::string& s);
SolverKind parse_solver(const std::string& s);

struct ExperimentConfig {
  Task task = Task::deblur;
  SolverKind solver = SolverKind::l2_hqs;

  // Formation model.
  std::string kernel_path;
  int factor = 2;
  double antialias_sigma = 0.8;
  double keep_fraction = 0.5;
  std::uint64_t mask_seed = 0;
  double noise_sigma = 0.01;
  std::uint64_t noise_seed = 1;

  // Training patches: a PRD1 file, or sampled from train_images.
  std::string dataset_path;
  std::vector<std::string> train_images;
  std::size_t m = 2000;
  int patch_size = 8;
  std::uint64_t dataset_seed = 0;

  std::vector<std::string> images;
  SolverConfig solver_config;
  std::string output_dir = "out";
  /// Concurrent restorations; 0 = worker_count().
  int workers = 0;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Paper settings for the task/solver pair (gamma, beta0, delta, T, noise).
ExperimentConfig default_config(Task task, SolverKind solver);

/// Recognized keys, in canonical order.
const std::vector<std::string>& config_keys();
std::string config_key_help(const std::string& key);

/// Lines of `key = value`; '#' starts a comment. Throws ParameterError with
/// the line number on malformed lines.
ConfigEntries parse_config_text(const std::string& text);

/// Starts from default_config for the task/solver named in the entries (last
/// occurrence wins), then applies every entry in order. Relative paths are
/// resolved against base_dir.
ExperimentConfig make_config(const ConfigEntries& entries, const std::filesystem::path& base_dir = {});
/// Reads a config file and applies `overrides` after its entries.
ExperimentConfig load_config(const std::string& path, const ConfigEntries& overrides = {});

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});
/// Checks ranges and that referenced files exist.
void validate(const ExperimentConfig& cfg);

/// Canonical key=value form of every result-affecting field.
std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg);
/// 16 hex digits of FNV-1a over the canonical form.
std::string config_hash(const ExperimentConfig& cfg);

OperatorSpec operator_spec(const ExperimentConfig& cfg);
PatchDataset build_dataset(const ExperimentConfig& cfg);

struct ImageResult {
  std::string name;
  Image clean;
  Image degraded;
  Image restored;
  /// PSNR of the observation, or of its bicubic upsampling for the upsample task.
  double psnr_degraded = 0.0;
  double psnr_restored = 0.0;
  std::vector<HqsIterationRecord> trace;
};

/// Degrades one clean image (noise and mask salted by `index`) and restores it.
ImageResult restore_one(const ExperimentConfig& cfg, const PatchDataset& data, const Image& clean,
                        std::size_t index, int inner_workers = 0);

struct RunReport {
  std::string config_hash;
  std::string version;
  std::vector<ImageResult> images;
  double mean_psnr_degraded = 0.0;
  double mean_psnr_restored = 0.0;
};

/// Runs degrade -> restore -> psnr over cfg.images. With write_outputs, fills
/// output_dir with report.csv, summary.csv, degraded/, restored/, traces/.
RunReport run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

std::string report_csv(const RunReport& report, const ExperimentConfig& cfg);
std::string summary_csv(const RunReport& report);
std::string trace_csv(const std::vector<HqsIterationRecord>& trace);

/// "inf" for infinite PSNR, otherwise fixed with `digits` decimals.
std::string format_psnr(double value, int digits = 2);

std::string library_version();

}  // namespace patchrestore
