#include "patchrestore/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "patchrestore/error.hpp"
#include "patchrestore/image_io.hpp"
#include "patchrestore/parallel.hpp"
#include "patchrestore/rng.hpp"

#ifndef PATCHRESTORE_VERSION
#define PATCHRESTORE_VERSION "0.0.0"
#endif

namespace patchrestore {
namespace fs = std::filesystem;

namespace {

// Salts keep test-image noise and masks apart from the training ones.
constexpr std::uint64_t kTestSalt = 0x1000;
constexpr std::uint64_t kTrainNoiseSalt = 0xDA7A;

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ParameterError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, v, "a number");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string resolve(const std::string& p, const fs::path& base) {
  if (p.empty() || base.empty()) return p;
  const fs::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

std::string selection_name(CoordinateSelection s) {
  switch (s) {
    case CoordinateSelection::gap_proportional: return "proportional";
    case CoordinateSelection::gap_greedy: return "greedy";
    case CoordinateSelection::uniform: return "uniform";
  }
  return "proportional";
}

CoordinateSelection parse_selection(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "proportional" || s == "gap") return CoordinateSelection::gap_proportional;
  if (s == "greedy") return CoordinateSelection::gap_greedy;
  if (s == "uniform") return CoordinateSelection::uniform;
  bad_value(key, v, "proportional|greedy|uniform");
}

struct KeySpec {
  std::string name;
  std::string help;
  bool hashed;
  std::function<void(ExperimentConfig&, const std::string&, const fs::path&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define PR_DOUBLE(key, field, help)                                                                        \
  KeySpec{key, help, true, [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.field = to_double(key, v); }, \
          [](const ExperimentConfig& c) { return fmt_double(c.field); }}
#define PR_INT(key, field, type, help)                                                                     \
  KeySpec{key, help, true, [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.field = to_int<type>(key, v); }, \
          [](const ExperimentConfig& c) { return std::to_string(c.field); }}
#define PR_BOOL(key, field, help)                                                                          \
  KeySpec{key, help, true, [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.field = to_bool(key, v); }, \
          [](const ExperimentConfig& c) { return std::string(c.field ? "true" : "false"); }}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      KeySpec{"task", "deblur | upsample | inpaint | denoise", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.task = parse_task(v); },
              [](const ExperimentConfig& c) { return to_string(c.task); }},
      KeySpec{"solver", "mse | l2-hqs", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.solver = parse_solver(v); },
              [](const ExperimentConfig& c) { return to_string(c.solver); }},
      KeySpec{"kernel", "blur kernel file (deblur)", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path& b) { c.kernel_path = resolve(v, b); },
              [](const ExperimentConfig& c) { return c.kernel_path; }},
      PR_INT("factor", factor, int, "downsampling factor (upsample)"),
      PR_DOUBLE("antialias_sigma", antialias_sigma, "anti-alias Gaussian sigma before decimation"),
      PR_DOUBLE("keep_fraction", keep_fraction, "fraction of observed pixels (inpaint)"),
      PR_INT("mask_seed", mask_seed, std::uint64_t, "seed of the inpainting masks"),
      PR_DOUBLE("noise_sigma", noise_sigma, "additive Gaussian noise level on the [0,1] scale"),
      PR_INT("noise_seed", noise_seed, std::uint64_t, "seed of the observation noise"),
      KeySpec{"dataset", "patch dataset file (PRD1); overrides train_images", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path& b) { c.dataset_path = resolve(v, b); },
              [](const ExperimentConfig& c) { return c.dataset_path; }},
      KeySpec{"train_images", "comma-separated clean training images", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path& b) {
                c.train_images.clear();
                for (const auto& p : to_list(v)) c.train_images.push_back(resolve(p, b));
              },
              [](const ExperimentConfig& c) { return join(c.train_images); }},
      PR_INT("m", m, std::size_t, "number of sampled training patches"),
      PR_INT("patch_size", patch_size, int, "patch side d"),
      PR_INT("dataset_seed", dataset_seed, std::uint64_t, "seed of the patch sampler"),
      KeySpec{"images", "comma-separated clean test images", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path& b) {
                c.images.clear();
                for (const auto& p : to_list(v)) c.images.push_back(resolve(p, b));
              },
              [](const ExperimentConfig& c) { return join(c.images); }},
      KeySpec{"output_dir", "directory for restored images and reports", false,
              [](ExperimentConfig& c, const std::string& v, const fs::path& b) { c.output_dir = resolve(v, b); },
              [](const ExperimentConfig& c) { return c.output_dir; }},
      KeySpec{"workers", "concurrent restorations (0 = all cores)", false,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) { c.workers = to_int<int>("workers", v); },
              [](const ExperimentConfig& c) { return std::to_string(c.workers); }},
      PR_DOUBLE("gamma", solver_config.gamma, "data fidelity weight"),
      PR_DOUBLE("beta0", solver_config.beta0, "initial HQS coupling weight"),
      PR_DOUBLE("delta", solver_config.delta, "HQS coupling growth factor"),
      PR_INT("iterations", solver_config.iterations, int, "HQS iterations T"),
      PR_INT("sdca_max_steps", solver_config.sdca.max_steps, int, "SDCA step budget per patch"),
      PR_DOUBLE("sdca_gap_tolerance", solver_config.sdca.gap_tolerance, "SDCA duality gap tolerance"),
      PR_INT("sdca_gap_period", solver_config.sdca.gap_recompute_period, int, "SDCA steps between gap recomputes"),
      KeySpec{"sdca_selection", "proportional | greedy | uniform", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) {
                c.solver_config.sdca.selection = parse_selection("sdca_selection", v);
              },
              [](const ExperimentConfig& c) { return selection_name(c.solver_config.sdca.selection); }},
      KeySpec{"estimator", "nw | krr", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) {
                const std::string s = lower(v);
                if (s == "nw") c.solver_config.estimator = EstimatorKind::nadaraya_watson;
                else if (s == "krr") c.solver_config.estimator = EstimatorKind::kernel_ridge;
                else bad_value("estimator", v, "nw|krr");
              },
              [](const ExperimentConfig& c) {
                return std::string(c.solver_config.estimator == EstimatorKind::nadaraya_watson ? "nw" : "krr");
              }},
      PR_DOUBLE("krr_lambda", solver_config.krr_lambda, "KRR regularization (<= 0: automatic)"),
      PR_DOUBLE("krr_q", solver_config.krr_q, "patch correlation constant used by the automatic lambda"),
      PR_BOOL("recompute_alpha", solver_config.recompute_alpha, "recompute weights every HQS iteration"),
      KeySpec{"alpha_schedule", "degraded | switch", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) {
                const std::string s = lower(v);
                if (s == "degraded") c.solver_config.alpha_schedule = AlphaSchedule::always_degraded;
                else if (s == "switch") c.solver_config.alpha_schedule = AlphaSchedule::switch_to_clean;
                else bad_value("alpha_schedule", v, "degraded|switch");
              },
              [](const ExperimentConfig& c) {
                return std::string(c.solver_config.alpha_schedule == AlphaSchedule::always_degraded ? "degraded"
                                                                                                     : "switch");
              }},
      PR_DOUBLE("bandwidth_scale", solver_config.bandwidth_scale, "kernel bandwidth scale s"),
      KeySpec{"bandwidth_source", "degraded | clean", true,
              [](ExperimentConfig& c, const std::string& v, const fs::path&) {
                const std::string s = lower(v);
                if (s == "degraded") c.solver_config.bandwidth_source = BandwidthSource::degraded;
                else if (s == "clean") c.solver_config.bandwidth_source = BandwidthSource::clean;
                else bad_value("bandwidth_source", v, "degraded|clean");
              },
              [](const ExperimentConfig& c) {
                return std::string(c.solver_config.bandwidth_source == BandwidthSource::degraded ? "degraded"
                                                                                                 : "clean");
              }},
      PR_BOOL("drop_dc", solver_config.drop_dc, "ignore patch means in the kernel"),
      PR_BOOL("center_patches", solver_config.center_patches, "mean-subtract patches in the z-update"),
      PR_BOOL("warm_start_duals", solver_config.warm_start_duals, "carry SDCA duals across HQS iterations"),
      PR_BOOL("safeguard", solver_config.monotone_safeguard, "keep z_p when SDCA does not improve it"),
      PR_DOUBLE("cg_tolerance", solver_config.cg_tolerance, "CG relative residual tolerance"),
      PR_INT("cg_max_iterations", solver_config.cg_max_iterations, int, "CG iteration cap"),
      PR_INT("seed", solver_config.seed, std::uint64_t, "seed of the SDCA streams"),
  };
  return specs;
}

#undef PR_DOUBLE
#undef PR_INT
#undef PR_BOOL

const KeySpec& find_key(const std::string& key) {
  for (const auto& s : key_specs()) {
    if (s.name == key) return s;
  }
  throw ParameterError("unknown config key '" + key + "'");
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::deblur: return "deblur";
    case Task::upsample: return "upsample";
    case Task::inpaint: return "inpaint";
    case Task::denoise: return "denoise";
  }
  return "deblur";
}

std::string to_string(SolverKind solver) { return solver == SolverKind::mse ? "mse" : "l2-hqs"; }

Task parse_task(const std::string& s) {
  const std::string t = lower(trim(s));
  if (t == "deblur") return Task::deblur;
  if (t == "upsample") return Task::upsample;
  if (t == "inpaint") return Task::inpaint;
  if (t == "denoise") return Task::denoise;
  throw ParameterError("unknown task '" + s + "' (deblur|upsample|inpaint|denoise)");
}

SolverKind parse_solver(const std::string& s) {
  const std::string t = lower(trim(s));
  if (t == "mse") return SolverKind::mse;
  if (t == "l2-hqs" || t == "l2_hqs" || t == "hqs") return SolverKind::l2_hqs;
  throw ParameterError("unknown solver '" + s + "' (mse|l2-hqs)");
}

ExperimentConfig default_config(Task task, SolverKind solver) {
  ExperimentConfig c;
  c.task = task;
  c.solver = solver;
  SolverConfig& s = c.solver_config;
  if (task == Task::upsample) {
    c.noise_sigma = 0.0;
    s.gamma = 6000.0;
    s.beta0 = 0.5;
    s.delta = 2.0;
    s.iterations = 3;
  } else {
    s.gamma = 3200.0;
    s.beta0 = 3.0;
    s.delta = 2.0;
    s.iterations = 8;
  }
  if (solver == SolverKind::mse) s.gamma = 5000.0;
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_specs()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

std::string config_key_help(const std::string& key) { return find_key(key).help; }

ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    std::replace(key.begin(), key.end(), '-', '_');
    find_key(key);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const fs::path& base_dir) {
  std::string k = key;
  std::replace(k.begin(), k.end(), '-', '_');
  find_key(k).set(cfg, trim(value), base_dir);
}

ExperimentConfig make_config(const ConfigEntries& entries, const fs::path& base_dir) {
  Task task = Task::deblur;
  SolverKind solver = SolverKind::l2_hqs;
  for (const auto& [k, v] : entries) {
    if (k == "task") task = parse_task(v);
    if (k == "solver") solver = parse_solver(v);
  }
  ExperimentConfig cfg = default_config(task, solver);
  for (const auto& [k, v] : entries) set_config_value(cfg, k, v, base_dir);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ConfigEntries& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ConfigEntries entries = parse_config_text(ss.str());
  const fs::path base = fs::path(path).parent_path();
  // Overrides come from the command line and resolve against the cwd, so
  // they are applied after the defaults are chosen from the merged list.
  ConfigEntries merged = entries;
  merged.insert(merged.end(), overrides.begin(), overrides.end());
  Task task = Task::deblur;
  SolverKind solver = SolverKind::l2_hqs;
  for (const auto& [k, v] : merged) {
    if (k == "task") task = parse_task(v);
    if (k == "solver") solver = parse_solver(v);
  }
  ExperimentConfig cfg = default_config(task, solver);
  for (const auto& [k, v] : entries) set_config_value(cfg, k, v, base);
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v, fs::current_path());
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.solver_config);
  if (cfg.images.empty()) throw ParameterError("config: no test images");
  for (const auto& p : cfg.images) {
    if (!fs::exists(p)) throw IoError("config: test image not found: " + p);
  }
  if (cfg.dataset_path.empty()) {
    if (cfg.train_images.empty()) throw ParameterError("config: set either dataset or train_images");
    for (const auto& p : cfg.train_images) {
      if (!fs::exists(p)) throw IoError("config: training image not found: " + p);
    }
  } else if (!fs::exists(cfg.dataset_path)) {
    throw IoError("config: dataset not found: " + cfg.dataset_path);
  }
  if (cfg.task == Task::deblur) {
    if (cfg.kernel_path.empty()) throw ParameterError("config: deblur needs a kernel file");
    if (!fs::exists(cfg.kernel_path)) throw IoError("config: kernel not found: " + cfg.kernel_path);
  }
  if (cfg.task == Task::upsample) {
    if (cfg.factor < 1) throw ParameterError("config: factor must be >= 1");
    if (cfg.patch_size % cfg.factor != 0) throw ParameterError("config: patch_size must be a multiple of factor");
    if (!(cfg.antialias_sigma >= 0.0)) throw ParameterError("config: antialias_sigma must be >= 0");
  }
  if (cfg.task == Task::inpaint && !(cfg.keep_fraction > 0.0 && cfg.keep_fraction <= 1.0)) {
    throw ParameterError("config: keep_fraction must lie in (0, 1]");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ParameterError("config: noise_sigma must be >= 0");
  if (cfg.m < 1) throw ParameterError("config: m must be >= 1");
  if (cfg.patch_size < 1) throw ParameterError("config: patch_size must be >= 1");
  if (cfg.workers < 0) throw ParameterError("config: workers must be >= 0");
  if (cfg.solver == SolverKind::l2_hqs && cfg.solver_config.estimator != EstimatorKind::nadaraya_watson) {
    throw ParameterError("config: the l2-hqs solver needs estimator = nw");
  }
}

std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& s : key_specs()) {
    if (s.hashed) out[s.name] = s.get(cfg);
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : config_to_map(cfg)) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OperatorSpec operator_spec(const ExperimentConfig& cfg) {
  OperatorSpec spec;
  switch (cfg.task) {
    case Task::deblur:
      spec.kind = DegradationOperator::Kind::blur;
      spec.kernel = load_blur_kernel(cfg.kernel_path);
      break;
    case Task::upsample:
      spec.kind = DegradationOperator::Kind::downsample;
      spec.factor = cfg.factor;
      spec.antialias_sigma = cfg.antialias_sigma;
      break;
    case Task::inpaint:
      spec.kind = DegradationOperator::Kind::mask;
      spec.keep_fraction = cfg.keep_fraction;
      spec.mask_seed = cfg.mask_seed;
      break;
    case Task::denoise:
      spec.kind = DegradationOperator::Kind::identity;
      break;
  }
  return spec;
}

PatchDataset build_dataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset_path.empty()) {
    PatchDataset ds = read_patch_dataset(cfg.dataset_path);
    if (ds.clean_side != cfg.patch_size) {
      throw ParameterError("dataset patch size " + std::to_string(ds.clean_side) + " != patch_size " +
                           std::to_string(cfg.patch_size));
    }
    return ds;
  }
  std::vector<Image> train;
  for (const auto& p : cfg.train_images) train.push_back(load_image(p));
  const NoiseModel noise{cfg.noise_sigma, derive_seed(cfg.noise_seed, kTrainNoiseSalt)};
  return sample_patch_dataset(train, operator_spec(cfg), noise, cfg.m, cfg.patch_size, cfg.dataset_seed);
}

ImageResult restore_one(const ExperimentConfig& cfg, const PatchDataset& data, const Image& clean,
                        std::size_t index, int inner_workers) {
  const DegradationOperator op = operator_spec(cfg).build(clean.width(), clean.height(), kTestSalt + index);
  ImageResult r;
  r.clean = clean;
  r.degraded = degrade(op, clean, NoiseModel{cfg.noise_sigma, derive_seed(cfg.noise_seed, kTestSalt + index)});
  r.psnr_degraded = psnr(initial_estimate(r.degraded, op), clean);
  SolverConfig sc = cfg.solver_config;
  sc.workers = inner_workers;
  if (cfg.solver == SolverKind::mse) {
    r.restored = restore_mse(r.degraded, op, data, sc);
  } else {
    HqsResult h = hqs_restore(r.degraded, op, data, sc, &clean);
    r.restored = std::move(h.x);
    r.trace = std::move(h.trace);
  }
  r.psnr_restored = psnr(r.restored, clean);
  return r;
}

RunReport run_experiment(const ExperimentConfig& cfg, bool write_outputs) {
  validate(cfg);
  const PatchDataset data = build_dataset(cfg);
  std::vector<Image> clean;
  for (const auto& p : cfg.images) clean.push_back(load_image(p));

  RunReport report;
  report.config_hash = config_hash(cfg);
  report.version = library_version();
  report.images.resize(clean.size());
  const int workers = cfg.workers > 0 ? cfg.workers : worker_count();
  if (clean.size() >= 2 && workers > 1) {
    parallel_for_chunks(
        clean.size(),
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t i = begin; i < end; ++i) report.images[i] = restore_one(cfg, data, clean[i], i, 1);
        },
        std::min<int>(workers, static_cast<int>(clean.size())));
  } else {
    for (std::size_t i = 0; i < clean.size(); ++i) {
      report.images[i] = restore_one(cfg, data, clean[i], i, cfg.solver_config.workers);
    }
  }
  for (std::size_t i = 0; i < clean.size(); ++i) report.images[i].name = stem_of(cfg.images[i]);
  for (const auto& r : report.images) {
    report.mean_psnr_degraded += r.psnr_degraded;
    report.mean_psnr_restored += r.psnr_restored;
  }
  report.mean_psnr_degraded /= static_cast<double>(clean.size());
  report.mean_psnr_restored /= static_cast<double>(clean.size());

  if (write_outputs) {
    const fs::path out(cfg.output_dir);
    fs::create_directories(out / "degraded");
    fs::create_directories(out / "restored");
    for (const auto& r : report.images) {
      save_image(r.degraded, (out / "degraded" / (r.name + ".pgm")).string());
      save_image(r.restored, (out / "restored" / (r.name + ".pgm")).string());
      if (!r.trace.empty()) {
        fs::create_directories(out / "traces");
        write_text(out / "traces" / (r.name + ".csv"), trace_csv(r.trace));
      }
    }
    write_text(out / "report.csv", report_csv(report, cfg));
    write_text(out / "summary.csv", summary_csv(report));
  }
  return report;
}

std::string format_psnr(double value, int digits) {
  if (std::isinf(value) && value > 0) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string report_csv(const RunReport& report, const ExperimentConfig& cfg) {
  std::string out = "image,task,solver,psnr_degraded,psnr_restored,config_hash,version\n";
  for (const auto& r : report.images) {
    out += r.name + "," + to_string(cfg.task) + "," + to_string(cfg.solver) + "," + format_psnr(r.psnr_degraded, 6) +
           "," + format_psnr(r.psnr_restored, 6) + "," + report.config_hash + "," + report.version + "\n";
  }
  return out;
}

std::string summary_csv(const RunReport& report) {
  return "images,mean_psnr_degraded,mean_psnr_restored,config_hash,version\n" +
         std::to_string(report.images.size()) + "," + format_psnr(report.mean_psnr_degraded, 6) + "," +
         format_psnr(report.mean_psnr_restored, 6) + "," + report.config_hash + "," + report.version + "\n";
}

std::string trace_csv(const std::vector<HqsIterationRecord>& trace) {
  std::string out =
      "iter,beta,energy,psnr,energy_before,energy_after_z,mean_gap,max_gap,sdca_steps,cg_iterations,"
      "safeguard_kept\n";
  char buf[512];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.10g,%s,%.10g,%.10g,%.6g,%.6g,%ld,%d,%ld\n", t.iteration, t.beta,
                  t.energy, std::isnan(t.psnr) ? "nan" : format_psnr(t.psnr, 6).c_str(), t.energy_before,
                  t.energy_after_z, t.mean_gap, t.max_gap, t.sdca_steps, t.cg_iterations, t.safeguard_kept);
    out += buf;
  }
  return out;
}

std::string library_version() { return PATCHRESTORE_VERSION; }

}  // namespace patchrestore
