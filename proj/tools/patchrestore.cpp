// Command-line front end: sample, degrade, restore, psnr, bench, theory.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchrestore/dataset.hpp"
#include "patchrestore/degrade.hpp"
#include "patchrestore/error.hpp"
#include "patchrestore/experiment.hpp"
#include "patchrestore/image_io.hpp"
#include "patchrestore/restore.hpp"
#include "patchrestore/theory.hpp"

namespace pr = patchrestore;

namespace {

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const pr::DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const pr::IndexError*>(&e)) return "index";
  if (dynamic_cast<const pr::ParameterError*>(&e)) return "parameter";
  if (dynamic_cast<const pr::FormatError*>(&e)) return "format";
  if (dynamic_cast<const pr::IoError*>(&e)) return "io";
  if (dynamic_cast<const pr::NonConvergence*>(&e)) return "nonconvergence";
  if (dynamic_cast<const pr::IndefiniteOperator*>(&e)) return "indefinite";
  return "internal";
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

// One string option per config key; unset ones are left out of the overrides.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key = value config file");
    for (const auto& key : pr::config_keys()) {
      app->add_option(flag_name(key), values[key], pr::config_key_help(key));
    }
  }

  pr::ExperimentConfig resolve(CLI::App* app) const {
    pr::ConfigEntries overrides;
    for (const auto& key : pr::config_keys()) {
      if (app->get_option(flag_name(key))->count() > 0) overrides.emplace_back(key, values.at(key));
    }
    if (!config_path.empty()) return pr::load_config(config_path, overrides);
    return pr::make_config(overrides, std::filesystem::current_path());
  }
};

void print_line(const std::string& s) { std::cout << s << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-regularized image restoration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pr::library_version());

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a training patch dataset from clean images");
  ConfigFlags sample_flags;
  sample_flags.attach(sample);
  std::string sample_out;
  sample->add_option("-o,--output", sample_out, "dataset file to write")->required();

  // degrade
  auto* deg = app.add_subcommand("degrade", "Apply a formation model y = Bx + noise");
  std::string deg_in, deg_out, deg_task = "denoise", deg_kernel;
  int deg_factor = 2;
  double deg_aa = 0.8, deg_keep = 0.5, deg_sigma = 0.0;
  std::uint64_t deg_mask_seed = 0, deg_noise_seed = 1;
  deg->add_option("-i,--input", deg_in, "clean image")->required();
  deg->add_option("-o,--output", deg_out, "degraded image (.pgm or .png)")->required();
  deg->add_option("--task", deg_task, "deblur | upsample | inpaint | denoise");
  deg->add_option("--kernel", deg_kernel, "blur kernel file");
  deg->add_option("--factor", deg_factor, "downsampling factor");
  deg->add_option("--antialias-sigma", deg_aa, "anti-alias sigma");
  deg->add_option("--keep-fraction", deg_keep, "observed pixel fraction");
  deg->add_option("--mask-seed", deg_mask_seed, "mask seed");
  deg->add_option("--noise-sigma", deg_sigma, "Gaussian noise sigma");
  deg->add_option("--noise-seed", deg_noise_seed, "noise seed");

  // restore
  auto* rest = app.add_subcommand("restore", "Restore one degraded image");
  ConfigFlags rest_flags;
  rest_flags.attach(rest);
  std::string rest_in, rest_out, rest_ref, rest_trace;
  int rest_w = 0, rest_h = 0;
  rest->add_option("-i,--input", rest_in, "degraded observation")->required();
  rest->add_option("-o,--output", rest_out, "restored image")->required();
  rest->add_option("--reference", rest_ref, "clean image; prints PSNR before and after");
  rest->add_option("--trace", rest_trace, "write the HQS energy trace CSV here");
  rest->add_option("--width", rest_w, "restored width (upsample; default factor x input)");
  rest->add_option("--height", rest_h, "restored height (upsample; default factor x input)");

  // psnr
  auto* ps = app.add_subcommand("psnr", "PSNR between two images of equal size");
  std::string ps_a, ps_b;
  ps->add_option("a", ps_a, "first image")->required();
  ps->add_option("b", ps_b, "second image")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Degrade, restore and score a list of images");
  ConfigFlags bench_flags;
  bench_flags.attach(bench);

  // theory
  auto* theory = app.add_subcommand("theory", "Locality constants and correlation maps");
  theory->require_subcommand(1);
  auto* cb = theory->add_subcommand("c-bound", "Closed-form bound on c_{B,sigma}");
  std::optional<double> cb_inpaint, cb_denoise;
  std::optional<int> cb_down;
  std::size_t cb_pixels = 1;
  int cb_precision = 2;
  auto* opt_inpaint = cb->add_option("--inpaint", cb_inpaint, "observed fraction s");
  auto* opt_down = cb->add_option("--downsample", cb_down, "factor k");
  auto* opt_denoise = cb->add_option("--denoise", cb_denoise, "noise sigma (inf allowed)");
  cb->add_option("--pixels", cb_pixels, "pixel count of the image domain (denoise)");
  cb->add_option("--precision", cb_precision, "decimals printed");
  opt_inpaint->excludes(opt_down)->excludes(opt_denoise);
  opt_down->excludes(opt_denoise);

  auto* q = theory->add_subcommand("q", "Estimate the total patch correlation q");
  std::vector<std::string> q_images;
  int q_patch = 8;
  std::size_t q_pairs = 10000;
  std::uint64_t q_seed = 0;
  double q_scale = 0.2;
  bool q_exhaustive = false;
  std::string q_csv;
  q->add_option("images", q_images, "two or more equally sized images")->required();
  q->add_option("--patch-size", q_patch, "patch side");
  q->add_option("--pairs", q_pairs, "Monte-Carlo patch pairs");
  q->add_option("--seed", q_seed, "sampling seed");
  q->add_option("--bandwidth-scale", q_scale, "bandwidth scale over the corpus features");
  q->add_flag("--exhaustive", q_exhaustive, "sum over all patch pairs (small images only)");
  q->add_option("--csv", q_csv, "append the estimate as a CSV row to this file");

  auto* cm = theory->add_subcommand("corr-map", "Correlation of one patch with all others");
  std::string cm_image, cm_out;
  int cm_patch = 8;
  std::optional<int> cm_row, cm_col;
  std::optional<double> cm_bw;
  double cm_scale = 0.2;
  cm->add_option("image", cm_image, "image")->required();
  cm->add_option("-o,--output", cm_out, "heatmap image (.pgm or .png)");
  cm->add_option("--patch-size", cm_patch, "patch side");
  cm->add_option("--row", cm_row, "reference patch row (default: central)");
  cm->add_option("--col", cm_col, "reference patch column (default: central)");
  cm->add_option("--bandwidth", cm_bw, "kernel bandwidth (default: scale x feature spread of the image)");
  cm->add_option("--bandwidth-scale", cm_scale, "bandwidth scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      const pr::ExperimentConfig cfg = sample_flags.resolve(sample);
      if (cfg.train_images.empty()) throw pr::ParameterError("sample: set train_images");
      pr::ExperimentConfig c = cfg;
      c.dataset_path.clear();
      const pr::PatchDataset ds = pr::build_dataset(c);
      pr::write_patch_dataset(ds, sample_out);
      std::printf("wrote %zu patch pairs (%dx%d clean, %dx%d degraded) to %s\n", ds.m, ds.clean_side, ds.clean_side,
                  ds.degraded_side, ds.degraded_side, sample_out.c_str());
    } else if (*deg) {
      pr::ExperimentConfig cfg;
      cfg.task = pr::parse_task(deg_task);
      cfg.kernel_path = deg_kernel;
      cfg.factor = deg_factor;
      cfg.antialias_sigma = deg_aa;
      cfg.keep_fraction = deg_keep;
      cfg.mask_seed = deg_mask_seed;
      const pr::Image x = pr::load_image(deg_in);
      const pr::DegradationOperator op = pr::operator_spec(cfg).build(x.width(), x.height());
      pr::save_image(pr::degrade(op, x, pr::NoiseModel{deg_sigma, deg_noise_seed}), deg_out);
    } else if (*rest) {
      const pr::ExperimentConfig cfg = rest_flags.resolve(rest);
      const pr::Image y = pr::load_image(rest_in);
      const pr::OperatorSpec spec = pr::operator_spec(cfg);
      int w = y.width();
      int h = y.height();
      if (cfg.task == pr::Task::upsample) {
        w = rest_w > 0 ? rest_w : y.width() * cfg.factor;
        h = rest_h > 0 ? rest_h : y.height() * cfg.factor;
      }
      const pr::DegradationOperator op = spec.build(w, h);
      const pr::PatchDataset data = pr::build_dataset(cfg);
      std::optional<pr::Image> ref;
      if (!rest_ref.empty()) ref = pr::load_image(rest_ref);
      pr::Image x;
      if (cfg.solver == pr::SolverKind::mse) {
        x = pr::restore_mse(y, op, data, cfg.solver_config);
      } else {
        pr::HqsResult res = pr::hqs_restore(y, op, data, cfg.solver_config, ref ? &*ref : nullptr);
        x = std::move(res.x);
        if (!rest_trace.empty()) {
          std::ofstream out(rest_trace);
          if (!out) throw pr::IoError("cannot write " + rest_trace);
          out << pr::trace_csv(res.trace);
        }
      }
      pr::save_image(x, rest_out);
      if (ref) {
        std::printf("psnr_degraded %s\npsnr_restored %s\n",
                    pr::format_psnr(pr::psnr(pr::initial_estimate(y, op), *ref)).c_str(),
                    pr::format_psnr(pr::psnr(x, *ref)).c_str());
      }
    } else if (*ps) {
      print_line(pr::format_psnr(pr::psnr(pr::load_image(ps_a), pr::load_image(ps_b))));
    } else if (*bench) {
      const pr::ExperimentConfig cfg = bench_flags.resolve(bench);
      const pr::RunReport report = pr::run_experiment(cfg);
      std::cout << pr::report_csv(report, cfg);
      std::printf("mean psnr: degraded %s, restored %s\n", pr::format_psnr(report.mean_psnr_degraded).c_str(),
                  pr::format_psnr(report.mean_psnr_restored).c_str());
    } else if (*cb) {
      double value = 0.0;
      if (cb_inpaint) {
        value = pr::c_bound(pr::Inpainting{*cb_inpaint});
      } else if (cb_down) {
        value = pr::c_bound(pr::Downsampling{*cb_down});
      } else if (cb_denoise) {
        value = pr::c_bound(pr::Denoising{*cb_denoise, pr::unit_cube_diameter(cb_pixels)});
      } else {
        throw pr::ParameterError("c-bound: pass one of --inpaint, --downsample, --denoise");
      }
      std::printf("%.*f\n", cb_precision, value);
    } else if (*q) {
      std::vector<pr::Image> imgs;
      for (const auto& p : q_images) imgs.push_back(pr::load_image(p));
      const pr::PatchGrid grid(imgs.at(0).width(), imgs.at(0).height(), q_patch);
      std::vector<double> pooled;
      for (const auto& img : imgs) {
        const auto patches = pr::extract_all_patches(img, grid);
        pooled.insert(pooled.end(), patches.begin(), patches.end());
      }
      const pr::KernelModel kernel = pr::kernel_model_from_dataset(pr::dct_features_all(pooled, q_patch), q_scale);
      pr::QEstimate est = q_exhaustive ? pr::estimate_q_exhaustive(imgs, kernel, q_patch)
                                       : pr::estimate_q(imgs, kernel, q_patch, q_pairs, q_seed);
      print_line(pr::q_csv_header());
      print_line(pr::q_csv_row(est));
      if (!q_csv.empty()) {
        const bool fresh = !std::filesystem::exists(q_csv);
        std::ofstream out(q_csv, std::ios::app);
        if (!out) throw pr::IoError("cannot write " + q_csv);
        if (fresh) out << pr::q_csv_header() << '\n';
        out << pr::q_csv_row(est) << '\n';
      }
    } else if (*cm) {
      const pr::Image img = pr::load_image(cm_image);
      const pr::PatchGrid grid(img.width(), img.height(), cm_patch);
      pr::KernelModel kernel;
      if (cm_bw) {
        kernel.bandwidth = *cm_bw;
      } else {
        kernel = pr::kernel_model_from_dataset(pr::dct_features_all(pr::extract_all_patches(img, grid), cm_patch),
                                               cm_scale);
      }
      const std::size_t ref = (cm_row || cm_col)
                                  ? grid.index(cm_row.value_or(grid.rows() / 2), cm_col.value_or(grid.cols() / 2))
                                  : pr::central_patch(grid);
      grid.check_index(ref);
      const pr::CorrelationMap map = pr::correlation_map(img, kernel, grid, ref);
      if (!cm_out.empty()) pr::save_correlation_map(map, cm_out);
      std::printf("fraction below 1%% outside 5x5: %.4f\n", pr::fraction_below_outside(map, 2, 0.01));
    }
  } catch (const pr::Error& e) {
    std::fprintf(stderr, "patchrestore: %s error: %s\n", error_kind(e), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "patchrestore: %s error: %s\n", error_kind(e), e.what());
    return 1;
  }
  return 0;
}
