#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "patchrestore/error.hpp"
#include "patchrestore/experiment.hpp"

using namespace patchrestore;
namespace fs = std::filesystem;

namespace {

const std::string kData = PATCHRESTORE_DATA_DIR;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("patchrestore_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_deblur(const fs::path& out) {
  ExperimentConfig cfg = default_config(Task::deblur, SolverKind::l2_hqs);
  cfg.kernel_path = kData + "/kernels/kernel1_17x17.txt";
  cfg.train_images = {kData + "/train/astronaut.pgm", kData + "/train/brick.pgm"};
  cfg.images = {kData + "/test/camera64.pgm"};
  cfg.m = 100;
  cfg.solver_config.iterations = 1;
  cfg.solver_config.sdca.max_steps = 50;
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("defaults follow the published settings") {
  const ExperimentConfig d = default_config(Task::deblur, SolverKind::l2_hqs);
  CHECK(d.solver_config.gamma == 3200.0);
  CHECK(d.solver_config.beta0 == 3.0);
  CHECK(d.solver_config.delta == 2.0);
  CHECK(d.solver_config.iterations == 8);
  CHECK(d.noise_sigma == 0.01);
  const ExperimentConfig u = default_config(Task::upsample, SolverKind::l2_hqs);
  CHECK(u.solver_config.gamma == 6000.0);
  CHECK(u.solver_config.beta0 == 0.5);
  CHECK(u.solver_config.iterations == 3);
  CHECK(default_config(Task::deblur, SolverKind::mse).solver_config.gamma == 5000.0);
}

TEST_CASE("parsing key = value text") {
  const ConfigEntries e = parse_config_text("# comment\n task = upsample \n\ngamma=100 # trailing\nsdca-max-steps = 7\n");
  REQUIRE(e.size() == 3);
  CHECK(e[0] == std::pair<std::string, std::string>{"task", "upsample"});
  CHECK(e[2].first == "sdca_max_steps");
  const ExperimentConfig c = make_config(e);
  CHECK(c.task == Task::upsample);
  CHECK(c.solver_config.gamma == 100.0);
  CHECK(c.solver_config.beta0 == 0.5);
  CHECK(c.solver_config.sdca.max_steps == 7);
  CHECK(c.noise_sigma == 0.0);

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), ParameterError);
  CHECK_THROWS_AS(parse_config_text("gamma 3\n"), ParameterError);
  CHECK_THROWS_AS(make_config({{"gamma", "abc"}}), ParameterError);
  CHECK_THROWS_AS(make_config({{"iterations", "2.5"}}), ParameterError);
  CHECK_THROWS_AS(make_config({{"task", "sharpen"}}), ParameterError);
  CHECK_THROWS_AS(make_config({{"safeguard", "maybe"}}), ParameterError);
}

TEST_CASE("config files resolve paths and accept overrides") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "run.cfg");
    out << "task = deblur\nkernel = k.txt\nimages = a.pgm, b.pgm\ngamma = 10\n";
  }
  const ExperimentConfig c = load_config((dir / "run.cfg").string(), {{"gamma", "20"}, {"solver", "mse"}});
  CHECK(c.kernel_path == (dir / "k.txt").lexically_normal().string());
  REQUIRE(c.images.size() == 2);
  CHECK(c.images[1] == (dir / "b.pgm").lexically_normal().string());
  CHECK(c.solver == SolverKind::mse);
  CHECK(c.solver_config.gamma == 20.0);
  CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("config hash covers result-affecting keys only") {
  ExperimentConfig a = default_config(Task::deblur, SolverKind::l2_hqs);
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  b.workers = 7;
  CHECK(config_hash(b) == h);
  b.solver_config.gamma = 3201.0;
  CHECK(config_hash(b) != h);
  const auto map = config_to_map(a);
  CHECK(map.count("output_dir") == 0);
  CHECK(map.at("gamma") == "3200");
  for (const auto& key : config_keys()) {
    ExperimentConfig r = a;
    set_config_value(r, key, config_to_map(a).count(key) ? config_to_map(a).at(key) : (key == "workers" ? "0" : "out"));
    CHECK(config_hash(r) == h);
  }
}

TEST_CASE("validation catches missing files and bad ranges") {
  ExperimentConfig cfg = small_deblur(scratch("val"));
  CHECK_NOTHROW(validate(cfg));
  ExperimentConfig c = cfg;
  c.images = {kData + "/test/none.pgm"};
  CHECK_THROWS_AS(validate(c), IoError);
  c = cfg;
  c.kernel_path.clear();
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = cfg;
  c.train_images.clear();
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = cfg;
  c.solver_config.estimator = EstimatorKind::kernel_ridge;
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = cfg;
  c.task = Task::upsample;
  c.patch_size = 7;
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = cfg;
  c.solver_config.beta0 = -1.0;
  CHECK_THROWS_AS(validate(c), ParameterError);
}

TEST_CASE("MSE with overwhelming fidelity on noiseless denoising is near-identity") {
  const fs::path out = scratch("identity");
  ExperimentConfig cfg = default_config(Task::denoise, SolverKind::mse);
  cfg.noise_sigma = 0.0;
  cfg.solver_config.gamma = 1e12;
  cfg.train_images = {kData + "/train/brick.pgm"};
  cfg.images = {kData + "/test/camera64.pgm", kData + "/test/coins64.pgm"};
  cfg.m = 50;
  cfg.output_dir = out.string();
  const RunReport r = run_experiment(cfg, false);
  CHECK(r.mean_psnr_restored >= 80.0);
  CHECK(!fs::exists(out));
}

TEST_CASE("a one-image bench writes one report row") {
  const fs::path out = scratch("bench");
  const ExperimentConfig cfg = small_deblur(out);
  const RunReport r = run_experiment(cfg);
  REQUIRE(r.images.size() == 1);
  CHECK(r.images[0].name == "camera64");
  CHECK(r.images[0].trace.size() == 1);
  const std::string report = read_file(out / "report.csv");
  std::istringstream lines(report);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "image,task,solver,psnr_degraded,psnr_restored,config_hash,version");
  CHECK(row.rfind("camera64,deblur,l2-hqs,", 0) == 0);
  CHECK(row.find(config_hash(cfg)) != std::string::npos);
  CHECK(row.find(library_version()) != std::string::npos);
  CHECK(!std::getline(lines, extra));
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "restored" / "camera64.pgm"));
  CHECK(fs::exists(out / "degraded" / "camera64.pgm"));
  CHECK(read_file(out / "traces" / "camera64.csv").rfind("iter,beta,energy,psnr,", 0) == 0);
  fs::remove_all(out);
}

TEST_CASE("PSNR formatting") {
  CHECK(format_psnr(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_psnr(23.456) == "23.46");
  CHECK(format_psnr(23.4, 6) == "23.400000");
  CHECK(parse_solver("l2-hqs") == SolverKind::l2_hqs);
  CHECK(to_string(SolverKind::mse) == "mse");
  CHECK(to_string(parse_task("Upsample")) == "upsample");
}
