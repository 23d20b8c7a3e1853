#include "patchrestore/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "patchrestore/error.hpp"
#include "patchrestore/image_io.hpp"
#include "patchrestore/parallel.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {
namespace {

constexpr std::size_t kBlocks = 64;

std::vector<FeatureMatrix> corpus_features(std::span<const Image> images, int patch_size) {
  if (images.size() < 2) throw ParameterError("estimate_q: need at least two images");
  for (const Image& img : images) {
    if (!img.same_shape(images[0])) throw DimensionError("estimate_q: images differ in size");
  }
  const PatchGrid grid(images[0].width(), images[0].height(), patch_size);
  std::vector<FeatureMatrix> feats;
  feats.reserve(images.size());
  for (const Image& img : images) feats.push_back(dct_features_all(extract_all_patches(img, grid), patch_size));
  return feats;
}

// k(f, g)^2 for the Gaussian kernel.
double kernel_sq(std::span<const double> f, std::span<const double> g, double bandwidth) {
  return std::exp(-squared_distance(f, g) / (bandwidth * bandwidth));
}

void check_kernel(const KernelModel& kernel) {
  if (!(kernel.bandwidth > 0.0) || !std::isfinite(kernel.bandwidth)) {
    throw ParameterError("kernel bandwidth must be finite and > 0");
  }
}

}  // namespace

QEstimate estimate_q(std::span<const Image> images, const KernelModel& kernel, int patch_size, std::size_t mc_pairs,
                     std::uint64_t seed) {
  if (mc_pairs < 1) throw ParameterError("estimate_q: mc_pairs must be >= 1");
  check_kernel(kernel);
  const auto feats = corpus_features(images, patch_size);
  const std::size_t n = feats.size();
  const std::size_t np = feats[0].rows;
  const double bw = kernel.bandwidth;

  std::vector<double> block_sum(kBlocks, 0.0);
  std::vector<double> block_sumsq(kBlocks, 0.0);
  parallel_for_chunks(kBlocks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const std::size_t count = mc_pairs / kBlocks + (b < mc_pairs % kBlocks ? 1 : 0);
      Rng rng(derive_seed(seed, b));
      double s = 0.0;
      double s2 = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t a = rng.index(n);
        std::size_t c = rng.index(n - 1);
        if (c >= a) ++c;
        const std::size_t p = rng.index(np);
        const std::size_t pp = rng.index(np);
        const FeatureMatrix& fy = feats[a];
        const FeatureMatrix& fz = feats[c];
        const double term = 0.5 * ((kernel_sq(fy.row(p), fy.row(pp), bw) - kernel_sq(fy.row(p), fz.row(pp), bw)) +
                                   (kernel_sq(fz.row(p), fz.row(pp), bw) - kernel_sq(fz.row(p), fy.row(pp), bw)));
        s += term;
        s2 += term * term;
      }
      block_sum[b] = s;
      block_sumsq[b] = s2;
    }
  });
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t b = 0; b < kBlocks; ++b) {
    s += block_sum[b];
    s2 += block_sumsq[b];
  }
  const double count = static_cast<double>(mc_pairs);
  const double mean = s / count;
  const double var = mc_pairs > 1 ? std::max(0.0, (s2 - count * mean * mean) / (count - 1.0)) : 0.0;
  const double scale = static_cast<double>(np) / KernelModel::r_squared;
  QEstimate q;
  q.q = scale * mean;
  q.standard_error = scale * std::sqrt(var / count);
  q.pairs = mc_pairs;
  q.seed = seed;
  return q;
}

QEstimate estimate_q_exhaustive(std::span<const Image> images, const KernelModel& kernel, int patch_size) {
  check_kernel(kernel);
  if (!images.empty() && images[0].size() > static_cast<std::size_t>(kExhaustiveMaxPixels)) {
    throw ParameterError("estimate_q: exhaustive mode is limited to images of at most " +
                         std::to_string(kExhaustiveMaxPixels) + " pixels");
  }
  const auto feats = corpus_features(images, patch_size);
  const std::size_t n = feats.size();
  const std::size_t np = feats[0].rows;
  const double bw = kernel.bandwidth;
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      if (a == c) continue;
      double s = 0.0;
      for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t pp = 0; pp < np; ++pp) {
          s += kernel_sq(feats[a].row(p), feats[a].row(pp), bw) - kernel_sq(feats[a].row(p), feats[c].row(pp), bw);
        }
      }
      total += s;
    }
  }
  const double pairs = static_cast<double>(n * (n - 1));
  QEstimate q;
  q.q = total / pairs / (static_cast<double>(np) * KernelModel::r_squared);
  q.pairs = np * np;
  q.exhaustive = true;
  return q;
}

CorrelationMap correlation_map(const Image& image, const KernelModel& kernel, const PatchGrid& grid,
                               std::size_t reference) {
  grid.check_image(image);
  grid.check_index(reference);
  check_kernel(kernel);
  const FeatureMatrix f = dct_features_all(extract_all_patches(image, grid), grid.patch_size());
  CorrelationMap map;
  map.rows = grid.rows();
  map.cols = grid.cols();
  map.reference = reference;
  map.values.resize(grid.count());
  const auto ref = f.row(reference);
  for (std::size_t p = 0; p < grid.count(); ++p) map.values[p] = kernel_eval(ref, f.row(p), kernel);
  const double center = map.values[reference];
  for (double& v : map.values) v /= center;
  return map;
}

std::size_t central_patch(const PatchGrid& grid) { return grid.index(grid.rows() / 2, grid.cols() / 2); }

double fraction_below_outside(const CorrelationMap& map, int radius, double threshold) {
  if (radius < 0) throw ParameterError("fraction_below_outside: radius must be >= 0");
  const int r0 = static_cast<int>(map.reference / map.cols);
  const int c0 = static_cast<int>(map.reference % map.cols);
  const double center = map.values[map.reference];
  std::size_t outside = 0;
  std::size_t below = 0;
  for (int r = 0; r < map.rows; ++r) {
    for (int c = 0; c < map.cols; ++c) {
      if (std::max(std::abs(r - r0), std::abs(c - c0)) <= radius) continue;
      ++outside;
      if (map.at(r, c) < threshold * center) ++below;
    }
  }
  if (outside == 0) throw ParameterError("fraction_below_outside: no entries outside the window");
  return static_cast<double>(below) / static_cast<double>(outside);
}

void save_correlation_map(const CorrelationMap& map, const std::string& path) {
  save_image(Image(map.cols, map.rows, map.values), path);
}

double unit_cube_diameter(std::size_t pixels) {
  if (pixels == 0) throw ParameterError("unit_cube_diameter: pixel count must be >= 1");
  return std::sqrt(static_cast<double>(pixels));
}

double c_bound(const FormationProblem& problem) {
  struct Visitor {
    double operator()(const Denoising& d) const {
      if (!(d.sigma >= 0.0)) throw ParameterError("c_bound: sigma must be >= 0");
      if (!(d.diameter > 0.0) || !std::isfinite(d.diameter)) throw ParameterError("c_bound: diameter must be > 0");
      if (std::isinf(d.sigma)) return 1.0;
      return std::min(d.sigma / d.diameter, 1.0);
    }
    double operator()(const Inpainting& p) const {
      if (!(p.keep_fraction >= 0.0 && p.keep_fraction <= 1.0)) {
        throw ParameterError("c_bound: inpainting fraction must lie in [0, 1]");
      }
      return std::sqrt(p.keep_fraction);
    }
    double operator()(const Downsampling& p) const {
      if (p.factor < 1) throw ParameterError("c_bound: downsampling factor must be >= 1");
      return 1.0 / std::sqrt(static_cast<double>(p.factor));
    }
  };
  return std::visit(Visitor{}, problem);
}

std::string q_csv_header() { return "q,stderr,mc_pairs,seed"; }

std::string q_csv_row(const QEstimate& q) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.10g,%.10g,%zu,%llu", q.q, q.standard_error, q.pairs,
                static_cast<unsigned long long>(q.seed));
  return buf;
}

}  // namespace patchrestore
