#include "patchrestore/degrade.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "patchrestore/error.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {
namespace {

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

void check_input(const DegradationOperator& op, const Image& x, const char* what) {
  if (x.width() != op.input_width() || x.height() != op.input_height()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(op.input_width()) + "x" +
                         std::to_string(op.input_height()) + " input, got " + std::to_string(x.width()) + "x" +
                         std::to_string(x.height()));
  }
}

void check_output(const DegradationOperator& op, const Image& v, const char* what) {
  if (v.width() != op.output_width() || v.height() != op.output_height()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(op.output_width()) + "x" +
                         std::to_string(op.output_height()) + " input, got " + std::to_string(v.width()) + "x" +
                         std::to_string(v.height()));
  }
}

// Shared loop for convolution (sign = -1) and correlation (sign = +1):
// out(r, c) = sum_ij K(i, j) x(r + sign * (i - ch), c + sign * (j - cw)).
Image filter_circular(const Image& x, const BlurKernel& k, int sign) {
  const int h = x.height();
  const int w = x.width();
  const int ch = k.height / 2;
  const int cw = k.width / 2;
  Image out(w, h);
  std::vector<int> col_index(static_cast<std::size_t>(w) * k.width);
  for (int c = 0; c < w; ++c) {
    for (int j = 0; j < k.width; ++j) col_index[static_cast<std::size_t>(c) * k.width + j] = wrap(c + sign * (j - cw), w);
  }
  const double* src = x.pixels().data();
  for (int r = 0; r < h; ++r) {
    for (int i = 0; i < k.height; ++i) {
      const double* row = src + static_cast<std::size_t>(wrap(r + sign * (i - ch), h)) * w;
      const double* krow = k.coeffs.data() + static_cast<std::size_t>(i) * k.width;
      for (int c = 0; c < w; ++c) {
        const int* ci = col_index.data() + static_cast<std::size_t>(c) * k.width;
        double s = 0.0;
        for (int j = 0; j < k.width; ++j) s += krow[j] * row[ci[j]];
        out(r, c) += s;
      }
    }
  }
  return out;
}

double keys_cubic(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

}  // namespace

BlurKernel make_blur_kernel(int height, int width, std::vector<double> coeffs) {
  if (height < 1 || width < 1 || height % 2 == 0 || width % 2 == 0) {
    throw ParameterError("blur kernel sides must be odd and positive, got " + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  if (coeffs.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("blur kernel: expected " + std::to_string(height * width) + " coefficients, got " +
                         std::to_string(coeffs.size()));
  }
  const double sum = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
  if (!(sum > 0.0) || !std::isfinite(sum)) throw ParameterError("blur kernel coefficients must have a positive sum");
  for (double& v : coeffs) v /= sum;
  return BlurKernel{height, width, std::move(coeffs)};
}

BlurKernel load_blur_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel file " + path);
  int h = 0;
  int w = 0;
  if (!(in >> h >> w)) throw FormatError(path + ": expected \"h w\" header");
  if (h <= 0 || w <= 0 || h > 4096 || w > 4096) throw FormatError(path + ": bad kernel dimensions");
  std::vector<double> coeffs(static_cast<std::size_t>(h) * w);
  for (double& v : coeffs) {
    if (!(in >> v)) throw FormatError(path + ": expected " + std::to_string(h * w) + " coefficients");
  }
  std::string extra;
  if (in >> extra) throw FormatError(path + ": trailing data after coefficients");
  return make_blur_kernel(h, w, std::move(coeffs));
}

void save_blur_kernel(const BlurKernel& kernel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kernel.height << ' ' << kernel.width << '\n';
  out.precision(17);
  for (int r = 0; r < kernel.height; ++r) {
    for (int c = 0; c < kernel.width; ++c) out << kernel(r, c) << (c + 1 == kernel.width ? '\n' : ' ');
  }
}

BlurKernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_kernel: sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const int side = 2 * radius + 1;
  std::vector<double> coeffs(static_cast<std::size_t>(side) * side);
  for (int r = -radius; r <= radius; ++r) {
    for (int c = -radius; c <= radius; ++c) {
      coeffs[static_cast<std::size_t>(r + radius) * side + (c + radius)] =
          std::exp(-(r * r + c * c) / (2.0 * sigma * sigma));
    }
  }
  return make_blur_kernel(side, side, std::move(coeffs));
}

DegradationOperator DegradationOperator::identity(int width, int height) {
  if (width < 1 || height < 1) throw ParameterError("identity operator: non-positive dimensions");
  DegradationOperator op;
  op.kind_ = Kind::identity;
  op.in_w_ = op.out_w_ = width;
  op.in_h_ = op.out_h_ = height;
  return op;
}

DegradationOperator DegradationOperator::blur(BlurKernel kernel, int width, int height) {
  if (width < 1 || height < 1) throw ParameterError("blur operator: non-positive dimensions");
  // Re-validate in case the struct was filled by hand.
  kernel = make_blur_kernel(kernel.height, kernel.width, std::move(kernel.coeffs));
  DegradationOperator op;
  op.kind_ = Kind::blur;
  op.in_w_ = op.out_w_ = width;
  op.in_h_ = op.out_h_ = height;
  op.kernel_ = std::move(kernel);
  return op;
}

DegradationOperator DegradationOperator::downsample(int factor, double antialias_sigma, int width, int height) {
  if (factor < 1) throw ParameterError("downsample: factor must be >= 1");
  if (width < 1 || height < 1) throw ParameterError("downsample operator: non-positive dimensions");
  DegradationOperator op;
  op.kind_ = Kind::downsample;
  op.factor_ = factor;
  op.antialias_sigma_ = antialias_sigma;
  op.in_w_ = width;
  op.in_h_ = height;
  op.out_w_ = (width + factor - 1) / factor;
  op.out_h_ = (height + factor - 1) / factor;
  op.kernel_ = antialias_sigma > 0.0 ? gaussian_kernel(antialias_sigma) : BlurKernel{};
  return op;
}

DegradationOperator DegradationOperator::mask(std::vector<std::uint8_t> keep, int width, int height) {
  if (width < 1 || height < 1) throw ParameterError("mask operator: non-positive dimensions");
  if (keep.size() != static_cast<std::size_t>(width) * height) throw DimensionError("mask: bitmap size != width*height");
  for (auto& k : keep) k = k ? 1 : 0;
  DegradationOperator op;
  op.kind_ = Kind::mask;
  op.in_w_ = op.out_w_ = width;
  op.in_h_ = op.out_h_ = height;
  op.keep_ = std::move(keep);
  return op;
}

Image DegradationOperator::apply(const Image& x) const {
  check_input(*this, x, "apply");
  switch (kind_) {
    case Kind::identity:
      return x;
    case Kind::blur:
      return convolve_circular(x, kernel_);
    case Kind::downsample: {
      const Image blurred = convolve_circular(x, kernel_);
      Image out(out_w_, out_h_);
      for (int r = 0; r < out_h_; ++r) {
        for (int c = 0; c < out_w_; ++c) out(r, c) = blurred(r * factor_, c * factor_);
      }
      return out;
    }
    case Kind::mask: {
      Image out = x;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!keep_[i]) out.data()[i] = 0.0;
      }
      return out;
    }
  }
  return x;
}

Image DegradationOperator::apply_adjoint(const Image& v) const {
  check_output(*this, v, "apply_adjoint");
  switch (kind_) {
    case Kind::identity:
      return v;
    case Kind::blur:
      return correlate_circular(v, kernel_);
    case Kind::downsample: {
      Image up(in_w_, in_h_);
      for (int r = 0; r < out_h_; ++r) {
        for (int c = 0; c < out_w_; ++c) up(r * factor_, c * factor_) = v(r, c);
      }
      return correlate_circular(up, kernel_);
    }
    case Kind::mask:
      return apply(v);
  }
  return v;
}

DegradationOperator OperatorSpec::build(int width, int height, std::uint64_t salt) const {
  switch (kind) {
    case DegradationOperator::Kind::identity:
      return DegradationOperator::identity(width, height);
    case DegradationOperator::Kind::blur:
      return DegradationOperator::blur(kernel, width, height);
    case DegradationOperator::Kind::downsample:
      return DegradationOperator::downsample(factor, antialias_sigma, width, height);
    case DegradationOperator::Kind::mask:
      return DegradationOperator::mask(random_mask(width, height, keep_fraction, derive_seed(mask_seed, salt)), width,
                                       height);
  }
  throw ParameterError("unknown operator kind");
}

int OperatorSpec::degraded_patch_side(int clean_side) const {
  if (kind != DegradationOperator::Kind::downsample) return clean_side;
  if (clean_side % factor != 0) {
    throw ParameterError("patch size " + std::to_string(clean_side) + " is not a multiple of the downsampling factor " +
                         std::to_string(factor));
  }
  return clean_side / factor;
}

Image convolve_circular(const Image& x, const BlurKernel& kernel) {
  if (kernel.height == 1 && kernel.width == 1) {
    Image out = x;
    for (double& v : out.data()) v *= kernel.coeffs[0];
    return out;
  }
  return filter_circular(x, kernel, -1);
}

Image correlate_circular(const Image& x, const BlurKernel& kernel) {
  if (kernel.height == 1 && kernel.width == 1) return convolve_circular(x, kernel);
  return filter_circular(x, kernel, +1);
}

Image degrade(const DegradationOperator& op, const Image& x, const NoiseModel& noise) {
  if (noise.sigma < 0.0 || !std::isfinite(noise.sigma)) throw ParameterError("noise sigma must be finite and >= 0");
  Image y = op.apply(x);
  if (noise.sigma > 0.0) {
    Rng rng(noise.seed);
    for (double& v : y.data()) v += noise.sigma * rng.normal();
  }
  return y;
}

std::vector<std::uint8_t> random_mask(int width, int height, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) throw ParameterError("mask keep fraction must be in [0, 1]");
  Rng rng(seed);
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(width) * height);
  for (auto& k : keep) k = rng.uniform() < keep_fraction ? 1 : 0;
  return keep;
}

Image upsample_bicubic(const Image& low, int factor, int width, int height) {
  if (factor < 1) throw ParameterError("upsample_bicubic: factor must be >= 1");
  if (low.width() != (width + factor - 1) / factor || low.height() != (height + factor - 1) / factor) {
    throw DimensionError("upsample_bicubic: low-resolution size does not match target size / factor");
  }
  Image out(width, height);
  for (int r = 0; r < height; ++r) {
    const double u = static_cast<double>(r) / factor;
    const int r0 = static_cast<int>(std::floor(u));
    const double tr = u - r0;
    for (int c = 0; c < width; ++c) {
      const double v = static_cast<double>(c) / factor;
      const int c0 = static_cast<int>(std::floor(v));
      const double tc = v - c0;
      double s = 0.0;
      for (int i = -1; i <= 2; ++i) {
        const double wr = keys_cubic(tr - i);
        if (wr == 0.0) continue;
        const int rr = wrap(r0 + i, low.height());
        for (int j = -1; j <= 2; ++j) {
          const double wc = keys_cubic(tc - j);
          if (wc == 0.0) continue;
          s += wr * wc * low(rr, wrap(c0 + j, low.width()));
        }
      }
      out(r, c) = s;
    }
  }
  return out;
}

}  // namespace patchrestore
