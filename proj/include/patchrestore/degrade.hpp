#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchrestore/image.hpp"

namespace patchrestore {

/// Convolution kernel with odd side lengths, coefficients summing to 1.
struct BlurKernel {
  int height = 1;
  int width = 1;
  std::vector<double> coeffs{1.0};

  double operator()(int r, int c) const { return coeffs[static_cast<std::size_t>(r) * width + c]; }
};

/// Validates shape and normalizes the coefficients to unit sum.
BlurKernel make_blur_kernel(int height, int width, std::vector<double> coeffs);

/// Text format: first line "h w", then h*w whitespace-separated coefficients.
/// Coefficients are normalized on load.
BlurKernel load_blur_kernel(const std::string& path);
void save_blur_kernel(const BlurKernel& kernel, const std::string& path);

/// Isotropic Gaussian truncated at +-3 sigma and renormalized.
BlurKernel gaussian_kernel(double sigma);

/// The linear formation operator B with its exact adjoint. All convolutions
/// use circular (periodic) boundaries.
class DegradationOperator {
 public:
  enum class Kind { identity, blur, downsample, mask };

  static DegradationOperator identity(int width, int height);
  static DegradationOperator blur(BlurKernel kernel, int width, int height);
  /// Gaussian anti-alias blur followed by keeping every factor-th pixel.
  static DegradationOperator downsample(int factor, double antialias_sigma, int width, int height);
  static DegradationOperator mask(std::vector<std::uint8_t> keep, int width, int height);

  Kind kind() const { return kind_; }
  int input_width() const { return in_w_; }
  int input_height() const { return in_h_; }
  int output_width() const { return out_w_; }
  int output_height() const { return out_h_; }
  /// Decimation factor; 1 for every kind except downsample.
  int factor() const { return factor_; }
  double antialias_sigma() const { return antialias_sigma_; }
  /// Blur kernel, or the anti-alias Gaussian for downsample.
  const BlurKernel& kernel() const { return kernel_; }
  const std::vector<std::uint8_t>& keep_mask() const { return keep_; }

  Image apply(const Image& x) const;
  Image apply_adjoint(const Image& v) const;
  /// B^T B x.
  Image normal(const Image& x) const { return apply_adjoint(apply(x)); }

 private:
  DegradationOperator() = default;

  Kind kind_ = Kind::identity;
  int in_w_ = 0;
  int in_h_ = 0;
  int out_w_ = 0;
  int out_h_ = 0;
  int factor_ = 1;
  double antialias_sigma_ = 0.0;
  BlurKernel kernel_;
  std::vector<std::uint8_t> keep_;
};

/// Size-independent description of an operator; `build` instantiates it for
/// a concrete image. Masks are drawn per image from mask_seed and `salt`.
struct OperatorSpec {
  DegradationOperator::Kind kind = DegradationOperator::Kind::identity;
  BlurKernel kernel;
  int factor = 2;
  double antialias_sigma = 0.8;
  double keep_fraction = 0.5;
  std::uint64_t mask_seed = 0;

  DegradationOperator build(int width, int height, std::uint64_t salt = 0) const;
  /// Side of the degraded counterpart of a d x d clean patch.
  int degraded_patch_side(int clean_side) const;
};

inline Image apply(const DegradationOperator& op, const Image& x) { return op.apply(x); }
inline Image apply_adjoint(const DegradationOperator& op, const Image& v) { return op.apply_adjoint(v); }

/// Additive white Gaussian noise; sigma on the [0, 1] intensity scale.
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// B x plus seeded i.i.d. Gaussian noise. Bit-reproducible for a fixed seed.
Image degrade(const DegradationOperator& op, const Image& x, const NoiseModel& noise);

/// Circular 2-D convolution and its adjoint (correlation).
Image convolve_circular(const Image& x, const BlurKernel& kernel);
Image correlate_circular(const Image& x, const BlurKernel& kernel);

/// Bernoulli keep-mask with the given keep probability.
std::vector<std::uint8_t> random_mask(int width, int height, double keep_fraction, std::uint64_t seed);

/// Keys bicubic (a = -0.5) interpolation of a decimated image back onto the
/// width x height grid; low-resolution pixel i sits at high-resolution
/// coordinate factor * i. Periodic boundary.
Image upsample_bicubic(const Image& low, int factor, int width, int height);

}  // namespace patchrestore
