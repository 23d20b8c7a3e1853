#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace patchrestore {

/// Row-major grayscale image with intensities nominally in [0, 1].
///
/// Values are never clamped by the library except when written to an 8-bit
/// file, so solvers may transiently leave the unit range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& operator()(int row, int col) { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }
  double operator()(int row, int col) const { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }
  std::vector<double>& data() { return pixels_; }
  const std::vector<double>& data() const { return pixels_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Throws DimensionError when the two images differ in shape.
void require_same_shape(const Image& a, const Image& b, const char* context);

double dot(std::span<const double> a, std::span<const double> b);
double dot(const Image& a, const Image& b);

/// Square d x d window stored row-major.
struct Patch {
  int side = 0;
  std::vector<double> values;

  Patch() = default;
  explicit Patch(int side_, double fill = 0.0)
      : side(side_), values(static_cast<std::size_t>(side_) * side_, fill) {}
  Patch(int side_, std::vector<double> values_);
};

/// All overlapping d x d windows of a width x height image at stride 1,
/// ordered row-major by their top-left corner. No padding: every patch lies
/// inside the image.
class PatchGrid {
 public:
  PatchGrid(int width, int height, int patch_size);

  int width() const { return width_; }
  int height() const { return height_; }
  int patch_size() const { return patch_size_; }
  int patch_area() const { return patch_size_ * patch_size_; }
  /// Patch positions per row and per column.
  int cols() const { return width_ - patch_size_ + 1; }
  int rows() const { return height_ - patch_size_ + 1; }
  std::size_t count() const { return static_cast<std::size_t>(rows()) * cols(); }

  int row_of(std::size_t p) const { return static_cast<int>(p / cols()); }
  int col_of(std::size_t p) const { return static_cast<int>(p % cols()); }
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * cols() + col; }

  void check_index(std::size_t p) const;
  void check_image(const Image& image) const;

 private:
  int width_;
  int height_;
  int patch_size_;
};

Patch extract_patch(const Image& image, const PatchGrid& grid, std::size_t p);

/// Writes patch p into `out` (length d^2) without allocating.
void extract_patch_into(const Image& image, const PatchGrid& grid, std::size_t p, std::span<double> out);

/// Adds the patch into the window of p. Adjoint of extract_patch.
void scatter_patch_add(Image& accum, const PatchGrid& grid, std::size_t p, std::span<const double> patch);
void scatter_patch_add(Image& accum, const PatchGrid& grid, std::size_t p, const Patch& patch);

/// Extracts every patch into a |P| x d^2 row-major array.
std::vector<double> extract_all_patches(const Image& image, const PatchGrid& grid);

/// sum_p R_p^T patches[p] for a |P| x d^2 row-major patch array.
Image scatter_all_patches(std::span<const double> patches, const PatchGrid& grid);

/// Per-pixel number of covering patches, the diagonal of sum_p R_p^T R_p.
Image coverage_counts(const PatchGrid& grid);

/// Peak signal-to-noise ratio in dB; +infinity when the images are equal.
double psnr(const Image& a, const Image& b, double peak = 1.0);

double mean_squared_error(const Image& a, const Image& b);

}  // namespace patchrestore
