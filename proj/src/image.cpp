#include "patchrestore/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "patchrestore/error.hpp"

namespace patchrestore {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ParameterError("Image: negative dimensions");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0) throw ParameterError("Image: negative dimensions");
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("Image: pixel count " + std::to_string(pixels_.size()) + " does not match " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  for (double v : pixels_) {
    if (!std::isfinite(v)) throw ParameterError("Image: non-finite intensity");
  }
}

void require_same_shape(const Image& a, const Image& b, const char* context) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(context) + ": image dimensions differ (" + std::to_string(a.width()) + "x" +
                         std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                         std::to_string(b.height()) + ")");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const Image& a, const Image& b) {
  require_same_shape(a, b, "dot");
  return dot(a.pixels(), b.pixels());
}

Patch::Patch(int side_, std::vector<double> values_) : side(side_), values(std::move(values_)) {
  if (values.size() != static_cast<std::size_t>(side) * side) throw DimensionError("Patch: length != side^2");
}

PatchGrid::PatchGrid(int width, int height, int patch_size)
    : width_(width), height_(height), patch_size_(patch_size) {
  if (patch_size < 1) throw ParameterError("PatchGrid: patch size must be >= 1");
  if (patch_size > width || patch_size > height) {
    throw ParameterError("PatchGrid: patch size " + std::to_string(patch_size) + " exceeds image " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

void PatchGrid::check_index(std::size_t p) const {
  if (p >= count()) {
    throw IndexError("patch index " + std::to_string(p) + " out of range [0, " + std::to_string(count()) + ")");
  }
}

void PatchGrid::check_image(const Image& image) const {
  if (image.width() != width_ || image.height() != height_) {
    throw DimensionError("PatchGrid: image is " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()) + ", grid expects " + std::to_string(width_) + "x" +
                         std::to_string(height_));
  }
}

void extract_patch_into(const Image& image, const PatchGrid& grid, std::size_t p, std::span<double> out) {
  grid.check_index(p);
  const int d = grid.patch_size();
  if (out.size() != static_cast<std::size_t>(d) * d) throw DimensionError("extract_patch: output length != d^2");
  const int r0 = grid.row_of(p);
  const int c0 = grid.col_of(p);
  const double* src = image.pixels().data();
  for (int r = 0; r < d; ++r) {
    const double* row = src + static_cast<std::size_t>(r0 + r) * image.width() + c0;
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(r) * d + c] = row[c];
  }
}

Patch extract_patch(const Image& image, const PatchGrid& grid, std::size_t p) {
  grid.check_image(image);
  Patch patch(grid.patch_size());
  extract_patch_into(image, grid, p, patch.values);
  return patch;
}

void scatter_patch_add(Image& accum, const PatchGrid& grid, std::size_t p, std::span<const double> patch) {
  grid.check_index(p);
  grid.check_image(accum);
  const int d = grid.patch_size();
  if (patch.size() != static_cast<std::size_t>(d) * d) throw DimensionError("scatter_patch_add: patch length != d^2");
  const int r0 = grid.row_of(p);
  const int c0 = grid.col_of(p);
  double* dst = accum.pixels().data();
  for (int r = 0; r < d; ++r) {
    double* row = dst + static_cast<std::size_t>(r0 + r) * accum.width() + c0;
    for (int c = 0; c < d; ++c) row[c] += patch[static_cast<std::size_t>(r) * d + c];
  }
}

void scatter_patch_add(Image& accum, const PatchGrid& grid, std::size_t p, const Patch& patch) {
  if (patch.side != grid.patch_size()) throw DimensionError("scatter_patch_add: patch side != grid patch size");
  scatter_patch_add(accum, grid, p, std::span<const double>(patch.values));
}

std::vector<double> extract_all_patches(const Image& image, const PatchGrid& grid) {
  grid.check_image(image);
  const std::size_t area = grid.patch_area();
  std::vector<double> out(grid.count() * area);
  for (std::size_t p = 0; p < grid.count(); ++p) {
    extract_patch_into(image, grid, p, std::span<double>(out).subspan(p * area, area));
  }
  return out;
}

Image scatter_all_patches(std::span<const double> patches, const PatchGrid& grid) {
  const std::size_t area = grid.patch_area();
  if (patches.size() != grid.count() * area) throw DimensionError("scatter_all_patches: expected |P| x d^2 values");
  Image accum(grid.width(), grid.height());
  for (std::size_t p = 0; p < grid.count(); ++p) scatter_patch_add(accum, grid, p, patches.subspan(p * area, area));
  return accum;
}

Image coverage_counts(const PatchGrid& grid) {
  // Separable: count(r, c) = rows covering r times cols covering c.
  const int d = grid.patch_size();
  auto covering = [d](int i, int n) {
    const int lo = std::max(0, i - d + 1);
    const int hi = std::min(i, n - d);
    return hi - lo + 1;
  };
  Image counts(grid.width(), grid.height());
  for (int r = 0; r < grid.height(); ++r) {
    const int cr = covering(r, grid.height());
    for (int c = 0; c < grid.width(); ++c) counts(r, c) = static_cast<double>(cr * covering(c, grid.width()));
  }
  return counts;
}

double mean_squared_error(const Image& a, const Image& b) {
  require_same_shape(a, b, "mean_squared_error");
  if (a.empty()) throw DimensionError("mean_squared_error: empty images");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a.data()[i] - b.data()[i];
    s += e * e;
  }
  return s / static_cast<double>(a.size());
}

double psnr(const Image& a, const Image& b, double peak) {
  const double mse = mean_squared_error(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace patchrestore
