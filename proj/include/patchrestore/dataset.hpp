#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "patchrestore/degrade.hpp"
#include "patchrestore/features.hpp"
#include "patchrestore/image.hpp"

namespace patchrestore {

/// Where a training pair came from: image index and the top-left corner of
/// the clean patch.
struct PatchOrigin {
  int image = 0;
  int row = 0;
  int col = 0;
};

/// m aligned pairs of clean patches x_i (d_clean x d_clean) and degraded
/// patches y_i (d_degraded x d_degraded), with DCT features of both.
struct PatchDataset {
  std::size_t m = 0;
  int clean_side = 0;
  int degraded_side = 0;
  std::vector<double> clean;     // m x clean_side^2
  std::vector<double> degraded;  // m x degraded_side^2
  FeatureMatrix clean_features;
  FeatureMatrix degraded_features;
  std::vector<PatchOrigin> origins;  // empty when loaded from file
  std::uint64_t seed = 0;
  bool with_replacement = true;

  std::size_t clean_dim() const { return static_cast<std::size_t>(clean_side) * clean_side; }
  std::size_t degraded_dim() const { return static_cast<std::size_t>(degraded_side) * degraded_side; }
  std::span<const double> clean_patch(std::size_t i) const { return {clean.data() + i * clean_dim(), clean_dim()}; }
  std::span<const double> degraded_patch(std::size_t i) const {
    return {degraded.data() + i * degraded_dim(), degraded_dim()};
  }
};

/// Validates shapes and computes features.
PatchDataset make_patch_dataset(std::vector<double> clean, std::vector<double> degraded, int clean_side,
                                int degraded_side, std::uint64_t seed, bool drop_dc = false);

/// Degrades each image once (noise seeded per image from noise.seed), then
/// draws m patch locations uniformly with replacement over all valid
/// locations of all images. For downsampling, clean corners are multiples of
/// the factor and the degraded patch is the co-located low-resolution one.
PatchDataset sample_patch_dataset(std::span<const Image> clean_images, const OperatorSpec& op, const NoiseModel& noise,
                                  std::size_t m, int patch_size, std::uint64_t seed);

/// Binary layout: "PRD1", little-endian u32 m, d_clean, d_degraded, then
/// m*d_clean^2 float32 clean values, m*d_degraded^2 float32 degraded values,
/// then the u64 sampling seed. Features are recomputed on load.
void write_patch_dataset(const PatchDataset& data, const std::string& path);
PatchDataset read_patch_dataset(const std::string& path);
std::vector<std::uint8_t> encode_patch_dataset(const PatchDataset& data);
PatchDataset decode_patch_dataset(const std::vector<std::uint8_t>& bytes);

}  // namespace patchrestore
