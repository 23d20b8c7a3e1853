#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "patchrestore/features.hpp"
#include "patchrestore/image.hpp"

namespace patchrestore {

struct QEstimate {
  double q = 0.0;
  double standard_error = 0.0;
  /// Patch-pair samples drawn (the full |P|^2 count per image pair when exhaustive).
  std::size_t pairs = 0;
  std::uint64_t seed = 0;
  bool exhaustive = false;
};

/// Largest image area (pixels) accepted by the exhaustive estimator.
inline constexpr int kExhaustiveMaxPixels = 32 * 32;

/// Total patch correlation
///
///   q = 1/(|P| r^2) sum_{p,p'} E[ k(y_p, y_p')^2 - k(y_p, y'_p')^2 ]
///
/// with y, y' two distinct images of the corpus and k on DCT patch features.
/// Each sample draws an ordered image pair and a patch pair uniformly and
/// averages the term with the roles of y and y' swapped. Draws are split into
/// fixed seeded blocks, so the estimate does not depend on the thread count.
QEstimate estimate_q(std::span<const Image> images, const KernelModel& kernel, int patch_size, std::size_t mc_pairs,
                     std::uint64_t seed);

/// Exact value of the same quantity averaged over all ordered pairs of
/// distinct images. Limited to images of at most kExhaustiveMaxPixels.
QEstimate estimate_q_exhaustive(std::span<const Image> images, const KernelModel& kernel, int patch_size);

/// Kernel similarity of one reference patch with every patch of the image,
/// laid out on the patch grid. The Gaussian kernel makes the reference
/// entry exactly 1.
struct CorrelationMap {
  int rows = 0;
  int cols = 0;
  std::size_t reference = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

CorrelationMap correlation_map(const Image& image, const KernelModel& kernel, const PatchGrid& grid,
                               std::size_t reference);

/// Index of the patch whose corner is closest to the grid center.
std::size_t central_patch(const PatchGrid& grid);

/// Fraction of entries at Chebyshev distance > radius (in patch positions)
/// from the reference whose value is below threshold times the reference value.
double fraction_below_outside(const CorrelationMap& map, int radius, double threshold);

/// Grayscale heatmap with 0 -> black and 1 -> white.
void save_correlation_map(const CorrelationMap& map, const std::string& path);

struct Denoising {
  double sigma = 0.0;
  /// Diameter of the image domain; see unit_cube_diameter.
  double diameter = 1.0;
};
struct Inpainting {
  /// Fraction of observed pixels.
  double keep_fraction = 0.0;
};
struct Downsampling {
  int factor = 1;
};
using FormationProblem = std::variant<Denoising, Inpainting, Downsampling>;

/// Diagonal of [0, 1]^pixels.
double unit_cube_diameter(std::size_t pixels);

/// Closed-form bound on c_{B, sigma}: min(sigma / diameter, 1) for denoising,
/// sqrt(s) for inpainting, 1 / sqrt(k) for downsampling.
double c_bound(const FormationProblem& problem);

/// "q,stderr,mc_pairs,seed".
std::string q_csv_header();
std::string q_csv_row(const QEstimate& q);

}  // namespace patchrestore
