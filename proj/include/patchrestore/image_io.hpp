#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchrestore/image.hpp"

namespace patchrestore {

/// Loads an 8-bit grayscale PGM (P2 or P5) or PNG; intensities map to [0, 1].
/// The format is detected from the file signature.
Image load_image(const std::string& path);

/// Saves as binary PGM (P5) unless the path ends in ".png". Values are
/// clamped to [0, 1] and rounded half-up to 8 bits.
void save_image(const Image& image, const std::string& path);

/// Plain-text PGM (P2), mainly for tests and diffable fixtures.
void save_image_ascii_pgm(const Image& image, const std::string& path);

std::uint8_t quantize(double v);

/// Decodes PGM bytes (P2 or P5, maxval <= 255).
Image decode_pgm(const std::vector<std::uint8_t>& bytes);

}  // namespace patchrestore
