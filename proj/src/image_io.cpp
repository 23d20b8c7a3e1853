#include "patchrestore/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "patchrestore/error.hpp"

namespace patchrestore {
namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool ends_with_png(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

// Header tokens of a PGM, skipping whitespace and '#' comments.
class PgmReader {
 public:
  explicit PgmReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw FormatError("PGM: expected an integer");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) throw FormatError("PGM: integer too large");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from P5 raster data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("PGM: missing raster separator");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

Image decode_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw FormatError("PNG: " + std::string(img.message));
  }
  if ((img.format & PNG_FORMAT_FLAG_COLOR) != 0) {
    png_image_free(&img);
    throw FormatError("PNG: only grayscale images are supported: " + path);
  }
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    throw FormatError("PNG: " + std::string(img.message));
  }
  const int w = static_cast<int>(img.width);
  const int h = static_cast<int>(img.height);
  std::vector<double> px(buf.size());
  std::transform(buf.begin(), buf.end(), px.begin(), [](std::uint8_t v) { return v / 255.0; });
  return Image(w, h, std::move(px));
}

}  // namespace

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

Image decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw FormatError("unsupported image format (expected P2/P5 PGM or PNG)");
  }
  const bool binary = bytes[1] == '5';
  PgmReader rd(bytes);
  const long w = rd.next_int();
  const long h = rd.next_int();
  const long maxval = rd.next_int();
  if (w <= 0 || h <= 0) throw FormatError("PGM: non-positive dimensions");
  if (maxval <= 0 || maxval > 255) throw FormatError("PGM: only 8-bit maxval (1..255) is supported");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> px(n);
  if (binary) {
    rd.skip_single_space();
    if (bytes.size() - rd.pos() < n) throw FormatError("PGM: truncated raster");
    for (std::size_t i = 0; i < n; ++i) {
      const long v = bytes[rd.pos() + i];
      if (v > maxval) throw FormatError("PGM: sample exceeds maxval");
      px[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = rd.next_int();
      if (v > maxval) throw FormatError("PGM: sample exceeds maxval");
      px[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return Image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

Image load_image(const std::string& path) {
  const auto bytes = read_file(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(std::begin(kPngSig), std::end(kPngSig), bytes.begin())) {
    return decode_png(path);
  }
  try {
    return decode_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_image(const Image& image, const std::string& path) {
  std::vector<std::uint8_t> q(image.size());
  std::transform(image.data().begin(), image.data().end(), q.begin(), quantize);
  if (ends_with_png(path)) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.c_str(), 0, q.data(), 0, nullptr)) {
      throw IoError("PNG write failed for " + path + ": " + img.message);
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(q.data()), static_cast<std::streamsize>(q.size()));
  if (!out) throw IoError("write failed for " + path);
}

void save_image_ascii_pgm(const Image& image, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "P2\n" << image.width() << ' ' << image.height() << "\n255\n";
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      out << static_cast<int>(quantize(image(r, c))) << (c + 1 == image.width() ? '\n' : ' ');
    }
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace patchrestore
