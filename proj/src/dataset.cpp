#include "patchrestore/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "patchrestore/error.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {
namespace {

constexpr char kMagic[4] = {'P', 'R', 'D', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("patch dataset: truncated file");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 4;
};

}  // namespace

PatchDataset make_patch_dataset(std::vector<double> clean, std::vector<double> degraded, int clean_side,
                                int degraded_side, std::uint64_t seed, bool drop_dc) {
  if (clean_side < 1 || degraded_side < 1) throw ParameterError("patch dataset: patch sides must be >= 1");
  PatchDataset ds;
  ds.clean_side = clean_side;
  ds.degraded_side = degraded_side;
  if (clean.size() % ds.clean_dim() != 0) throw DimensionError("patch dataset: clean array is not m x d^2");
  ds.m = clean.size() / ds.clean_dim();
  if (ds.m == 0) throw ParameterError("patch dataset: m must be >= 1");
  if (degraded.size() != ds.m * ds.degraded_dim()) {
    throw DimensionError("patch dataset: clean and degraded arrays are not aligned");
  }
  ds.clean = std::move(clean);
  ds.degraded = std::move(degraded);
  ds.seed = seed;
  ds.clean_features = dct_features_all(ds.clean, clean_side, drop_dc);
  ds.degraded_features = dct_features_all(ds.degraded, degraded_side, drop_dc);
  return ds;
}

PatchDataset sample_patch_dataset(std::span<const Image> clean_images, const OperatorSpec& op, const NoiseModel& noise,
                                  std::size_t m, int patch_size, std::uint64_t seed) {
  if (m < 1) throw ParameterError("sample_patch_dataset: m must be >= 1");
  if (clean_images.empty()) throw ParameterError("sample_patch_dataset: no training images");
  const int k = op.kind == DegradationOperator::Kind::downsample ? op.factor : 1;
  const int dd = op.degraded_patch_side(patch_size);

  std::vector<Image> degraded;
  std::vector<std::size_t> cumulative;  // valid clean positions, prefix sums
  std::size_t total = 0;
  for (std::size_t n = 0; n < clean_images.size(); ++n) {
    const Image& img = clean_images[n];
    if (img.width() < patch_size || img.height() < patch_size) {
      throw ParameterError("sample_patch_dataset: image " + std::to_string(n) + " is smaller than the patch size");
    }
    const DegradationOperator b = op.build(img.width(), img.height(), n);
    degraded.push_back(degrade(b, img, NoiseModel{noise.sigma, derive_seed(noise.seed, n)}));
    const std::size_t rows = static_cast<std::size_t>((img.height() - patch_size) / k + 1);
    const std::size_t cols = static_cast<std::size_t>((img.width() - patch_size) / k + 1);
    total += rows * cols;
    cumulative.push_back(total);
  }

  Rng rng(seed);
  std::vector<double> clean_vals;
  std::vector<double> degraded_vals;
  clean_vals.reserve(m * patch_size * patch_size);
  degraded_vals.reserve(m * dd * dd);
  std::vector<PatchOrigin> origins;
  origins.reserve(m);
  for (std::size_t s = 0; s < m; ++s) {
    std::size_t idx = rng.index(total);
    std::size_t n = 0;
    while (idx >= cumulative[n]) ++n;
    if (n > 0) idx -= cumulative[n - 1];
    const Image& img = clean_images[n];
    const Image& low = degraded[n];
    const int cols = (img.width() - patch_size) / k + 1;
    const int lr = static_cast<int>(idx / cols);
    const int lc = static_cast<int>(idx % cols);
    const int r0 = lr * k;
    const int c0 = lc * k;
    for (int r = 0; r < patch_size; ++r) {
      for (int c = 0; c < patch_size; ++c) clean_vals.push_back(img(r0 + r, c0 + c));
    }
    for (int r = 0; r < dd; ++r) {
      for (int c = 0; c < dd; ++c) degraded_vals.push_back(low(lr + r, lc + c));
    }
    origins.push_back({static_cast<int>(n), r0, c0});
  }
  PatchDataset ds = make_patch_dataset(std::move(clean_vals), std::move(degraded_vals), patch_size, dd, seed);
  ds.origins = std::move(origins);
  return ds;
}

std::vector<std::uint8_t> encode_patch_dataset(const PatchDataset& data) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(data.m));
  put_u32(out, static_cast<std::uint32_t>(data.clean_side));
  put_u32(out, static_cast<std::uint32_t>(data.degraded_side));
  for (double v : data.clean) put_f32(out, v);
  for (double v : data.degraded) put_f32(out, v);
  put_u64(out, data.seed);
  return out;
}

PatchDataset decode_patch_dataset(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("patch dataset: bad magic");
  ByteReader rd(bytes);
  const std::uint32_t m = rd.u32();
  const std::uint32_t dc = rd.u32();
  const std::uint32_t dd = rd.u32();
  if (m == 0 || dc == 0 || dd == 0 || dc > 1024 || dd > 1024) throw FormatError("patch dataset: bad header");
  const std::size_t nc = static_cast<std::size_t>(m) * dc * dc;
  const std::size_t nd = static_cast<std::size_t>(m) * dd * dd;
  if (rd.remaining() != 4 * (nc + nd) + 8) throw FormatError("patch dataset: size does not match header");
  std::vector<double> clean(nc);
  std::vector<double> degraded(nd);
  for (double& v : clean) v = rd.f32();
  for (double& v : degraded) v = rd.f32();
  const std::uint64_t seed = rd.u64();
  return make_patch_dataset(std::move(clean), std::move(degraded), static_cast<int>(dc), static_cast<int>(dd), seed);
}

void write_patch_dataset(const PatchDataset& data, const std::string& path) {
  const auto bytes = encode_patch_dataset(data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

PatchDataset read_patch_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return decode_patch_dataset(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace patchrestore
