#pragma once

// Dense reference constructions used as independent oracles. Everything here
// is assembled from index arithmetic and textbook formulas, never from the
// library's operators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "patchrestore/image.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

inline Vec to_vec(const patchrestore::Image& img) {
  Vec v(static_cast<Eigen::Index>(img.size()));
  for (std::size_t i = 0; i < img.size(); ++i) v[static_cast<Eigen::Index>(i)] = img.data()[i];
  return v;
}

inline patchrestore::Image to_image(const Vec& v, int w, int h) {
  return patchrestore::Image(w, h, std::vector<double>(v.data(), v.data() + v.size()));
}

inline patchrestore::Image random_image(int w, int h, std::mt19937_64& gen, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  for (double& v : px) v = u(gen);
  return patchrestore::Image(w, h, std::move(px));
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

// Circular convolution: (Bx)(r, c) = sum_{i,j} k(i, j) x(r - (i - kh/2), c - (j - kw/2)).
inline Mat blur_matrix(const std::vector<double>& k, int kh, int kw, int w, int h) {
  Mat b = Mat::Zero(w * h, w * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int i = 0; i < kh; ++i) {
        for (int j = 0; j < kw; ++j) {
          const int rr = wrap(r - (i - kh / 2), h);
          const int cc = wrap(c - (j - kw / 2), w);
          b(r * w + c, rr * w + cc) += k[static_cast<std::size_t>(i) * kw + j];
        }
      }
    }
  }
  return b;
}

// 2-D Gaussian truncated at radius ceil(3 sigma), normalized to sum 1.
inline std::vector<double> gaussian(double sigma, int& side) {
  const int rad = static_cast<int>(std::ceil(3.0 * sigma));
  side = 2 * rad + 1;
  std::vector<double> g(static_cast<std::size_t>(side) * side);
  double s = 0.0;
  for (int i = -rad; i <= rad; ++i) {
    for (int j = -rad; j <= rad; ++j) {
      const double v = std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
      g[static_cast<std::size_t>(i + rad) * side + (j + rad)] = v;
      s += v;
    }
  }
  for (double& v : g) v /= s;
  return g;
}

inline Mat downsample_matrix(int factor, double sigma, int w, int h) {
  int side = 0;
  const auto g = gaussian(sigma, side);
  const Mat blur = blur_matrix(g, side, side, w, h);
  const int ow = (w + factor - 1) / factor;
  const int oh = (h + factor - 1) / factor;
  Mat s = Mat::Zero(ow * oh, w * h);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) s(r * ow + c, r * factor * w + c * factor) = 1.0;
  }
  return s * blur;
}

inline Mat mask_matrix(const std::vector<std::uint8_t>& keep) {
  Mat m = Mat::Zero(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) m(i, i) = keep[i] ? 1.0 : 0.0;
  return m;
}

// R_p: d^2 x (w h) selection of the window with top-left corner (row, col).
inline Mat patch_matrix(int w, int d, int row, int col, int h) {
  Mat r = Mat::Zero(d * d, w * h);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) r(i * d + j, (row + i) * w + (col + j)) = 1.0;
  }
  return r;
}

// Orthonormal 2-D DCT-II coefficient (u, v) by direct summation.
inline double dct2_coefficient(const std::vector<double>& patch, int n, int u, int v) {
  const double pi = std::acos(-1.0);
  const double au = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  double s = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      s += patch[static_cast<std::size_t>(r) * n + c] * std::cos(pi * (2 * r + 1) * u / (2.0 * n)) *
           std::cos(pi * (2 * c + 1) * v / (2.0 * n));
    }
  }
  return au * av * s;
}

// Projected subgradient descent on
//   f(z) = sum_i a_i |z - x_i| + (beta / 2) |z - anchor|^2
// over the bounding box of {x_i} and the anchor (which contains the
// minimizer). Step 2 / (beta (t + 1)) with weighted iterate averaging; returns
// the lowest objective seen among the iterates and the running average.
inline double subgradient_minimum(const std::vector<double>& targets, std::size_t m, std::size_t dim,
                                  const std::vector<double>& alphas, const std::vector<double>& anchor, double beta,
                                  long steps) {
  auto f = [&](const std::vector<double>& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (z[k] - targets[i * dim + k]) * (z[k] - targets[i * dim + k]);
      s += alphas[i] * std::sqrt(d2);
    }
    double q = 0.0;
    for (std::size_t k = 0; k < dim; ++k) q += (z[k] - anchor[k]) * (z[k] - anchor[k]);
    return s + 0.5 * beta * q;
  };
  std::vector<double> lo(anchor), hi(anchor);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], targets[i * dim + k]);
      hi[k] = std::max(hi[k], targets[i * dim + k]);
    }
  }
  std::vector<double> z(anchor), g(dim), avg(anchor);
  double best = f(z);
  double weight_sum = 0.0;
  for (long t = 1; t <= steps; ++t) {
    for (std::size_t k = 0; k < dim; ++k) g[k] = beta * (z[k] - anchor[k]);
    for (std::size_t i = 0; i < m; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (z[k] - targets[i * dim + k]) * (z[k] - targets[i * dim + k]);
      const double d = std::sqrt(d2);
      if (d > 0.0) {
        for (std::size_t k = 0; k < dim; ++k) g[k] += alphas[i] * (z[k] - targets[i * dim + k]) / d;
      }
    }
    const double step = 2.0 / (beta * (static_cast<double>(t) + 1.0));
    for (std::size_t k = 0; k < dim; ++k) z[k] = std::clamp(z[k] - step * g[k], lo[k], hi[k]);
    const double w = static_cast<double>(t);
    weight_sum += w;
    for (std::size_t k = 0; k < dim; ++k) avg[k] += (w / weight_sum) * (z[k] - avg[k]);
    if (t % 64 == 0 || t == steps) best = std::min({best, f(z), f(avg)});
  }
  return best;
}

}  // namespace oracle
