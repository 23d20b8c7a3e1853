#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patchrestore/degrade.hpp"
#include "patchrestore/features.hpp"
#include "patchrestore/linsolve.hpp"
#include "patchrestore/restore.hpp"

using namespace patchrestore;

namespace {

std::vector<DegradationOperator> random_operators(int w, int h, std::mt19937_64& gen) {
  std::vector<DegradationOperator> ops;
  std::uniform_int_distribution<int> side(1, 3);
  const int kh = 2 * side(gen) + 1;
  const int kw = 2 * side(gen) - 1;
  auto coeffs = oracle::random_vector(static_cast<std::size_t>(kh * kw), gen, 0.0, 1.0);
  ops.push_back(DegradationOperator::blur(make_blur_kernel(kh, kw, coeffs), w, h));
  ops.push_back(DegradationOperator::downsample(2 + static_cast<int>(gen() % 2), 0.8, w, h));
  ops.push_back(DegradationOperator::mask(random_mask(w, h, 0.5, gen()), w, h));
  ops.push_back(DegradationOperator::identity(w, h));
  return ops;
}

}  // namespace

TEST_CASE("adjoint identity holds for random operators and shapes") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 5 + static_cast<int>(gen() % 20);
    const int h = 5 + static_cast<int>(gen() % 20);
    for (const auto& op : random_operators(w, h, gen)) {
      const Image x = oracle::random_image(w, h, gen, -1.0, 1.0);
      const Image v = oracle::random_image(op.output_width(), op.output_height(), gen, -1.0, 1.0);
      const double lhs = dot(op.apply(x), v);
      const double rhs = dot(x, op.apply_adjoint(v));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("patch extraction and scatter are adjoint on random grids") {
  std::mt19937_64 gen(102);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 4 + static_cast<int>(gen() % 16);
    const int h = 4 + static_cast<int>(gen() % 16);
    const int d = 1 + static_cast<int>(gen() % 4);
    const PatchGrid grid(w, h, d);
    const Image x = oracle::random_image(w, h, gen, -1.0, 1.0);
    const auto z = oracle::random_vector(grid.count() * d * d, gen);
    const auto px = extract_all_patches(x, grid);
    CHECK(std::abs(dot(px, z) - dot(x, scatter_all_patches(z, grid))) <= 1e-10);
  }
}

TEST_CASE("normal operators are positive semidefinite") {
  std::mt19937_64 gen(103);
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& op : random_operators(11, 9, gen)) {
      const Image x = oracle::random_image(11, 9, gen, -1.0, 1.0);
      CHECK(dot(x, op.normal(x)) >= -1e-12);
    }
  }
}

TEST_CASE("x-update systems are solved to their requested residual") {
  std::mt19937_64 gen(104);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 10 + static_cast<int>(gen() % 6);
    const int h = 10 + static_cast<int>(gen() % 6);
    const PatchGrid grid(w, h, 4);
    const auto ops = random_operators(w, h, gen);
    const auto& op = ops[trial % ops.size()];
    const Image y = oracle::random_image(op.output_width(), op.output_height(), gen);
    const auto z = oracle::random_vector(grid.count() * 16, gen);
    const double beta = std::uniform_real_distribution<double>(0.1, 10.0)(gen);
    const double gamma = std::uniform_real_distribution<double>(0.0, 100.0)(gen);
    CGConfig cg;
    cg.rel_tolerance = 1e-10;
    const CGResult r = x_update(z, grid, y, op, beta, gamma, cg);
    // Residual of beta sum R'R x + gamma B'B x = beta sum R'z + gamma B'y.
    const Image x(w, h, r.x);
    Image lhs = op.normal(x);
    const Image cov = coverage_counts(grid);
    for (std::size_t j = 0; j < lhs.size(); ++j) lhs.data()[j] = gamma * lhs.data()[j] + beta * cov.data()[j] * x.data()[j];
    Image rhs = op.apply_adjoint(y);
    const Image zs = scatter_all_patches(z, grid);
    double nr = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      const double b = gamma * rhs.data()[j] + beta * zs.data()[j];
      nr += (lhs.data()[j] - b) * (lhs.data()[j] - b);
      nb += b * b;
    }
    CHECK(std::sqrt(nr) <= 1e-9 * std::sqrt(nb));
  }
}

TEST_CASE("bandwidth scales linearly with the features") {
  std::mt19937_64 gen(105);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix f{30, 6, oracle::random_vector(180, gen)};
    const double b = bandwidth_from_dataset(f);
    for (double& v : f.values) v *= 3.0;
    CHECK(bandwidth_from_dataset(f) == doctest::Approx(3.0 * b).epsilon(1e-12));
  }
}
