#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "patchrestore/error.hpp"
#include "patchrestore/linsolve.hpp"

using namespace patchrestore;

namespace {

LinearOperator dense_operator(const oracle::Mat& a) {
  LinearOperator op;
  op.dim = static_cast<std::size_t>(a.rows());
  op.apply = [a](std::span<const double> x, std::span<double> y) {
    const oracle::Vec r = a * Eigen::Map<const oracle::Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) y[static_cast<std::size_t>(i)] = r[i];
  };
  return op;
}

oracle::Mat random_spd(int n, std::mt19937_64& gen) {
  const auto v = oracle::random_vector(static_cast<std::size_t>(n * n), gen);
  const oracle::Mat m = Eigen::Map<const oracle::Mat>(v.data(), n, n);
  return m.transpose() * m + oracle::Mat::Identity(n, n);
}

}  // namespace

TEST_CASE("small closed-form systems") {
  const auto id = dense_operator(oracle::Mat::Identity(4, 4));
  const CGResult r = conjugate_gradient(id, std::vector<double>{1, -2, 3, 0.5});
  CHECK(r.iterations == 1);
  CHECK(r.x == std::vector<double>{1, -2, 3, 0.5});

  oracle::Mat d = oracle::Mat::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  const CGResult r2 = conjugate_gradient(dense_operator(d), std::vector<double>{1, 2});
  CHECK(r2.x[0] == doctest::Approx(1.0));
  CHECK(r2.x[1] == doctest::Approx(1.0));

  const CGResult zero = conjugate_gradient(id, std::vector<double>(4, 0.0));
  CHECK(zero.x == std::vector<double>(4, 0.0));
  CHECK(zero.iterations == 0);
}

TEST_CASE("CG matches dense solves") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 10; ++t) {
    const oracle::Mat a = random_spd(30, gen);
    const auto b = oracle::random_vector(30, gen);
    CGConfig cfg;
    cfg.rel_tolerance = 1e-12;
    const CGResult r = conjugate_gradient(dense_operator(a), b, cfg);
    const oracle::Vec ref = a.ldlt().solve(Eigen::Map<const oracle::Vec>(b.data(), 30));
    CHECK((Eigen::Map<const oracle::Vec>(r.x.data(), 30) - ref).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("CG finishes within n iterations and its A-norm error is monotone") {
  std::mt19937_64 gen(2);
  for (int n : {5, 12, 20}) {
    oracle::Mat a = random_spd(n, gen);
    a /= a.norm();
    a += oracle::Mat::Identity(n, n);
    const auto b = oracle::random_vector(static_cast<std::size_t>(n), gen);
    const oracle::Vec ref = a.ldlt().solve(Eigen::Map<const oracle::Vec>(b.data(), n));
    std::vector<double> errors;
    CGConfig cfg;
    cfg.rel_tolerance = 1e-12;
    cfg.observer = [&](int, std::span<const double> x) {
      const oracle::Vec e = Eigen::Map<const oracle::Vec>(x.data(), n) - ref;
      errors.push_back(std::sqrt(e.dot(a * e)));
    };
    const CGResult r = conjugate_gradient(dense_operator(a), b, cfg);
    CHECK(r.iterations <= n);
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] <= errors[i - 1] * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("warm start at the solution takes no iterations") {
  std::mt19937_64 gen(3);
  const oracle::Mat a = random_spd(10, gen);
  const auto b = oracle::random_vector(10, gen);
  const oracle::Vec sol = a.ldlt().solve(Eigen::Map<const oracle::Vec>(b.data(), 10));
  CGConfig cfg;
  cfg.initial_guess.assign(sol.data(), sol.data() + 10);
  const CGResult r = conjugate_gradient(dense_operator(a), b, cfg);
  CHECK(r.iterations == 0);
  CHECK_THROWS_AS(([&] {
                    CGConfig bad;
                    bad.initial_guess.assign(3, 0.0);
                    conjugate_gradient(dense_operator(a), b, bad);
                  }()),
                  DimensionError);
}

TEST_CASE("Jacobi preconditioning solves the same system") {
  std::mt19937_64 gen(4);
  oracle::Mat a = random_spd(25, gen);
  for (int i = 0; i < 25; ++i) a(i, i) += 10.0 * i;
  const auto b = oracle::random_vector(25, gen);
  CGConfig cfg;
  cfg.rel_tolerance = 1e-10;
  for (int i = 0; i < 25; ++i) cfg.jacobi_diagonal.push_back(a(i, i));
  const CGResult r = conjugate_gradient(dense_operator(a), b, cfg);
  const oracle::Vec ref = a.ldlt().solve(Eigen::Map<const oracle::Vec>(b.data(), 25));
  CHECK((Eigen::Map<const oracle::Vec>(r.x.data(), 25) - ref).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("typed failures") {
  oracle::Mat indef = oracle::Mat::Identity(3, 3);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(conjugate_gradient(dense_operator(indef), std::vector<double>{0, 1, 0}), IndefiniteOperator);

  std::mt19937_64 gen(5);
  oracle::Mat ill = random_spd(40, gen);
  for (int i = 0; i < 40; ++i) ill(i, i) += std::pow(10.0, i / 5.0);
  CGConfig cfg;
  cfg.max_iterations = 3;
  cfg.rel_tolerance = 1e-14;
  try {
    conjugate_gradient(dense_operator(ill), oracle::random_vector(40, gen), cfg);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.residual() > 1e-14);
  }
  CHECK_THROWS_AS(conjugate_gradient(dense_operator(ill), std::vector<double>(3, 1.0)), DimensionError);
}

TEST_CASE("symmetry probe") {
  std::mt19937_64 gen(6);
  CHECK(symmetry_defect(dense_operator(random_spd(15, gen)), 10, 1) < 1e-12);
  oracle::Mat skew = random_spd(15, gen);
  skew(0, 1) += 5.0;
  CHECK(symmetry_defect(dense_operator(skew), 10, 1) > 1e-3);
}
