#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace patchrestore {

/// Matrix-free linear operator y = A x. The callback must be linear and
/// symmetric; `symmetry_defect` probes the latter.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(std::span<const double> x, std::span<double> y)> apply;
};

struct CGConfig {
  double rel_tolerance = 1e-6;
  int max_iterations = 500;
  /// Warm start; empty means start from zero.
  std::vector<double> initial_guess;
  /// Jacobi preconditioner (diagonal of A). Empty disables preconditioning.
  std::vector<double> jacobi_diagonal;
  /// Called after every iteration with the current iterate.
  std::function<void(int iteration, std::span<const double> x)> observer;
};

struct CGResult {
  std::vector<double> x;
  int iterations = 0;
  /// |A x - b| / |b| at exit.
  double relative_residual = 0.0;
};

/// Conjugate gradient for symmetric positive-definite systems.
///
/// Throws IndefiniteOperator on a direction with p'Ap <= 0 and
/// NonConvergence when the iteration budget runs out.
CGResult conjugate_gradient(const LinearOperator& a, std::span<const double> b, const CGConfig& cfg = {});

/// max over random probe pairs of |<Au, v> - <u, Av>| / (|Au||v| + |u||Av|).
double symmetry_defect(const LinearOperator& a, int probes, std::uint64_t seed);

}  // namespace patchrestore
