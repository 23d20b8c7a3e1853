#include "patchrestore/linsolve.hpp"

#include <cmath>
#include <string>

#include "patchrestore/error.hpp"
#include "patchrestore/image.hpp"
#include "patchrestore/rng.hpp"

namespace patchrestore {
namespace {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

CGResult conjugate_gradient(const LinearOperator& a, std::span<const double> b, const CGConfig& cfg) {
  const std::size_t n = a.dim;
  if (b.size() != n) throw DimensionError("conjugate_gradient: rhs length " + std::to_string(b.size()) +
                                          " != operator dimension " + std::to_string(n));
  if (!(cfg.rel_tolerance > 0.0)) throw ParameterError("conjugate_gradient: tolerance must be positive");
  if (!cfg.initial_guess.empty() && cfg.initial_guess.size() != n) {
    throw DimensionError("conjugate_gradient: initial guess length mismatch");
  }
  const bool precondition = !cfg.jacobi_diagonal.empty();
  if (precondition && cfg.jacobi_diagonal.size() != n) throw DimensionError("conjugate_gradient: diagonal length mismatch");

  CGResult res;
  res.x = cfg.initial_guess.empty() ? std::vector<double>(n, 0.0) : cfg.initial_guess;
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }
  const double target = cfg.rel_tolerance * bnorm;

  std::vector<double> r(n), ap(n), z, p;
  if (cfg.initial_guess.empty()) {
    r.assign(b.begin(), b.end());
  } else {
    a.apply(res.x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  }
  double rnorm = norm(r);
  res.relative_residual = rnorm / bnorm;
  if (rnorm <= target) return res;

  auto apply_precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / cfg.jacobi_diagonal[i];
  };
  if (precondition) {
    apply_precond(r, z);
  } else {
    z = r;
  }
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    a.apply(p, ap);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) {
      throw IndefiniteOperator("conjugate_gradient: non-positive curvature p'Ap = " + std::to_string(curvature) +
                                   " at iteration " + std::to_string(it),
                               it, curvature);
    }
    const double step = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    rnorm = norm(r);
    res.iterations = it;
    res.relative_residual = rnorm / bnorm;
    if (cfg.observer) cfg.observer(it, res.x);
    if (rnorm <= target) return res;
    if (!std::isfinite(rnorm)) break;

    if (precondition) {
      apply_precond(r, z);
    } else {
      z = r;
    }
    const double rz_next = dot(r, z);
    const double mix = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + mix * p[i];
  }
  throw NonConvergence("conjugate_gradient: relative residual " + std::to_string(res.relative_residual) +
                           " above tolerance after " + std::to_string(res.iterations) + " iterations",
                       res.iterations, res.relative_residual);
}

double symmetry_defect(const LinearOperator& a, int probes, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = a.dim;
  std::vector<double> u(n), v(n), au(n), av(n);
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = rng.normal();
      v[i] = rng.normal();
    }
    a.apply(u, au);
    a.apply(v, av);
    const double lhs = dot(au, v);
    const double rhs = dot(u, av);
    const double scale = norm(au) * norm(v) + norm(u) * norm(av);
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace patchrestore
