#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "patchrestore/error.hpp"
#include "patchrestore/sdca.hpp"

using namespace patchrestore;

namespace {

struct Instance {
  SdcaTargets targets;
  std::vector<double> alphas;
  std::vector<double> anchor;
  double beta = 1.0;
};

Instance random_instance(std::size_t m, std::size_t dim, std::mt19937_64& gen) {
  Instance in;
  in.targets = make_sdca_targets(oracle::random_vector(m * dim, gen), dim, false);
  in.alphas = oracle::random_vector(m, gen, 0.0, 1.0);
  const double s = std::accumulate(in.alphas.begin(), in.alphas.end(), 0.0);
  for (double& a : in.alphas) a /= s;
  in.anchor = oracle::random_vector(dim, gen);
  in.beta = std::uniform_real_distribution<double>(0.5, 5.0)(gen);
  return in;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("single target: inside the prox radius the solution snaps to it") {
  const auto t = make_sdca_targets(std::vector<double>{1.0, 1.0}, 2, false);
  const std::vector<double> anchor{1.2, 0.9};
  const std::vector<double> alpha{1.0};
  Rng rng(0);
  SdcaConfig cfg;
  cfg.gap_tolerance = 1e-12;
  cfg.max_steps = 10;
  const SdcaResult r = z_update_sdca(anchor, alpha, t, 1.0, cfg, rng);
  CHECK(r.z[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.z[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.gap <= 1e-12);
}

TEST_CASE("single target: far anchor is shrunk by alpha / beta") {
  const auto t = make_sdca_targets(std::vector<double>{0.0, 0.0, 0.0}, 3, false);
  const std::vector<double> anchor{3.0, 0.0, 0.0};
  Rng rng(0);
  SdcaConfig cfg;
  cfg.gap_tolerance = 1e-12;
  const SdcaResult r = z_update_sdca(anchor, std::vector<double>{1.0}, t, 1.0, cfg, rng);
  CHECK(r.z[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(r.z[1]) < 1e-15);
}

TEST_CASE("zero weights return the anchor without any step") {
  Rng rng(0);
  const auto t = make_sdca_targets(std::vector<double>{5, 5, -5, -5}, 2, false);
  const std::vector<double> anchor{0.3, 0.4};
  const SdcaResult r = z_update_sdca(anchor, std::vector<double>{0.0, 0.0}, t, 2.0, SdcaConfig{}, rng);
  CHECK(r.z == anchor);
  CHECK(r.steps == 0);
  CHECK(r.gap == 0.0);
}

TEST_CASE("duality gap examples") {
  const auto t = make_sdca_targets(std::vector<double>{0.0, 0.0}, 2, false);
  DualState st(1, 2);
  const std::vector<double> anchor{3.0, 4.0};
  st.reset(anchor);
  const GapReport g0 = dual_gap(st, anchor, std::vector<double>{1.0}, t, 1.0);
  CHECK(g0.total == doctest::Approx(5.0));
  CHECK(sdca_primal(st.z(), anchor, std::vector<double>{1.0}, t, 1.0) == doctest::Approx(5.0));
  CHECK(sdca_dual(st, anchor, t, 1.0) == doctest::Approx(0.0));

  // Optimal dual: mu = -a / |a|, z = a + mu.
  st.mu(0)[0] = -0.6;
  st.mu(0)[1] = -0.8;
  st.z()[0] = 2.4;
  st.z()[1] = 3.2;
  st.mark_touched(0);
  const GapReport g1 = dual_gap(st, anchor, std::vector<double>{1.0}, t, 1.0);
  CHECK(std::abs(g1.total) < 1e-12);

  st.mu(0)[0] = -2.0;
  CHECK_THROWS_AS(dual_gap(st, anchor, std::vector<double>{1.0}, t, 1.0), ParameterError);
  CHECK_THROWS_AS(dual_gap(st, anchor, std::vector<double>{1.0, 1.0}, t, 1.0), DimensionError);
  CHECK_THROWS_AS(dual_gap(st, anchor, std::vector<double>{1.0}, t, 0.0), ParameterError);
}

TEST_CASE("the gap equals primal minus dual on random linked states") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    Instance in = random_instance(8, 5, gen);
    DualState st(8, 5);
    st.reset(in.anchor);
    auto z = st.z();
    for (std::size_t i = 0; i < 8; ++i) {
      if (trial % 3 == 0 && i % 2 == 0) continue;
      const auto dir = oracle::random_vector(5, gen);
      const double scale = std::uniform_real_distribution<double>(0.0, 1.0)(gen) * in.alphas[i] / norm(dir);
      for (std::size_t k = 0; k < 5; ++k) {
        st.mu(i)[k] = dir[k] * scale;
        z[k] += st.mu(i)[k] / in.beta;
      }
      st.mark_touched(i);
    }
    const GapReport g = dual_gap(st, in.anchor, in.alphas, in.targets, in.beta);
    const double pd = sdca_primal(st.z(), in.anchor, in.alphas, in.targets, in.beta) -
                      sdca_dual(st, in.anchor, in.targets, in.beta);
    CHECK(std::abs(g.total - pd) <= 1e-9);
    for (double gi : g.per_sample) CHECK(gi >= -1e-12);
  }
}

TEST_CASE("gap-proportional sampling") {
  Rng rng(5);
  const std::vector<double> gaps{0.0, 1.0, 3.0, 0.0};
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 20000; ++i) ++counts[gap_sample(gaps, rng)];
  CHECK(counts[0] == 0);
  CHECK(counts[3] == 0);
  CHECK(counts[2] / 20000.0 == doctest::Approx(0.75).epsilon(0.03));
  CHECK(gap_sample(std::vector<double>{0.0, 0.0, 2.0}, rng) == 2);
  CHECK_THROWS_AS(gap_sample(std::vector<double>{0.0, 0.0}, rng), ParameterError);
}

TEST_CASE("greedy selection breaks ties to the lowest index") {
  CHECK(gap_sample_greedy(std::vector<double>{1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(gap_sample_greedy(std::vector<double>{5.0}) == 0);
  CHECK_THROWS_AS(gap_sample_greedy(std::vector<double>{0.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(gap_sample_greedy(std::vector<double>{}), ParameterError);
}

TEST_CASE("every step keeps the primal-dual link and dual feasibility") {
  std::mt19937_64 gen(12);
  for (auto sel : {CoordinateSelection::gap_proportional, CoordinateSelection::gap_greedy,
                   CoordinateSelection::uniform}) {
    Instance in = random_instance(10, 16, gen);
    DualState st(10, 16);
    st.reset(in.anchor);
    SdcaConfig cfg;
    cfg.selection = sel;
    cfg.gap_tolerance = 1e-10;
    cfg.max_steps = 400;
    Rng rng(3);
    double worst_link = 0.0;
    double worst_feas = 0.0;
    sdca_solve(st, in.anchor, in.alphas, in.targets, in.beta, cfg, rng, [&](const DualState& s, std::size_t, int) {
      for (std::size_t k = 0; k < 16; ++k) {
        double z = in.anchor[k];
        for (std::size_t i = 0; i < 10; ++i) z += s.mu(i)[k] / in.beta;
        worst_link = std::max(worst_link, std::abs(z - s.z()[k]));
      }
      for (std::size_t i = 0; i < 10; ++i) worst_feas = std::max(worst_feas, norm(s.mu(i)) - in.alphas[i]);
    });
    CHECK(worst_link <= 1e-12);
    CHECK(worst_feas <= 1e-12);
  }
}

TEST_CASE("coordinate steps never decrease the dual objective") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    Instance in = random_instance(12, 9, gen);
    DualState st(12, 9);
    st.reset(in.anchor);
    SdcaConfig cfg;
    cfg.gap_recompute_period = 1;
    cfg.gap_tolerance = 0.0;
    cfg.max_steps = 300;
    Rng rng(static_cast<std::uint64_t>(trial));
    std::vector<double> dual;
    sdca_solve(st, in.anchor, in.alphas, in.targets, in.beta, cfg, rng, [&](const DualState& s, std::size_t, int) {
      dual.push_back(sdca_dual(s, in.anchor, in.targets, in.beta));
    });
    for (std::size_t i = 1; i < dual.size(); ++i) CHECK(dual[i] >= dual[i - 1] - 1e-12);
  }
}

TEST_CASE("the subproblem objective is convex along random segments") {
  std::mt19937_64 gen(14);
  Instance in = random_instance(6, 4, gen);
  for (int t = 0; t < 200; ++t) {
    const auto u = oracle::random_vector(4, gen, -3.0, 3.0);
    const auto v = oracle::random_vector(4, gen, -3.0, 3.0);
    const double lam = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    std::vector<double> w(4);
    for (int k = 0; k < 4; ++k) w[k] = lam * u[k] + (1 - lam) * v[k];
    const double fu = sdca_primal(u, in.anchor, in.alphas, in.targets, in.beta);
    const double fv = sdca_primal(v, in.anchor, in.alphas, in.targets, in.beta);
    const double fw = sdca_primal(w, in.anchor, in.alphas, in.targets, in.beta);
    CHECK(fw <= lam * fu + (1 - lam) * fv + 1e-12);
  }
}

TEST_CASE("SDCA reaches the subgradient oracle minimum") {
  std::mt19937_64 gen(15);
  for (int trial = 0; trial < 10; ++trial) {
    Instance in = random_instance(10, 16, gen);
    SdcaConfig cfg;
    cfg.gap_tolerance = 1e-8;
    cfg.max_steps = 20000;
    Rng rng(static_cast<std::uint64_t>(trial));
    const SdcaResult r = z_update_sdca(in.anchor, in.alphas, in.targets, in.beta, cfg, rng);
    CHECK(r.gap <= 1e-8);
    const double fz = sdca_primal(r.z, in.anchor, in.alphas, in.targets, in.beta);
    const double ref = oracle::subgradient_minimum(in.targets.values, 10, 16, in.alphas, in.anchor, in.beta, 100000);
    CHECK(fz <= ref + 1e-8);
    CHECK(ref - fz <= 1e-4);
  }
}

TEST_CASE("centered targets shift the solution by the anchor mean") {
  std::mt19937_64 gen(16);
  const auto raw = oracle::random_vector(5 * 4, gen);
  const SdcaTargets centered = make_sdca_targets(raw, 4, true);
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0.0;
    for (double v : centered.row(i)) s += v;
    CHECK(std::abs(s) < 1e-14);
  }
  const std::vector<double> alphas(5, 0.2);
  std::vector<double> anchor = oracle::random_vector(4, gen);
  SdcaConfig cfg;
  cfg.gap_tolerance = 1e-12;
  cfg.max_steps = 50000;
  Rng r1(1);
  const SdcaResult a = z_update_sdca(anchor, alphas, centered, 2.0, cfg, r1);
  for (double& v : anchor) v += 0.7;
  Rng r2(1);
  const SdcaResult b = z_update_sdca(anchor, alphas, centered, 2.0, cfg, r2);
  for (std::size_t k = 0; k < 4; ++k) CHECK(b.z[k] - a.z[k] == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("argument validation") {
  const auto t = make_sdca_targets(std::vector<double>{0, 0, 1, 1}, 2, false);
  Rng rng(0);
  const std::vector<double> anchor{0, 0};
  CHECK_THROWS_AS(z_update_sdca(anchor, std::vector<double>{0.5, -0.5}, t, 1.0, SdcaConfig{}, rng), ParameterError);
  CHECK_THROWS_AS(z_update_sdca(std::vector<double>{0}, std::vector<double>{0.5, 0.5}, t, 1.0, SdcaConfig{}, rng),
                  DimensionError);
  SdcaConfig bad;
  bad.gap_recompute_period = 0;
  CHECK_THROWS_AS(z_update_sdca(anchor, std::vector<double>{0.5, 0.5}, t, 1.0, bad, rng), ParameterError);
  CHECK_THROWS_AS(make_sdca_targets(std::vector<double>{1, 2, 3}, 2, false), DimensionError);
}
