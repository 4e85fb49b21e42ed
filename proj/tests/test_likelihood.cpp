#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "geostat/errors.hpp"
#include "geostat/likelihood.hpp"
#include "geostat/simulate.hpp"
#include "oracles.hpp"

using namespace geostat;

namespace {

const sched::ExecutionOptions kSerial{};
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

LocationSet random_sites(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Location> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return LocationSet(pts);
}

oracle::Dense dense_cov(const LocationSet& s, const MaternParams& p) {
  const std::size_t n = s.size();
  oracle::Dense a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i + j * n] = i == j ? p.variance + p.nugget : matern(euclidean_distance(s[i], s[j]), p);
  return a;
}

}  // namespace

TEST_CASE("single site") {
  LikelihoodProblem p{LocationSet({{0.5, 0.5}}), {0.0}, 8};
  CHECK(log_likelihood(p, {1, 0.1, 0.5, 0}, kSerial) == doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-15));
  CHECK(-0.5 * kLog2Pi == doctest::Approx(-0.9189385332).epsilon(1e-10));
}

TEST_CASE("identity covariance through single-site independent blocks") {
  LikelihoodProblem p{LocationSet({{0, 0}, {0.01, 0}, {0.02, 0}}), {0, 0, 0}, 1,
                      Approximation::independent(1)};
  CHECK(log_likelihood(p, {1, 0.1, 0.5, 0}, kSerial) == doctest::Approx(-1.5 * kLog2Pi).epsilon(1e-15));
}

TEST_CASE("matches the dense oracle") {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<std::size_t> size(2, 128);
    const std::size_t n = trial == 0 ? 64 : size(rng);
    auto sites = random_sites(n, rng);
    std::vector<double> z(n);
    for (auto& v : z) v = normal(rng);
    const MaternParams theta{std::uniform_real_distribution<double>(0.3, 3)(rng),
                             std::uniform_real_distribution<double>(0.02, 0.3)(rng),
                             std::uniform_real_distribution<double>(0.2, 1.5)(rng), 1e-3};
    const double want = oracle::gaussian_loglik(dense_cov(sites, theta), z);
    for (Index nb : {Index{7}, Index{32}, Index{128}}) {
      LikelihoodProblem p{sites, z, nb};
      CHECK(std::abs(log_likelihood(p, theta, kSerial) - want) <= 1e-8);
    }
  }
}

TEST_CASE("invariant under a joint permutation") {
  std::mt19937_64 rng(31);
  auto sites = random_sites(90, rng);
  std::normal_distribution<double> normal;
  std::vector<double> z(90);
  for (auto& v : z) v = normal(rng);
  std::vector<std::size_t> perm(90);
  for (std::size_t i = 0; i < 90; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> zp(90);
  for (std::size_t i = 0; i < 90; ++i) zp[i] = z[perm[i]];
  const MaternParams theta{1, 0.1, 0.5, 0};
  const double a = log_likelihood({sites, z, 16}, theta, kSerial);
  const double b = log_likelihood({sites.select(perm), zp, 16}, theta, kSerial);
  CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(LikelihoodProblem({LocationSet({{0, 0}}), {1, 2}, 8}).validate(), ShapeMismatch);
  CHECK_THROWS_AS(LikelihoodProblem({LocationSet({{0, 0}}), {1}, 0}).validate(), DomainError);
  CHECK_THROWS_AS(Approximation::independent(0), DomainError);
}

TEST_CASE("non positive definite surfaces with a pivot") {
  // Smoothness 2 with a long range on near-coincident sites is numerically singular.
  std::vector<Location> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({i * 1e-4, 0.0});
  LikelihoodProblem p{LocationSet(pts), std::vector<double>(40, 1.0), 8};
  CHECK_THROWS_AS(log_likelihood(p, {1, 5, 2, 0}, kSerial), NotPositiveDefinite);
}

TEST_CASE("optimizer contract") {
  SimulationSpec spec;
  spec.n = 200;
  spec.params = {1, 0.1, 0.5, 0};
  spec.seed = 4;
  spec.nb = 64;
  auto field = simulate_field(spec, kSerial);
  LikelihoodProblem p{field.locations, field.z, 64};

  SUBCASE("one evaluation returns the start") {
    auto cfg = OptimizerConfig::defaults_for(p.locations);
    cfg.start = {1, 0.1, 0.5};
    cfg.max_evals = 1;
    auto fit = mle_fit(p, cfg, kSerial);
    CHECK(fit.evaluations == 1);
    REQUIRE(fit.trace.size() == 1);
    CHECK(fit.theta_hat == MaternParams{1, 0.1, 0.5, 0});
    CHECK(fit.loglik == log_likelihood(p, {1, 0.1, 0.5, 0}, kSerial));
  }

  SUBCASE("bounds, trace and incumbent") {
    auto cfg = OptimizerConfig::defaults_for(p.locations);
    cfg.max_evals = 150;
    auto fit = mle_fit(p, cfg, kSerial);
    CHECK(fit.evaluations == fit.trace.size());
    CHECK(fit.evaluations <= 150);
    const double v = fit.theta_hat.variance, r = fit.theta_hat.range, s = fit.theta_hat.smoothness;
    CHECK(v >= cfg.lower[0]);
    CHECK(v <= cfg.upper[0]);
    CHECK(r >= cfg.lower[1]);
    CHECK(r <= cfg.upper[1]);
    CHECK(s >= cfg.lower[2]);
    CHECK(s <= cfg.upper[2]);
    double best = -INFINITY;
    for (auto& e : fit.trace) {
      CHECK(e.theta.variance >= cfg.lower[0]);
      CHECK(e.theta.range <= cfg.upper[1]);
      best = std::max(best, e.loglik);
    }
    CHECK(best == fit.loglik);
    // The fit beats the starting point.
    CHECK(fit.loglik >= fit.trace.front().loglik);
  }

  SUBCASE("equal bounds freeze components") {
    OptimizerConfig cfg;
    cfg.lower = {0.01, 0.1, 0.5};
    cfg.upper = {5, 0.1, 0.5};
    cfg.start = {2, 0.1, 0.5};
    auto fit = mle_fit(p, cfg, kSerial);
    for (auto& e : fit.trace) {
      CHECK(e.theta.range == 0.1);
      CHECK(e.theta.smoothness == 0.5);
    }
  }

  SUBCASE("config validation") {
    OptimizerConfig cfg;
    cfg.start = {1, 0.1, 0.5};
    CHECK_NOTHROW(cfg.validate());
    cfg.start = {6, 0.1, 0.5};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.start = {1, 0.1, 0.5};
    cfg.lower[0] = 2;
    cfg.upper[0] = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }
}

TEST_CASE("all evaluations failing raises FitFailed") {
  std::vector<Location> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({i * 1e-4, 0.0});
  LikelihoodProblem p{LocationSet(pts), std::vector<double>(40, 1.0), 8};
  OptimizerConfig cfg;
  cfg.lower = {1, 5, 2};
  cfg.upper = {1, 5, 2};
  cfg.start = {1, 5, 2};
  CHECK_THROWS_AS(mle_fit(p, cfg, kSerial), FitFailed);
}

TEST_CASE("variance recovery with range and smoothness frozen") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimulationSpec spec;
    spec.n = 400;
    spec.params = {1, 0.1, 0.5, 0};
    spec.seed = seed;
    auto field = simulate_field(spec, kSerial);
    LikelihoodProblem p{field.locations, field.z, 128};
    OptimizerConfig cfg;
    cfg.lower = {0.01, 0.1, 0.5};
    cfg.upper = {5, 0.1, 0.5};
    cfg.start = {std::sqrt(0.05), 0.1, 0.5};
    auto fit = mle_fit(p, cfg, kSerial);
    if (fit.theta_hat.variance >= 0.7 && fit.theta_hat.variance <= 1.3) ++hits;
  }
  CHECK(hits >= 16);
}
