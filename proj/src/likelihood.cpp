#include "geostat/likelihood.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "geostat/errors.hpp"
#include "geostat/ind_approx.hpp"
#include "geostat/optimizer.hpp"
#include "geostat/tile_algorithms.hpp"

namespace geostat {

Approximation Approximation::independent(Index super_tile) {
  if (super_tile < 1) throw DomainError("IND super tile size must be at least 1");
  return {Kind::Independent, super_tile};
}

void LikelihoodProblem::validate() const {
  if (z.size() != locations.size()) {
    throw ShapeMismatch("likelihood: measurement count differs from location count");
  }
  if (nb < 1) throw DomainError("likelihood: tile size must be positive");
  if (!approx.is_exact() && approx.super_tile < 1) {
    throw DomainError("likelihood: IND super tile size must be at least 1");
  }
}

namespace {

TileMatrix empty_covariance(Index n, Index nb, const Approximation& approx) {
  TileMatrix sigma(n, n, nb, Structure::SymmetricLower, /*allocate=*/false);
  for (Index j = 0; j < sigma.tile_cols(); ++j) {
    for (Index i = j; i < sigma.tile_rows(); ++i) {
      if (approx.is_exact() || in_super_tile(i, j, approx.super_tile)) {
        sigma.ensure_tile(i, j);
      }
    }
  }
  return sigma;
}

}  // namespace

TileMatrix covariance_tiles(const LocationSet& sites, const MaternParams& theta,
                            Index nb, const Approximation& approx,
                            const sched::ExecutionOptions& exec) {
  const MaternKernel kernel(theta);
  TileMatrix sigma = empty_covariance(static_cast<Index>(sites.size()), nb, approx);
  sched::TaskStream stream;
  submit_cov_generation(stream, sigma, sites, sites, kernel);
  sched::run(std::move(stream), exec);
  return sigma;
}

double log_likelihood(const LikelihoodProblem& problem, const MaternParams& theta,
                      const sched::ExecutionOptions& exec) {
  problem.validate();
  const MaternKernel kernel(theta);
  const auto n = static_cast<Index>(problem.locations.size());

  TileMatrix sigma = empty_covariance(n, problem.nb, problem.approx);
  TileMatrix z = TileMatrix::from_vector(problem.z, problem.nb);

  sched::TaskStream stream;
  submit_cov_generation(stream, sigma, problem.locations, problem.locations, kernel);
  submit_cholesky(stream, sigma);
  submit_trsm(stream, sigma, z, Trans::No);
  sched::run(std::move(stream), exec);

  const double log_det = log_det_from_factor(sigma);
  const double quad = tile_dot(z, z);
  return -0.5 * quad - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

OptimizerConfig OptimizerConfig::defaults_for(const LocationSet& sites) {
  OptimizerConfig cfg;
  const double diameter = sites.diameter();
  cfg.upper[1] = std::max(5.0 * diameter, 2.0 * cfg.lower[1]);
  for (std::size_t i = 0; i < 3; ++i) cfg.start[i] = std::sqrt(cfg.lower[i] * cfg.upper[i]);
  return cfg;
}

void OptimizerConfig::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(lower[i] > 0.0) || !(lower[i] <= upper[i]) || !std::isfinite(upper[i])) {
      throw DomainError("optimizer bounds must satisfy 0 < lower <= upper < inf");
    }
    if (!(start[i] >= lower[i] && start[i] <= upper[i])) {
      throw DomainError("optimizer start must lie within the bounds");
    }
  }
  if (!(xtol_rel > 0.0)) throw DomainError("xtol_rel must be positive");
  if (max_evals < 1) throw DomainError("max_evals must be at least 1");
  if (!(nugget >= 0.0)) throw DomainError("nugget must be non-negative");
}

FitResult mle_fit(const LikelihoodProblem& problem, const OptimizerConfig& config,
                  const sched::ExecutionOptions& exec) {
  problem.validate();
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();

  FitResult fit;
  auto objective = [&](std::span<const double> x) {
    const MaternParams theta{x[0], x[1], x[2], config.nugget};
    const auto t0 = clock::now();
    double value = -std::numeric_limits<double>::infinity();
    try {
      value = log_likelihood(problem, theta, exec);
    } catch (const NotPositiveDefinite&) {
    }
    if (!std::isfinite(value)) value = -std::numeric_limits<double>::infinity();
    fit.trace.push_back(
        {theta, value, std::chrono::duration<double>(clock::now() - t0).count()});
    return value;
  };

  BoxConstraints box;
  box.lower.assign(config.lower.begin(), config.lower.end());
  box.upper.assign(config.upper.begin(), config.upper.end());
  box.start.assign(config.start.begin(), config.start.end());
  box.xtol_rel = config.xtol_rel;
  box.max_evals = config.max_evals;
  const auto best = maximize_in_box(objective, box);

  fit.evaluations = fit.trace.size();
  fit.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
  if (!std::isfinite(best.value)) {
    throw FitFailed("every likelihood evaluation failed (non-positive-definite covariance)");
  }
  fit.theta_hat = {best.x[0], best.x[1], best.x[2], config.nugget};
  fit.loglik = best.value;
  return fit;
}

}  // namespace geostat
