#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "geostat/covariance.hpp"
#include "geostat/geometry.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

/// Exact dense covariance, or the independent-blocks approximation that keeps
/// only diagonal super tiles of `super_tile` x `super_tile` tiles.
struct Approximation {
  enum class Kind { Exact, Independent };
  Kind kind = Kind::Exact;
  Index super_tile = 1;

  static Approximation exact() { return {}; }
  static Approximation independent(Index super_tile);

  bool is_exact() const noexcept { return kind == Kind::Exact; }
};

struct LikelihoodProblem {
  LocationSet locations;
  std::vector<double> z;
  Index nb = 128;
  Approximation approx = Approximation::exact();

  /// Throws ShapeMismatch if |z| differs from the number of sites, DomainError
  /// for a non-positive tile size or super tile.
  void validate() const;
};

/// Gaussian log-likelihood of the zero-mean field:
///   l = -n/2 log(2 pi) - 1/2 log|S| - 1/2 Z^T S^-1 Z
/// with S the (possibly IND-masked) Matérn covariance. Generation, Cholesky
/// and the triangular solve run as one task stream. Throws NotPositiveDefinite.
double log_likelihood(const LikelihoodProblem& problem, const MaternParams& theta,
                      const sched::ExecutionOptions& exec);

/// Covariance of `sites` in symmetric tile storage, masked when `approx` is
/// IND (absent tiles outside the diagonal super tiles), generated in a stream.
TileMatrix covariance_tiles(const LocationSet& sites, const MaternParams& theta,
                            Index nb, const Approximation& approx,
                            const sched::ExecutionOptions& exec);

struct OptimizerConfig {
  // Order: variance, range, smoothness.
  std::array<double, 3> lower{0.01, 0.01, 0.1};
  std::array<double, 3> upper{5.0, 5.0, 2.0};
  std::array<double, 3> start{};
  double xtol_rel = 1e-5;
  std::size_t max_evals = 500;
  /// Held fixed during the fit.
  double nugget = 0.0;

  /// Defaults: variance in [0.01, 5], range in [0.01, 5 * diameter],
  /// smoothness in [0.1, 2]; start at the geometric midpoint of each interval.
  static OptimizerConfig defaults_for(const LocationSet& sites);

  /// lower <= upper (equal bounds freeze a component), start within bounds,
  /// xtol_rel > 0, max_evals >= 1. Throws DomainError.
  void validate() const;
};

struct TraceEntry {
  MaternParams theta;
  double loglik;  // -infinity for a failed (non-PD) evaluation
  double seconds;
};

struct FitResult {
  MaternParams theta_hat;
  double loglik = 0.0;
  std::size_t evaluations = 0;
  std::vector<TraceEntry> trace;
  double wall_seconds = 0.0;
};

/// Maximizes log_likelihood over the box with a bounded Nelder-Mead search.
/// Failed evaluations count as -infinity. Throws FitFailed if none succeeded.
FitResult mle_fit(const LikelihoodProblem& problem, const OptimizerConfig& config,
                  const sched::ExecutionOptions& exec);

}  // namespace geostat
