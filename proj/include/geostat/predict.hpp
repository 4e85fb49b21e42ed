#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "geostat/covariance.hpp"
#include "geostat/geometry.hpp"
#include "geostat/likelihood.hpp"
#include "geostat/scheduler.hpp"

namespace geostat {

/// The field is zero-mean on both the observed and the target side.
inline constexpr double kPriorMean = 0.0;

struct PredictionTask {
  MaternParams theta;
  LocationSet observed;
  std::vector<double> z;
  LocationSet targets;
};

struct PredictOptions {
  Index nb = 128;
  /// IND masks only the observation covariance; the cross-covariance stays dense.
  Approximation approx = Approximation::exact();
  bool with_variance = false;
  sched::ExecutionOptions exec;
};

struct Prediction {
  std::vector<double> mean;
  /// Conditional variances; empty unless requested.
  std::vector<double> variance;
};

/// Simple kriging: mean = S12 S22^-1 Z2, and optionally
/// variance_i = S11_ii - (S12 S22^-1 S21)_ii. Throws NotPositiveDefinite.
Prediction krige_predict(const PredictionTask& task, const PredictOptions& options);

/// Mean squared difference. Throws ShapeMismatch on length mismatch or empty input.
double mse(std::span<const double> predicted, std::span<const double> truth);

/// Refit the model on each training fold.
struct RefitEachFold {
  /// When empty, OptimizerConfig::defaults_for(training sites) per fold.
  std::optional<OptimizerConfig> config;
};

using CvModel = std::variant<MaternParams, RefitEachFold>;

struct CvReport {
  std::size_t k = 0;
  std::vector<double> per_fold_mse;
  std::vector<std::size_t> fold_sizes;
  std::vector<MaternParams> fold_theta;
  double mean_mse = 0.0;
  /// Mean wall time of one fold's krige_predict call.
  double seconds_per_prediction = 0.0;
};

/// Seeded shuffle of 0..n-1 cut into k contiguous folds whose sizes differ by
/// at most one. Throws DomainError unless 2 <= k <= n.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed);

/// k-fold cross-validation of kriging predictions. Any fold error propagates.
CvReport k_fold_cv(const LocationSet& sites, std::span<const double> z, std::size_t k,
                   const CvModel& model, std::uint64_t seed,
                   const PredictOptions& options);

}  // namespace geostat
