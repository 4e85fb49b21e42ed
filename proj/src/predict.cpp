#include "geostat/predict.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "geostat/errors.hpp"
#include "geostat/ind_approx.hpp"
#include "geostat/random.hpp"
#include "geostat/tile_algorithms.hpp"

namespace geostat {

Prediction krige_predict(const PredictionTask& task, const PredictOptions& options) {
  task.theta.validate();
  if (task.z.size() != task.observed.size()) {
    throw ShapeMismatch("krige_predict: measurement count differs from observed sites");
  }
  if (!(task.observed.metric() == task.targets.metric())) {
    throw ShapeMismatch("krige_predict: observed and target sites use different metrics");
  }
  const auto n = static_cast<Index>(task.observed.size());
  const auto m = static_cast<Index>(task.targets.size());
  const Index nb = options.nb;
  const MaternKernel kernel(task.theta);

  TileMatrix sigma22 = covariance_tiles(task.observed, task.theta, nb, options.approx,
                                        {options.exec.workers, nullptr});
  TileMatrix sigma12(m, n, nb);
  TileMatrix x = TileMatrix::from_vector(task.z, nb);

  sched::TaskStream stream;
  submit_cov_generation(stream, sigma12, task.targets, task.observed, kernel);
  submit_cholesky(stream, sigma22);
  submit_trsm(stream, sigma22, x, Trans::No);
  submit_trsm(stream, sigma22, x, Trans::Yes);
  TileMatrix z1(m, 1, nb);
  submit_gemm(stream, sigma12, x, z1);
  sched::run(std::move(stream), options.exec);

  Prediction out;
  out.mean = z1.to_vector();

  if (options.with_variance) {
    // V = L^-1 S21; variance_j = C(0) - |V(:, j)|^2.
    TileMatrix sigma21(n, m, nb);
    sched::TaskStream vs;
    submit_cov_generation(vs, sigma21, task.observed, task.targets, kernel);
    submit_trsm(vs, sigma22, sigma21, Trans::No);
    sched::run(std::move(vs), options.exec);
    out.variance.assign(static_cast<std::size_t>(m), kernel.params().variance);
    for (Index tj = 0; tj < sigma21.tile_cols(); ++tj) {
      for (Index ti = 0; ti < sigma21.tile_rows(); ++ti) {
        const double* t = sigma21.tile(ti, tj);
        const Index h = sigma21.tile_height(ti);
        for (Index c = 0; c < sigma21.tile_width(tj); ++c) {
          const double* col = t + c * h;
          out.variance[static_cast<std::size_t>(tj * nb + c)] -=
              kernels::active_kernels().dot(h, col, col);
        }
      }
    }
  }
  return out;
}

double mse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw ShapeMismatch("mse: length mismatch");
  if (predicted.empty()) throw ShapeMismatch("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed) {
  if (k < 2 || k > n) throw DomainError("k-fold: need 2 <= k <= n");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto engine = make_engine(seed, Substream::Folds);
  std::shuffle(order.begin(), order.end(), engine);

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t begin = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                    order.begin() + static_cast<std::ptrdiff_t>(begin + size));
    begin += size;
  }
  return folds;
}

CvReport k_fold_cv(const LocationSet& sites, std::span<const double> z, std::size_t k,
                   const CvModel& model, std::uint64_t seed,
                   const PredictOptions& options) {
  if (z.size() != sites.size()) throw ShapeMismatch("k_fold_cv: measurement count mismatch");
  const auto folds = make_folds(sites.size(), k, seed);

  CvReport report;
  report.k = k;
  double predict_seconds = 0.0;
  std::vector<char> held(sites.size());
  for (const auto& fold : folds) {
    std::fill(held.begin(), held.end(), 0);
    for (auto i : fold) held[i] = 1;
    std::vector<std::size_t> train;
    train.reserve(sites.size() - fold.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (!held[i]) train.push_back(i);
    }

    PredictionTask task{MaternParams{}, sites.select(train), {}, sites.select(fold)};
    task.z.reserve(train.size());
    for (auto i : train) task.z.push_back(z[i]);

    if (const auto* fixed = std::get_if<MaternParams>(&model)) {
      task.theta = *fixed;
    } else {
      const auto& refit = std::get<RefitEachFold>(model);
      const OptimizerConfig cfg =
          refit.config ? *refit.config : OptimizerConfig::defaults_for(task.observed);
      const LikelihoodProblem problem{task.observed, task.z, options.nb, options.approx};
      task.theta = mle_fit(problem, cfg, options.exec).theta_hat;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto prediction = krige_predict(task, options);
    predict_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<double> truth;
    truth.reserve(fold.size());
    for (auto i : fold) truth.push_back(z[i]);
    report.per_fold_mse.push_back(mse(prediction.mean, truth));
    report.fold_sizes.push_back(fold.size());
    report.fold_theta.push_back(task.theta);
  }
  report.mean_mse = std::accumulate(report.per_fold_mse.begin(), report.per_fold_mse.end(), 0.0) /
                    static_cast<double>(k);
  report.seconds_per_prediction = predict_seconds / static_cast<double>(k);
  return report;
}

}  // namespace geostat
