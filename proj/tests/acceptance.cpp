// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on any
// FAIL. Runtime budgets are checked alongside the numerical tolerances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "geostat/bessel.hpp"
#include "geostat/covariance.hpp"
#include "geostat/geometry.hpp"
#include "geostat/ind_approx.hpp"
#include "geostat/likelihood.hpp"
#include "geostat/predict.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/simulate.hpp"
#include "geostat/tile_algorithms.hpp"
#include "oracles.hpp"

using namespace geostat;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

Outcome judge(bool ok, std::string detail) {
  return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

sched::ExecutionOptions exec() { return {sched::default_workers(), nullptr}; }

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

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return v;
}

// Matérn limits: nu = 1/2 is the exponential, nu = 1 is (r/a) K_1(r/a).
Outcome matern_limits() {
  const MaternParams half{1.7, 0.3, 0.5, 0}, one{1.7, 0.3, 1.0, 0};
  double worst_half = 0, worst_one = 0;
  for (double r : log_space(1e-4, 10, 200)) {
    const double x = r / 0.3;
    worst_half = std::max(worst_half, oracle::rel_err(matern(r, half), 1.7 * std::exp(-x)));
    worst_one = std::max(worst_one, oracle::rel_err(matern(r, one),
                                                    1.7 * x * oracle::bessel_k_quadrature(1.0, x)));
  }
  return judge(worst_half <= 1e-10 && worst_one <= 1e-10,
               fmt("max rel err nu=0.5 %.1e, nu=1 %.1e", worst_half, worst_one));
}

Outcome bessel_oracle() {
  double worst = 0;
  for (double nu : {0.3, 0.5, 1.0, 1.7, 2.5}) {
    for (double x : log_space(1e-3, 30, 80)) {
      worst = std::max(worst, oracle::rel_err(bessel_k(nu, x), oracle::bessel_k_quadrature(nu, x)));
    }
  }
  return judge(worst <= 1e-8, fmt("max rel err %.1e over 400 points", worst));
}

Outcome tile_algebra() {
  std::mt19937_64 rng(2024);
  const sched::ExecutionOptions ex = exec();
  const Index nbs[] = {16, 64, 128};
  double chol = 0, trsm = 0, trmm = 0, gemm = 0, posv = 0, logdet = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Index nb = nbs[inst % 3];
    const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 512)(rng));
    const auto m = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 40)(rng));
    const auto k = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 200)(rng));
    const auto sn = static_cast<Index>(n), sm = static_cast<Index>(m), sk = static_cast<Index>(k);
    const auto a = oracle::random_spd(n, rng);

    auto l = TileMatrix::from_dense(a, sn, sn, nb, Structure::SymmetricLower);
    tile_cholesky(l, ex);
    const auto ld = lower_factor_dense(l);
    auto llt = oracle::matmul(ld, n, n, false, ld, n, n, true);
    for (std::size_t i = 0; i < llt.size(); ++i) llt[i] -= a[i];
    chol = std::max(chol, oracle::frobenius(llt) / oracle::frobenius(a));

    const auto want_ld = oracle::log_det(a, n);
    logdet = std::max(logdet, std::abs(log_det_from_factor(l) - want_ld) / std::max(1.0, std::abs(want_ld)));

    const auto b = oracle::random_matrix(n, m, rng);
    for (bool t : {false, true}) {
      auto x = TileMatrix::from_dense(b, sn, sm, nb);
      tile_trsm(l, x, t ? Trans::Yes : Trans::No, ex);
      trsm = std::max(trsm, oracle::normwise_err(x.to_dense(), oracle::lower_solve(ld, n, t, b, m)));
    }
    auto y = TileMatrix::from_dense(b, sn, sm, nb);
    tile_trmm(l, y, ex);
    trmm = std::max(trmm, oracle::normwise_err(y.to_dense(), oracle::matmul(ld, n, n, false, b, n, m, false)));

    const auto g = oracle::random_matrix(n, k, rng);
    const auto h = oracle::random_matrix(k, m, rng);
    const auto prod = tile_gemm(TileMatrix::from_dense(g, sn, sk, nb), TileMatrix::from_dense(h, sk, sm, nb), ex);
    gemm = std::max(gemm, oracle::normwise_err(prod.to_dense(), oracle::matmul(g, n, k, false, h, k, m, false)));

    auto sa = TileMatrix::from_dense(a, sn, sn, nb, Structure::SymmetricLower);
    auto sb = TileMatrix::from_dense(b, sn, sm, nb);
    tile_posv(sa, sb, ex);
    posv = std::max(posv, oracle::normwise_err(sb.to_dense(), oracle::matmul(oracle::inverse(a, n), n, n, false, b, n, m, false)));
  }
  const bool ok = chol <= 1e-12 && trsm <= 1e-12 && trmm <= 1e-12 && gemm <= 1e-12 && posv <= 1e-12 && logdet <= 1e-10;
  return judge(ok, fmt("50 instances: chol %.1e trsm %.1e trmm %.1e gemm %.1e posv %.1e logdet %.1e",
                       chol, trsm, trmm, gemm, posv, logdet));
}

Outcome scheduler_determinism() {
  std::mt19937_64 rng(7);
  const std::size_t n = 256;
  const auto a = oracle::random_spd(n, rng);
  std::vector<double> reference;
  bool identical = true, extension = true;
  for (std::size_t workers : {1, 2, 8}) {
    auto m = TileMatrix::from_dense(a, n, n, 32, Structure::SymmetricLower);
    sched::TaskStream stream;
    submit_cholesky(stream, m);
    const auto graph = sched::build_dag(std::move(stream).take());
    std::vector<sched::TraceEvent> trace;
    sched::execute(graph, {workers, &trace});

    std::vector<std::int64_t> begin(graph.size(), -1), end(graph.size(), -1);
    for (const auto& ev : trace) {
      if (begin[ev.task] != -1) extension = false;
      begin[ev.task] = ev.begin_ns;
      end[ev.task] = ev.end_ns;
    }
    if (trace.size() != graph.size()) extension = false;
    for (const auto& e : graph.edges()) {
      if (begin[e.to] < 0 || end[e.from] < 0 || end[e.from] > begin[e.to]) extension = false;
    }
    const auto f = lower_factor_dense(m);
    if (reference.empty()) {
      reference = f;
    } else if (f != reference) {
      identical = false;
    }
  }
  return judge(identical && extension,
               fmt("factors bitwise identical: %s, traces are linear extensions: %s",
                   identical ? "yes" : "no", extension ? "yes" : "no"));
}

Outcome likelihood_oracle() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 128)(rng));
    const auto sites = random_sites(n, rng);
    std::vector<double> z(n);
    for (auto& v : z) v = normal(rng);
    const MaternParams theta{0.3 + 2.7 * u(rng), 0.02 + 0.2 * u(rng), 0.3 + 1.7 * u(rng), 1e-3};
    const Index nb = std::uniform_int_distribution<Index>(4, 64)(rng);
    const double got = log_likelihood({sites, z, nb}, theta, exec());
    worst = std::max(worst, std::abs(got - oracle::gaussian_loglik(dense_cov(sites, theta), z)));
  }
  return judge(worst <= 1e-8, fmt("max |dl| %.1e over 20 problems", worst));
}

// Shared Monte Carlo data: the n = 1600 replicates and their exact fits feed
// the recovery, the prediction-trend and the approximation-trend criteria.
constexpr std::size_t kLargeN = 1600;
constexpr std::size_t kSmallN = 400;
constexpr Index kNb = 160;
const MaternParams kTruth{1.0, 0.1, 0.5, 0.0};

struct Replicate {
  SimulatedField field;
  MaternParams theta_hat;
};

std::vector<Replicate> large_replicates;

SimulatedField simulate(std::size_t n, std::uint64_t seed) {
  SimulationSpec spec;
  spec.n = n;
  spec.params = kTruth;
  spec.seed = seed;
  spec.nb = kNb;
  return simulate_field(spec, exec());
}

MaternParams fit(const SimulatedField& f, Index nb, const Approximation& approx) {
  LikelihoodProblem p{f.locations, f.z, nb, approx};
  return mle_fit(p, OptimizerConfig::defaults_for(f.locations), exec()).theta_hat;
}

double cv_mse(const SimulatedField& f, const MaternParams& theta, Index nb,
              const Approximation& approx, std::uint64_t seed) {
  PredictOptions opt;
  opt.nb = nb;
  opt.approx = approx;
  opt.exec = exec();
  return k_fold_cv(f.locations, f.z, 10, theta, seed, opt).mean_mse;
}

// Seeds 1, 2, ... in order, so any prefix is shared between criteria.
void ensure_large_replicates(std::size_t count) {
  while (large_replicates.size() < count) {
    auto f = simulate(kLargeN, large_replicates.size() + 1);
    const auto th = fit(f, kNb, Approximation::exact());
    large_replicates.push_back({std::move(f), th});
  }
}

Outcome recovery() {
  ensure_large_replicates(20);
  std::vector<double> t1, t2, t3;
  for (const auto& r : large_replicates) {
    t1.push_back(r.theta_hat.variance);
    t2.push_back(r.theta_hat.range);
    t3.push_back(r.theta_hat.smoothness);
  }
  const double m1 = median(t1), m2 = median(t2), m3 = median(t3);
  const bool ok = m1 >= 0.7 && m1 <= 1.3 && m2 >= 0.05 && m2 <= 0.2 && m3 >= 0.4 && m3 <= 0.6;
  return judge(ok, fmt("20 fits at n=1600: median theta = (%.3f, %.4f, %.3f)", m1, m2, m3));
}

Outcome prediction_trend() {
  ensure_large_replicates(10);
  std::vector<double> large, small;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto& r = large_replicates[s];
    large.push_back(cv_mse(r.field, r.theta_hat, kNb, Approximation::exact(), 500 + s));
    const auto f = simulate(kSmallN, 100 + s);
    small.push_back(cv_mse(f, fit(f, kNb, Approximation::exact()), kNb, Approximation::exact(), 500 + s));
  }
  const double ml = median(large), ms = median(small);
  return judge(ml < ms, fmt("median 10-fold MSE n=1600 %.4f vs n=400 %.4f", ml, ms));
}

std::map<std::string, std::size_t> enumerated_counts(Index p, Index s) {
  std::map<std::string, std::size_t> c;
  for (Index b0 = 0; b0 < p; b0 += s) {
    const Index b1 = std::min(p, b0 + s);
    for (Index k = b0; k < b1; ++k) {
      ++c["potrf"];
      for (Index i = k + 1; i < b1; ++i) {
        ++c["trsm"];
        ++c["syrk"];
        for (Index j = k + 1; j < i; ++j) ++c["gemm"];
      }
    }
  }
  return c;
}

Outcome ind_consistency() {
  const auto f = simulate(300, 42);
  const MaternParams theta{1.3, 0.07, 0.8, 0};
  const Index nb = 32;  // 10 tiles
  const LikelihoodProblem exact{f.locations, f.z, nb};
  const double le = log_likelihood(exact, theta, exec());
  double cover = 0;
  for (Index s : {10, 12, 40}) cover = std::max(cover, std::abs(ind_log_likelihood(exact, {s}, theta, exec()) - le));

  double block = 0;
  for (Index s : {1, 2, 3, 4, 7}) {
    const std::size_t width = static_cast<std::size_t>(s * nb);
    double sum = 0;
    for (std::size_t b0 = 0; b0 < f.z.size(); b0 += width) {
      std::vector<std::size_t> idx;
      std::vector<double> zb;
      for (std::size_t i = b0; i < std::min(f.z.size(), b0 + width); ++i) {
        idx.push_back(i);
        zb.push_back(f.z[i]);
      }
      sum += log_likelihood({f.locations.select(idx), zb, nb}, theta, exec());
    }
    block = std::max(block, std::abs(ind_log_likelihood(exact, {s}, theta, exec()) - sum));
  }

  bool counts = true;
  for (Index p : {1, 5, 6, 10, 16}) {
    for (Index s : {1, 2, 3, 4, 7, 16}) {
      auto masked = ind_mask(TileMatrix(p * 4, p * 4, 4, Structure::SymmetricLower), {s});
      sched::TaskStream stream;
      submit_cholesky(stream, masked);
      const auto want = enumerated_counts(p, s);
      std::size_t total = 0;
      for (const auto& [kernel, count] : want) {
        total += count;
        if (stream.count(kernel) != count) counts = false;
      }
      if (stream.size() != total) counts = false;
    }
  }

  const auto big = simulate(4096, 43);
  const LikelihoodProblem pe{big.locations, big.z, 256};
  const LikelihoodProblem pi{big.locations, big.z, 256, Approximation::independent(2)};
  double te = 1e300, ti = 1e300;
  for (int rep = 0; rep < 2; ++rep) {
    te = std::min(te, timed([&] { log_likelihood(pe, kTruth, exec()); }));
    ti = std::min(ti, timed([&] { log_likelihood(pi, kTruth, exec()); }));
  }
  const bool ok = cover <= 1e-10 && block <= 1e-10 && counts && ti < te;
  return judge(ok, fmt("s>=p |dl| %.1e, block sums |dl| %.1e, task counts %s, n=4096 exact %.2fs vs IND(2) %.2fs",
                       cover, block, counts ? "exact" : "MISMATCH", te, ti));
}

Outcome approximation_trend() {
  ensure_large_replicates(10);
  const auto ind = Approximation::independent(1);
  std::vector<double> exact_mse, ind_mse;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto& r = large_replicates[s];
    exact_mse.push_back(cv_mse(r.field, r.theta_hat, kNb, Approximation::exact(), 700 + s));
    ind_mse.push_back(cv_mse(r.field, fit(r.field, kNb, ind), kNb, ind, 700 + s));
  }
  const double me = mean(exact_mse), mi = mean(ind_mse);
  return judge(me <= mi, fmt("mean 10-fold MSE exact %.5f vs IND(1) %.5f", me, mi));
}

Outcome parallel_speedup() {
  std::mt19937_64 rng(11);
  const auto sites = random_sites(2048, rng);
  const MaternParams theta{1, 0.1, 0.5, 1e-6};
  double t[2] = {1e300, 1e300};
  const std::size_t workers[2] = {1, 4};
  for (int rep = 0; rep < 2; ++rep) {
    for (int w = 0; w < 2; ++w) {
      auto a = covariance_tiles(sites, theta, 256, Approximation::exact(), {1, nullptr});
      t[w] = std::min(t[w], timed([&] { tile_cholesky(a, {workers[w], nullptr}); }));
    }
  }
  const double ratio = t[1] / t[0];
  const unsigned cores = std::thread::hardware_concurrency();
  const auto detail = fmt("n=2048 4-worker/1-worker time %.2f (%.3fs vs %.3fs), host cores %u",
                          ratio, t[1], t[0], cores);
  if (cores < 4) return {Verdict::Skip, detail + "; needs >= 4 cores"};
  return judge(ratio <= 0.6, detail);
}

Outcome kriging_exactness() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  const auto sites = random_sites(50, rng);
  std::vector<double> z(50);
  for (auto& v : z) v = normal(rng);
  PredictOptions opt;
  opt.nb = 16;
  opt.exec = exec();
  const auto pred = krige_predict({{1, 0.1, 0.5, 0}, sites, z, sites}, opt);
  double worst = 0;
  for (std::size_t i = 0; i < z.size(); ++i) worst = std::max(worst, oracle::rel_err(pred.mean[i], z[i]));
  return judge(worst <= 1e-6, fmt("max rel err at 50 observed sites %.1e", worst));
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  bool budget_assumes_four_cores;
  std::function<Outcome()> run;
};

}  // namespace

// Arguments select criteria by number; none runs all of them.
int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {1, "matern-limit-cases", 1, false, matern_limits},
      {2, "bessel-k-oracle", 10, false, bessel_oracle},
      {3, "tile-algebra-oracles", 120, false, tile_algebra},
      {4, "scheduler-determinism", 30, false, scheduler_determinism},
      {5, "exact-loglik-oracle", 60, false, likelihood_oracle},
      {6, "monte-carlo-recovery", 900, true, recovery},
      {7, "prediction-mse-trend", 1200, false, prediction_trend},
      {8, "ind-consistency", 300, false, ind_consistency},
      {9, "ind-vs-exact-mse-trend", 1500, false, approximation_trend},
      {10, "parallel-speedup", 120, false, parallel_speedup},
      {11, "kriging-exactness", 5, false, kriging_exactness},
  };
  const unsigned cores = std::thread::hardware_concurrency();
  std::printf("host: %u hardware threads, %zu workers\n", cores, sched::default_workers());
  int failures = 0;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    Outcome out{Verdict::Fail, ""};
    const double secs = timed([&] {
      try {
        out = c.run();
      } catch (const std::exception& e) {
        out = {Verdict::Fail, std::string("exception: ") + e.what()};
      }
    });
    std::string time_note = fmt("%.1fs, budget %.0fs", secs, c.budget_seconds);
    if (secs > c.budget_seconds && out.verdict == Verdict::Pass) {
      if (c.budget_assumes_four_cores && cores < 4) {
        time_note += " stated for 4 cores, over budget on this host";
      } else {
        out.verdict = Verdict::Fail;
        time_note += " EXCEEDED";
      }
    }
    const char* tag = out.verdict == Verdict::Pass ? "PASS" : out.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::printf("%s %2d %s: %s (%s)\n", tag, c.id, c.name, out.detail.c_str(), time_note.c_str());
    std::fflush(stdout);
    failures += out.verdict == Verdict::Fail;
  }
  return failures == 0 ? 0 : 1;
}
