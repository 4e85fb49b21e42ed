#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "geostat/cli.hpp"
#include "geostat/errors.hpp"
#include "geostat/io.hpp"
#include "geostat/likelihood.hpp"
#include "geostat/predict.hpp"
#include "geostat/simulate.hpp"
#include "geostat/tile_algorithms.hpp"

namespace geostat::cli {

namespace {

using json = nlohmann::json;

// Standard flop counts.
double cholesky_flops(double n) { return n * n * n / 3.0; }
double trsm_flops(double n, double rhs) { return n * n * rhs; }
double gemm_flops(double m, double n, double k) { return 2.0 * m * n * k; }

struct Common {
  Index nb = 128;
  std::size_t workers = sched::default_workers();
  std::string metric = "euclidean";
  double radius = kEarthRadiusKm;
  std::string approx = "exact";
  std::string trace_dir;

  void add_to(CLI::App& app, bool with_workers = true) {
    app.add_option("--nb", nb, "Tile size")->check(CLI::Range(Index{8}, Index{1} << 20));
    if (with_workers) {
      app.add_option("--workers", workers, "Worker threads (env GEOSTAT_WORKERS)")
          ->check(CLI::PositiveNumber);
    }
    app.add_option("--metric", metric, "euclidean | gcd")
        ->check(CLI::IsMember({"euclidean", "gcd"}));
    app.add_option("--radius", radius, "Sphere radius for gcd")->check(CLI::PositiveNumber);
    app.add_option("--approx", approx, "exact | ind:<super tile>");
  }

  Metric make_metric() const {
    return metric == "gcd" ? Metric::great_circle(radius) : Metric::euclidean();
  }

  Approximation make_approx() const {
    if (approx == "exact") return Approximation::exact();
    if (approx.rfind("ind:", 0) == 0) {
      const auto s = std::stol(approx.substr(4));
      return Approximation::independent(s);
    }
    throw DomainError("--approx must be 'exact' or 'ind:<s>'");
  }

  sched::ExecutionOptions exec() const { return {workers, nullptr}; }
};

std::vector<double> parse_triplet(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 3) throw DomainError(std::string(what) + " needs three comma-separated values");
  return v;
}

json params_json(const MaternParams& p) {
  return {{"variance", p.variance},
          {"range", p.range},
          {"smoothness", p.smoothness},
          {"nugget", p.nugget}};
}

MaternParams params_from_json(const json& j) {
  MaternParams p;
  p.variance = j.at("variance").get<double>();
  p.range = j.at("range").get<double>();
  p.smoothness = j.at("smoothness").get<double>();
  p.nugget = j.value("nugget", 0.0);
  p.validate();
  return p;
}

MaternParams read_theta_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(0, path + ": " + e.what());
  }
  if (j.contains("theta_hat")) return params_from_json(j["theta_hat"]);
  if (j.contains("theta")) return params_from_json(j["theta"]);
  return params_from_json(j);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot write " + path);
  out << j.dump(2) << '\n';
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t chosen = (static_cast<std::uint64_t>(rd()) << 32) | rd();
  err << "seed: " << chosen << '\n';
  return chosen;
}

struct DataSet {
  LocationSet sites;
  std::vector<double> z;
};

DataSet read_data(const std::string& path, const Metric& metric, bool need_z) {
  auto csv = io::read_locations_csv(path);
  if (need_z && !csv.z) throw ParseError(1, path + ": a 'z' column is required");
  return {LocationSet(std::move(csv.points), metric), csv.z.value_or(std::vector<double>{})};
}

void dump_trace(const std::string& dir, const std::string& name,
                const std::vector<sched::TraceEvent>& trace) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name);
  sched::write_trace_csv(out, trace);
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  Common common;
  std::size_t n = 400;
  std::string theta = "1,0.1,0.5";
  double nugget = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string meta;

  void add_to(CLI::App& app) {
    common.add_to(app);
    app.add_option("--n", n, "Number of locations")->check(CLI::PositiveNumber);
    app.add_option("--theta", theta, "variance,range,smoothness");
    app.add_option("--nugget", nugget, "Diagonal nugget");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out, "Output CSV (x,y,z)")->required();
    app.add_option("--meta", meta, "Sidecar JSON (default: <out>.json)");
  }

  int operator()(std::ostream& os, std::ostream& err) {
    const auto t = parse_triplet(theta, "--theta");
    SimulationSpec spec;
    spec.n = n;
    spec.params = {t[0], t[1], t[2], nugget};
    spec.seed = resolve_seed(seed, err);
    spec.nb = common.nb;
    const auto t0 = std::chrono::steady_clock::now();
    const auto field = simulate_field(spec, common.exec());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    io::write_locations_csv(out, field.locations.points(), field.z);
    json j{{"n", n},
           {"theta", params_json(spec.params)},
           {"seed", spec.seed},
           {"nb", common.nb},
           {"workers", common.workers},
           {"metric", "euclidean"},
           {"wall_seconds", seconds}};
    write_json(meta.empty() ? out + ".json" : meta, j);
    os << "wrote " << n << " rows to " << out << '\n';
    return 0;
  }
};

struct EstimateCmd {
  Common common;
  std::string data;
  std::string lower, upper, start;
  double xtol = 1e-5;
  std::size_t max_evals = 500;
  double nugget = 0.0;
  std::string out;

  void add_to(CLI::App& app) {
    common.add_to(app);
    app.add_option("--data", data, "Input CSV (x,y,z)")->required();
    app.add_option("--lower", lower, "Lower bounds v,r,s");
    app.add_option("--upper", upper, "Upper bounds v,r,s");
    app.add_option("--start", start, "Starting point v,r,s");
    app.add_option("--xtol", xtol, "Relative parameter tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-evals", max_evals, "Evaluation budget")->check(CLI::PositiveNumber);
    app.add_option("--nugget", nugget, "Fixed nugget");
    app.add_option("--out", out, "FitResult JSON (default: stdout)");
  }

  int operator()(std::ostream& os, std::ostream&) {
    auto ds = read_data(data, common.make_metric(), true);
    LikelihoodProblem problem{ds.sites, ds.z, common.nb, common.make_approx()};
    auto cfg = OptimizerConfig::defaults_for(problem.locations);
    auto assign = [](std::array<double, 3>& dst, const std::string& s, const char* what) {
      if (s.empty()) return false;
      const auto v = parse_triplet(s, what);
      std::copy(v.begin(), v.end(), dst.begin());
      return true;
    };
    const bool bounds_changed = assign(cfg.lower, lower, "--lower") | assign(cfg.upper, upper, "--upper");
    if (!assign(cfg.start, start, "--start") && bounds_changed) {
      for (std::size_t i = 0; i < 3; ++i) cfg.start[i] = std::sqrt(cfg.lower[i] * cfg.upper[i]);
    }
    cfg.xtol_rel = xtol;
    cfg.max_evals = max_evals;
    cfg.nugget = nugget;

    const auto fit = mle_fit(problem, cfg, common.exec());

    const double n = static_cast<double>(ds.z.size());
    double eval_seconds = 0.0;
    json trace = json::array();
    for (const auto& e : fit.trace) {
      eval_seconds += e.seconds;
      trace.push_back({{"theta", params_json(e.theta)},
                       {"loglik", std::isfinite(e.loglik) ? json(e.loglik) : json(nullptr)},
                       {"seconds", e.seconds}});
    }
    const double per_iter = eval_seconds / static_cast<double>(fit.trace.size());
    const double flops = cholesky_flops(n) + trsm_flops(n, 1);
    json j{{"theta_hat", params_json(fit.theta_hat)},
           {"loglik", fit.loglik},
           {"evaluations", fit.evaluations},
           {"wall_seconds", fit.wall_seconds},
           {"seconds_per_iteration", per_iter},
           {"gflops_per_iteration", flops / per_iter * 1e-9},
           {"n", ds.z.size()},
           {"nb", common.nb},
           {"workers", common.workers},
           {"approx", common.approx},
           {"trace", trace}};
    if (out.empty()) {
      os << j.dump(2) << '\n';
    } else {
      write_json(out, j);
    }
    return 0;
  }
};

struct PredictCmd {
  Common common;
  std::string obs, targets, theta_json, theta, out;
  double nugget = 0.0;
  bool with_variance = false;

  void add_to(CLI::App& app) {
    common.add_to(app);
    app.add_option("--obs", obs, "Observed CSV (x,y,z)")->required();
    app.add_option("--new", targets, "Target CSV (x,y[,z])")->required();
    app.add_option("--theta-json", theta_json, "JSON with theta_hat or theta");
    app.add_option("--theta", theta, "variance,range,smoothness");
    app.add_option("--nugget", nugget, "Nugget when --theta is given");
    app.add_flag("--with-variance", with_variance, "Also emit conditional variances");
    app.add_option("--out", out, "Predictions CSV (default: stdout)");
  }

  int operator()(std::ostream& os, std::ostream&) {
    if (theta_json.empty() == theta.empty()) {
      throw DomainError("predict needs exactly one of --theta-json or --theta");
    }
    MaternParams params;
    if (!theta_json.empty()) {
      params = read_theta_file(theta_json);
    } else {
      const auto t = parse_triplet(theta, "--theta");
      params = {t[0], t[1], t[2], nugget};
    }
    const auto metric = common.make_metric();
    auto observed = read_data(obs, metric, true);
    auto target = read_data(targets, metric, false);

    PredictOptions options{common.nb, common.make_approx(), with_variance, common.exec()};
    const auto t0 = std::chrono::steady_clock::now();
    const auto prediction =
        krige_predict({params, observed.sites, observed.z, target.sites}, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream file;
    std::ostream& dst = out.empty() ? os : (file.open(out), file);
    if (!dst) throw ParseError(0, "cannot write " + out);
    dst << (with_variance ? "x,y,z,variance\n" : "x,y,z\n");
    const auto pts = target.sites.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      dst << io::format_double(pts[i].c1) << ',' << io::format_double(pts[i].c2) << ','
          << io::format_double(prediction.mean[i]);
      if (with_variance) dst << ',' << io::format_double(prediction.variance[i]);
      dst << '\n';
    }
    if (!out.empty()) {
      const double n = static_cast<double>(observed.z.size());
      const double m = static_cast<double>(pts.size());
      const double flops = cholesky_flops(n) + 2 * trsm_flops(n, 1) + gemm_flops(m, 1, n);
      json j{{"m", pts.size()},
             {"n", observed.z.size()},
             {"wall_seconds", seconds},
             {"gflops", flops / seconds * 1e-9}};
      if (target.z.size() == pts.size()) j["mse"] = mse(prediction.mean, target.z);
      write_json(out + ".json", j);
    }
    return 0;
  }
};

struct CvCmd {
  Common common;
  std::string data, mode = "refit", theta_json, theta, out;
  double nugget = 0.0;
  std::size_t k = 10;
  std::optional<std::uint64_t> seed;
  std::size_t max_evals = 500;
  double xtol = 1e-5;

  void add_to(CLI::App& app) {
    common.add_to(app);
    app.add_option("--data", data, "Input CSV (x,y,z)")->required();
    app.add_option("--k", k, "Number of folds")->check(CLI::Range(std::size_t{2}, SIZE_MAX));
    app.add_option("--mode", mode, "refit | fixed")->check(CLI::IsMember({"refit", "fixed"}));
    app.add_option("--theta-json", theta_json, "Model for --mode fixed");
    app.add_option("--theta", theta, "variance,range,smoothness for --mode fixed");
    app.add_option("--nugget", nugget, "Nugget");
    app.add_option("--seed", seed, "Fold shuffle seed");
    app.add_option("--max-evals", max_evals, "Per-fold evaluation budget (refit)");
    app.add_option("--xtol", xtol, "Per-fold tolerance (refit)");
    app.add_option("--out", out, "CvReport JSON (default: stdout)");
  }

  int operator()(std::ostream& os, std::ostream& err) {
    auto ds = read_data(data, common.make_metric(), true);
    CvModel model = RefitEachFold{};
    if (mode == "fixed") {
      if (theta_json.empty() == theta.empty()) {
        throw DomainError("--mode fixed needs exactly one of --theta-json or --theta");
      }
      if (!theta_json.empty()) {
        model = read_theta_file(theta_json);
      } else {
        const auto t = parse_triplet(theta, "--theta");
        model = MaternParams{t[0], t[1], t[2], nugget};
      }
    } else {
      // Bounds come from each fold's training sites.
      OptimizerConfig cfg = OptimizerConfig::defaults_for(ds.sites);
      cfg.max_evals = max_evals;
      cfg.xtol_rel = xtol;
      cfg.nugget = nugget;
      model = RefitEachFold{cfg};
    }
    const auto used_seed = resolve_seed(seed, err);
    PredictOptions options{common.nb, common.make_approx(), false, common.exec()};
    const auto report = k_fold_cv(ds.sites, ds.z, k, model, used_seed, options);

    json folds = json::array();
    for (std::size_t f = 0; f < report.k; ++f) {
      folds.push_back({{"size", report.fold_sizes[f]},
                       {"mse", report.per_fold_mse[f]},
                       {"theta", params_json(report.fold_theta[f])}});
    }
    json j{{"k", report.k},
           {"mode", mode},
           {"seed", used_seed},
           {"approx", common.approx},
           {"per_fold_mse", report.per_fold_mse},
           {"mean_mse", report.mean_mse},
           {"seconds_per_prediction", report.seconds_per_prediction},
           {"folds", folds}};
    if (out.empty()) {
      os << j.dump(2) << '\n';
    } else {
      write_json(out, j);
    }
    return 0;
  }
};

struct BenchCmd {
  Common common;
  std::size_t n = 2048;
  std::vector<std::size_t> workers_list{1};
  std::string theta = "1,0.1,0.5";
  std::uint64_t seed = 1;
  std::size_t repeats = 1;
  std::string out;

  void add_to(CLI::App& app) {
    common.add_to(app, /*with_workers=*/false);
    app.add_option("--n", n, "Matrix order")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers_list, "Comma-separated worker counts")->delimiter(',');
    app.add_option("--theta", theta, "variance,range,smoothness");
    app.add_option("--seed", seed, "Location seed");
    app.add_option("--repeats", repeats, "Runs per worker count (best time kept)")
        ->check(CLI::PositiveNumber);
    app.add_option("--trace-dir", common.trace_dir, "Directory for per-run trace CSVs");
    app.add_option("--out", out, "Summary JSON (default: stdout)");
  }

  int operator()(std::ostream& os, std::ostream&) {
    const auto t = parse_triplet(theta, "--theta");
    const MaternParams params{t[0], t[1], t[2], 0.0};
    const auto sites = generate_locations(n, seed);
    const auto approx = common.make_approx();
    json runs = json::array();
    double base = 0.0;
    for (const auto w : workers_list) {
      if (w < 1) throw DomainError("--workers entries must be >= 1");
      double best = INFINITY;
      std::vector<sched::TraceEvent> best_trace;
      for (std::size_t r = 0; r < repeats; ++r) {
        auto sigma = covariance_tiles(sites, params, common.nb, approx, {w, nullptr});
        std::vector<sched::TraceEvent> trace;
        sched::TaskStream stream;
        submit_cholesky(stream, sigma);
        const auto t0 = std::chrono::steady_clock::now();
        sched::run(std::move(stream), {w, &trace});
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s < best) {
          best = s;
          best_trace = std::move(trace);
        }
      }
      if (base == 0.0) base = best;
      dump_trace(common.trace_dir, "trace_w" + std::to_string(w) + ".csv", best_trace);
      runs.push_back({{"workers", w},
                      {"seconds", best},
                      {"gflops", cholesky_flops(static_cast<double>(n)) / best * 1e-9},
                      {"speedup", base / best},
                      {"tasks", best_trace.size()}});
    }
    json j{{"n", n}, {"nb", common.nb}, {"approx", common.approx},
           {"kernels", std::string(kernels::active_kernels().name)}, {"runs", runs}};
    if (out.empty()) {
      os << j.dump(2) << '\n';
    } else {
      write_json(out, j);
    }
    return 0;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact Gaussian-process MLE, simulation and kriging on tile algorithms"};
  app.require_subcommand(1);

  SimulateCmd simulate;
  EstimateCmd estimate;
  PredictCmd predict;
  CvCmd cv;
  BenchCmd bench;
  simulate.add_to(*app.add_subcommand("simulate", "Generate a synthetic Matérn field"));
  estimate.add_to(*app.add_subcommand("estimate", "Maximum-likelihood fit"));
  predict.add_to(*app.add_subcommand("predict", "Kriging prediction at new sites"));
  cv.add_to(*app.add_subcommand("cv", "k-fold cross-validation"));
  bench.add_to(*app.add_subcommand("bench", "Tile Cholesky scalability benchmark"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "simulate") return simulate(out, err);
    if (name == "estimate") return estimate(out, err);
    if (name == "predict") return predict(out, err);
    if (name == "cv") return cv(out, err);
    return bench(out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace geostat::cli
