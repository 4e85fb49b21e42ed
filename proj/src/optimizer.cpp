#include "geostat/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geostat/errors.hpp"

namespace geostat {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kInitialStep = 0.1;  // fraction of the box width
constexpr double kProbeStep = 1e-3;   // fraction of the box width

struct Vertex {
  std::vector<double> x;  // free components only
  double cost;            // -f, +inf when rejected
};

class Search {
 public:
  Search(const std::function<double(std::span<const double>)>& f, const BoxConstraints& box)
      : f_(f), box_(box), full_(box.start) {
    for (std::size_t i = 0; i < box.lower.size(); ++i) {
      if (box.lower[i] < box.upper[i]) free_.push_back(i);
    }
    best_.x = box.start;
    best_.cost = std::numeric_limits<double>::infinity();
  }

  OptimizeResult run() {
    if (free_.empty()) {
      evaluate_full(box_.start);
      return result();
    }
    nelder_mead(pick(box_.start), kInitialStep);
    // A projected simplex can collapse onto a face of the box. Probing each
    // free axis around the best point detects that, and one restart from the
    // improved point recovers the lost directions.
    if (probe_improves()) nelder_mead(pick(best_.x), 0.5 * kInitialStep);
    return result();
  }

 private:
  bool exhausted() const { return evals_ >= box_.max_evals; }

  bool probe_improves() {
    const auto centre = best_;
    for (auto i : free_) {
      const double delta = kProbeStep * (box_.upper[i] - box_.lower[i]);
      for (const double sign : {1.0, -1.0}) {
        if (exhausted()) return false;
        auto x = centre.x;
        x[i] = std::clamp(x[i] + sign * delta, box_.lower[i], box_.upper[i]);
        if (x[i] == centre.x[i]) continue;
        if (evaluate_full(x) < centre.cost) return !exhausted();
      }
    }
    return false;
  }

  std::vector<double> pick(const std::vector<double>& full) const {
    std::vector<double> x;
    for (auto i : free_) x.push_back(full[i]);
    return x;
  }

  void project(std::vector<double>& x) const {
    for (std::size_t d = 0; d < free_.size(); ++d) {
      x[d] = std::clamp(x[d], box_.lower[free_[d]], box_.upper[free_[d]]);
    }
  }

  double evaluate_full(const std::vector<double>& full) {
    ++evals_;
    double value = f_(full);
    if (std::isnan(value)) value = -std::numeric_limits<double>::infinity();
    const double cost = -value;
    if (cost < best_.cost) best_ = {full, cost};
    return cost;
  }

  double evaluate(const std::vector<double>& x) {
    for (std::size_t d = 0; d < free_.size(); ++d) full_[free_[d]] = x[d];
    return evaluate_full(full_);
  }

  bool converged(const std::vector<Vertex>& simplex) const {
    const auto& b = simplex.front().x;
    for (std::size_t v = 1; v < simplex.size(); ++v) {
      for (std::size_t d = 0; d < b.size(); ++d) {
        const double scale = std::max(std::abs(b[d]), std::numeric_limits<double>::min());
        if (std::abs(simplex[v].x[d] - b[d]) > box_.xtol_rel * scale) return false;
      }
    }
    return true;
  }

  void nelder_mead(const std::vector<double>& start, double step) {
    const std::size_t dim = start.size();
    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    if (exhausted()) return;
    simplex.push_back({start, evaluate(start)});
    for (std::size_t d = 0; d < dim && !exhausted(); ++d) {
      auto x = start;
      const std::size_t i = free_[d];
      const double h = step * (box_.upper[i] - box_.lower[i]);
      x[d] = x[d] + h <= box_.upper[i] ? x[d] + h : x[d] - h;
      project(x);
      simplex.push_back({x, evaluate(x)});
    }
    if (simplex.size() < dim + 1) return;

    auto by_cost = [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; };
    while (!exhausted()) {
      std::stable_sort(simplex.begin(), simplex.end(), by_cost);
      if (converged(simplex)) return;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < dim; ++v) {
        for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
      }
      for (auto& c : centroid) c /= static_cast<double>(dim);

      auto& worst = simplex.back();
      auto along = [&](double t, const std::vector<double>& toward) {
        std::vector<double> x(dim);
        for (std::size_t d = 0; d < dim; ++d) x[d] = centroid[d] + t * (toward[d] - centroid[d]);
        project(x);
        return x;
      };

      auto reflected = along(-kReflect, worst.x);
      const double fr = evaluate(reflected);
      if (fr < simplex.front().cost) {
        if (exhausted()) {
          worst = {reflected, fr};
          continue;
        }
        auto expanded = along(kExpand, reflected);
        const double fe = evaluate(expanded);
        worst = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
        continue;
      }
      if (fr < simplex[dim - 1].cost) {
        worst = {reflected, fr};
        continue;
      }
      if (exhausted()) return;
      const bool outside = fr < worst.cost;
      auto contracted = along(kContract, outside ? reflected : worst.x);
      const double fc = evaluate(contracted);
      if (fc < std::min(fr, worst.cost)) {
        worst = {contracted, fc};
        continue;
      }
      for (std::size_t v = 1; v <= dim && !exhausted(); ++v) {
        for (std::size_t d = 0; d < dim; ++d) {
          simplex[v].x[d] = simplex[0].x[d] + kShrink * (simplex[v].x[d] - simplex[0].x[d]);
        }
        simplex[v].cost = evaluate(simplex[v].x);
      }
    }
  }

  OptimizeResult result() const {
    return {best_.x, -best_.cost, evals_};
  }

  const std::function<double(std::span<const double>)>& f_;
  const BoxConstraints& box_;
  std::vector<std::size_t> free_;
  std::vector<double> full_;
  Vertex best_;
  std::size_t evals_ = 0;
};

}  // namespace

OptimizeResult maximize_in_box(const std::function<double(std::span<const double>)>& f,
                               const BoxConstraints& box) {
  const auto dim = box.lower.size();
  if (box.upper.size() != dim || box.start.size() != dim) {
    throw ShapeMismatch("maximize_in_box: bound and start sizes differ");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(box.lower[i] <= box.upper[i]) || box.start[i] < box.lower[i] ||
        box.start[i] > box.upper[i]) {
      throw DomainError("maximize_in_box: start must lie within lower <= upper");
    }
  }
  if (box.max_evals < 1) throw DomainError("maximize_in_box: max_evals must be >= 1");
  if (!(box.xtol_rel > 0.0)) throw DomainError("maximize_in_box: xtol_rel must be positive");
  return Search(f, box).run();
}

}  // namespace geostat
