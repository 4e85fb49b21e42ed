#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace geostat {

struct BoxConstraints {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> start;
  double xtol_rel = 1e-5;
  std::size_t max_evals = 500;
};

struct OptimizeResult {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
};

/// Derivative-free maximization over a box: Nelder-Mead with every trial point
/// projected onto the box. After convergence each free axis is probed a small
/// step either side of the best point, and if a probe improves on it the
/// search restarts once from there.
/// Components with lower == upper are held fixed. Stops once every simplex
/// vertex is within xtol_rel (relative) of the best one in each component, or
/// after max_evals evaluations. The objective may return -infinity to reject a
/// point.
OptimizeResult maximize_in_box(const std::function<double(std::span<const double>)>& f,
                               const BoxConstraints& box);

}  // namespace geostat
