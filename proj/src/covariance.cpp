#include "geostat/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geostat/errors.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

void MaternParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(variance) || !positive(range) || !positive(smoothness)) {
    throw DomainError("Matérn variance, range and smoothness must be positive");
  }
  if (!(nugget >= 0.0) || !std::isfinite(nugget)) {
    throw DomainError("Matérn nugget must be non-negative");
  }
}

MaternKernel::MaternKernel(const MaternParams& params)
    : params_((params.validate(), params)),
      bessel_(params.smoothness),
      log_scale_(std::log(params.variance) +
                 (1.0 - params.smoothness) * std::numbers::ln2 -
                 std::lgamma(params.smoothness)),
      inv_range_(1.0 / params.range) {}

double MaternKernel::operator()(double r) const {
  if (r <= 0.0) return diagonal();
  const double x = r * inv_range_;
  const double log_x = std::log(x);
  // Combining the powers in one exponent avoids overflow in x^nu and, past
  // the series range, underflow in K_nu.
  const double log_front = log_scale_ + params_.smoothness * log_x;
  const double value =
      x <= BesselK::kSeriesLimit
          ? std::exp(log_front) * bessel_.series(x, log_x)
          : std::exp(log_front - x) * bessel_.scaled_large(x);
  return std::min(value, params_.variance);
}

double MaternKernel::cross(double r) const {
  return r <= 0.0 ? params_.variance : (*this)(r);
}

double matern(double r, const MaternParams& params) {
  return MaternKernel(params)(r);
}

TileMatrix gen_cov_matrix(const DistanceMatrix& d, const MaternParams& params,
                          std::ptrdiff_t nb) {
  const MaternKernel kernel(params);
  const auto rows = static_cast<std::ptrdiff_t>(d.rows);
  const auto cols = static_cast<std::ptrdiff_t>(d.cols);
  bool square = rows == cols;
  for (std::size_t i = 0; square && i < d.rows; ++i) {
    if (d(i, i) != 0.0) square = false;
    for (std::size_t j = 0; square && j < i; ++j) square = d(i, j) == d(j, i);
  }
  TileMatrix out(rows, cols, nb,
                 square ? Structure::SymmetricLower : Structure::General);
  for (std::ptrdiff_t tj = 0; tj < out.tile_cols(); ++tj) {
    for (std::ptrdiff_t ti = square ? tj : 0; ti < out.tile_rows(); ++ti) {
      double* tile = out.tile(ti, tj);
      const auto h = out.tile_height(ti);
      const auto w = out.tile_width(tj);
      for (std::ptrdiff_t c = 0; c < w; ++c) {
        for (std::ptrdiff_t r = 0; r < h; ++r) {
          const auto gi = static_cast<std::size_t>(ti * nb + r);
          const auto gj = static_cast<std::size_t>(tj * nb + c);
          tile[r + c * h] = (square && gi == gj)
                                ? kernel.diagonal()
                                : kernel.cross(d(gi, gj));
        }
      }
    }
  }
  return out;
}

void submit_cov_generation(sched::TaskStream& stream, TileMatrix& out,
                           const LocationSet& row_sites,
                           const LocationSet& col_sites,
                           const MaternKernel& kernel) {
  if (static_cast<std::ptrdiff_t>(row_sites.size()) != out.rows() ||
      static_cast<std::ptrdiff_t>(col_sites.size()) != out.cols() ||
      !(row_sites.metric() == col_sites.metric())) {
    throw ShapeMismatch("covariance generation: sites do not match the matrix");
  }
  const bool symmetric = out.structure() == Structure::SymmetricLower;
  const auto nb = out.nb();
  for (std::ptrdiff_t tj = 0; tj < out.tile_cols(); ++tj) {
    for (std::ptrdiff_t ti = symmetric ? tj : 0; ti < out.tile_rows(); ++ti) {
      double* tile = out.tile(ti, tj);
      if (!tile) continue;
      const auto h = out.tile_height(ti);
      const auto w = out.tile_width(tj);
      const bool diagonal_tile = symmetric && ti == tj;
      const Location* rows = row_sites.points().data() + ti * nb;
      const Location* cols = col_sites.points().data() + tj * nb;
      const Metric metric = row_sites.metric();
      const MaternKernel* k = &kernel;
      stream.submit("dcmg", {}, {out.tile_id(ti, tj)}, [=] {
        for (std::ptrdiff_t c = 0; c < w; ++c) {
          for (std::ptrdiff_t r = diagonal_tile ? c : 0; r < h; ++r) {
            tile[r + c * h] = (diagonal_tile && r == c)
                                  ? k->diagonal()
                                  : k->cross(metric.distance(rows[r], cols[c]));
          }
        }
      });
    }
  }
}

}  // namespace geostat
