#pragma once

#include "geostat/bessel.hpp"
#include "geostat/geometry.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

/// Matérn parameters: variance, range, smoothness, plus an optional nugget
/// added to the diagonal of square covariance matrices.
struct MaternParams {
  double variance = 1.0;
  double range = 0.1;
  double smoothness = 0.5;
  double nugget = 0.0;

  /// Throws DomainError unless variance, range, smoothness > 0 and nugget >= 0,
  /// all finite.
  void validate() const;

  friend bool operator==(const MaternParams&, const MaternParams&) = default;
};

/// Matérn covariance at a fixed parameter vector, with the smoothness-dependent
/// constants computed once:
///   C(r) = variance * 2^(1-nu) / Gamma(nu) * (r/range)^nu * K_nu(r/range),
/// and C(0) = variance + nugget.
class MaternKernel {
 public:
  explicit MaternKernel(const MaternParams& params);

  const MaternParams& params() const noexcept { return params_; }

  /// Covariance at distance r; r = 0 gives variance + nugget.
  double operator()(double r) const;

  /// Cross-covariance between an observation and a separate (target) site:
  /// like operator() but r = 0 gives the variance alone, since the nugget is
  /// the observations' own micro-scale noise.
  double cross(double r) const;

  /// Value used on the diagonal of a square covariance matrix.
  double diagonal() const noexcept { return params_.variance + params_.nugget; }

 private:
  MaternParams params_;
  BesselK bessel_;
  double log_scale_;  // log(variance) + (1 - nu) log 2 - lgamma(nu)
  double inv_range_;
};

double matern(double r, const MaternParams& params);

/// Entry-wise Matérn covariance of a distance matrix, tiled with tile size nb.
/// A symmetric distance matrix with zero diagonal yields symmetric-lower storage with the nugget on the
/// diagonal; anything else yields general storage and no nugget.
TileMatrix gen_cov_matrix(const DistanceMatrix& d, const MaternParams& params,
                          std::ptrdiff_t nb);

/// Emits one task per present tile of `out` filling it with covariances between
/// `row_sites` and `col_sites`. With symmetric-lower storage the two sets are
/// the same and the nugget lands on the diagonal; with general storage every
/// entry is a cross-covariance.
void submit_cov_generation(sched::TaskStream& stream, TileMatrix& out,
                           const LocationSet& row_sites,
                           const LocationSet& col_sites,
                           const MaternKernel& kernel);

}  // namespace geostat
