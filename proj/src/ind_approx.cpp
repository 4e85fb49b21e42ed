#include "geostat/ind_approx.hpp"

#include "geostat/errors.hpp"
#include "geostat/tile_algorithms.hpp"

namespace geostat {

void SuperTileConfig::validate() const {
  if (size < 1) throw DomainError("super tile size must be at least 1");
}

TileMatrix ind_mask(const TileMatrix& a, const SuperTileConfig& config) {
  config.validate();
  if (a.rows() != a.cols()) throw ShapeMismatch("ind_mask: matrix is not square");
  TileMatrix out(a);
  for (Index j = 0; j < out.tile_cols(); ++j) {
    for (Index i = 0; i < out.tile_rows(); ++i) {
      if (!in_super_tile(i, j, config.size)) out.drop_tile(i, j);
    }
  }
  return out;
}

void ind_cholesky(TileMatrix& a, const SuperTileConfig& config,
                  const sched::ExecutionOptions& exec) {
  config.validate();
  if (a.structure() != Structure::SymmetricLower) {
    throw ShapeMismatch("ind_cholesky: expected symmetric-lower storage");
  }
  for (Index j = 0; j < a.tile_cols(); ++j) {
    for (Index i = j; i < a.tile_rows(); ++i) {
      const bool inside = in_super_tile(i, j, config.size);
      if (!inside && a.has_tile(i, j)) {
        throw ShapeMismatch("ind_cholesky: tile outside the diagonal super tiles");
      }
      if (inside && !a.has_tile(i, j)) a.ensure_tile(i, j);
    }
  }
  sched::TaskStream stream;
  submit_cholesky(stream, a);
  sched::run(std::move(stream), exec);
}

double ind_log_likelihood(const LikelihoodProblem& problem, const SuperTileConfig& config,
                          const MaternParams& theta, const sched::ExecutionOptions& exec) {
  config.validate();
  LikelihoodProblem masked = problem;
  masked.approx = Approximation::independent(config.size);
  return log_likelihood(masked, theta, exec);
}

}  // namespace geostat
