#pragma once

#include "geostat/likelihood.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

/// Edge length, in tiles, of the diagonal super tiles kept by the
/// independent-blocks approximation.
struct SuperTileConfig {
  Index size = 1;

  void validate() const;
};

/// True when tile (i, j) lies inside a diagonal super tile.
inline bool in_super_tile(Index i, Index j, Index s) { return i / s == j / s; }

/// Copy of a square tile matrix with every tile outside the diagonal super
/// tiles removed (structural zero). Idempotent.
TileMatrix ind_mask(const TileMatrix& a, const SuperTileConfig& config);

/// Cholesky of a block-diagonal (masked) symmetric matrix that schedules no
/// kernel on a zero tile. Throws ShapeMismatch if a tile outside the super
/// tiles is present, NotPositiveDefinite with the global pivot.
void ind_cholesky(TileMatrix& a, const SuperTileConfig& config,
                  const sched::ExecutionOptions& exec);

/// log_likelihood under the IND(s) model, whatever approximation `problem`
/// itself carries.
double ind_log_likelihood(const LikelihoodProblem& problem, const SuperTileConfig& config,
                          const MaternParams& theta, const sched::ExecutionOptions& exec);

}  // namespace geostat
