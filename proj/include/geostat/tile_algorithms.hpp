#pragma once

// Tile-level dense linear algebra. Each composition emits its kernel calls as
// tasks into a sequential task flow; the `submit_*` forms let callers fuse
// several compositions into one stream, the plain forms run immediately.

#include <span>

#include "geostat/kernels.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

using kernels::Trans;
using sched::ExecutionOptions;

// Per-tile kernels on whole tiles. Dimensions come from the tile shapes.

/// Throws NotPositiveDefinite with the local pivot index.
void potrf_tile(Index n, double* a, Index lda);
/// B <- B * L^-T (the Cholesky panel update).
void trsm_tile(Index m, Index n, const double* l, Index ldl, double* b, Index ldb);
/// Lower C -= A * A^T.
void syrk_tile(Index n, Index k, const double* a, Index lda, double* c, Index ldc);
/// C -= A * B^T.
void gemm_tile(Index m, Index n, Index k, const double* a, Index lda,
               const double* b, Index ldb, double* c, Index ldc);
/// B <- L * B.
void trmm_tile(Index m, Index n, const double* l, Index ldl, double* b, Index ldb);

// Stream builders.

/// Right-looking tile Cholesky of symmetric-lower storage, in place. Absent
/// tiles are treated as structural zeros and never touched; an update that
/// would fill an absent tile throws ShapeMismatch.
void submit_cholesky(sched::TaskStream& stream, TileMatrix& a);
/// B <- op(L)^-1 * B.
void submit_trsm(sched::TaskStream& stream, const TileMatrix& l, TileMatrix& b,
                 Trans trans = Trans::No);
/// B <- L * B.
void submit_trmm(sched::TaskStream& stream, const TileMatrix& l, TileMatrix& b);
/// C += A * B (A general storage).
void submit_gemm(sched::TaskStream& stream, const TileMatrix& a,
                 const TileMatrix& b, TileMatrix& c);

// Compositions.

/// In-place lower Cholesky factor. Requires every lower tile to be present.
/// Throws NotPositiveDefinite carrying the global pivot index.
void tile_cholesky(TileMatrix& a, const ExecutionOptions& options);
/// B <- op(L)^-1 * B.
void tile_trsm(const TileMatrix& l, TileMatrix& b, Trans trans,
               const ExecutionOptions& options);
/// B <- L * B.
void tile_trmm(const TileMatrix& l, TileMatrix& b, const ExecutionOptions& options);
/// A * B as a new general matrix with A's row blocking and B's column blocking.
TileMatrix tile_gemm(const TileMatrix& a, const TileMatrix& b,
                     const ExecutionOptions& options);
/// Solves A X = B in place of B; A is overwritten by its Cholesky factor.
void tile_posv(TileMatrix& a, TileMatrix& b, const ExecutionOptions& options);

/// log|A| = 2 * sum(log L_ii) from a Cholesky factor. Throws DomainError on a
/// non-positive diagonal entry.
double log_det_from_factor(const TileMatrix& l);

/// Sum of x_i * y_i over two conformal single-column tile vectors.
double tile_dot(const TileMatrix& x, const TileMatrix& y);

/// Dense column-major copy of the lower triangle of a factor, zeros above.
std::vector<double> lower_factor_dense(const TileMatrix& l);

}  // namespace geostat
