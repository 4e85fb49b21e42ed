#pragma once

// Per-tile dense kernels. Matrices are column-major with explicit leading
// dimensions, BLAS style. The data-parallel kernels (gemm, syrk, the
// right-side trsm used by the Cholesky panel, dot, and the exponential sums of
// the Bessel quadrature) exist as a scalar
// reference set and an AVX2+FMA set chosen at runtime; the remaining kernels
// are scalar only.

#include <optional>
#include <string_view>

#include "geostat/tile_matrix.hpp"

namespace geostat::kernels {

enum class Trans { No, Yes };

enum class Isa { Scalar, Avx2 };

struct KernelSet {
  Isa isa;
  std::string_view name;
  /// C += alpha * op(A) * op(B); C is m x n, op(A) m x k, op(B) k x n.
  void (*gemm)(Trans ta, Trans tb, Index m, Index n, Index k, double alpha,
               const double* a, Index lda, const double* b, Index ldb,
               double* c, Index ldc);
  /// Lower triangle of C (n x n) += alpha * A * A^T, A n x k.
  void (*syrk)(Index n, Index k, double alpha, const double* a, Index lda,
               double* c, Index ldc);
  /// B <- B * L^-T, B m x n, L n x n lower triangular.
  void (*trsm_right_lower_trans)(Index m, Index n, const double* l, Index ldl,
                                 double* b, Index ldb);
  double (*dot)(Index n, const double* x, const double* y);
  /// s0 = sum_k exp(-x g_k) w0_k and s1 = sum_k exp(-x g_k) w1_k, for
  /// x * g_k <= 700 (the Bessel quadrature sums).
  void (*exp_sums)(double x, Index count, const double* g, const double* w0,
                   const double* w1, double* s0, double* s1);
};

const KernelSet& scalar_kernels();
/// nullptr when the build or the host lacks AVX2+FMA.
const KernelSet* avx2_kernels();

bool isa_supported(Isa isa);
/// Kernels used by every tile algorithm. Defaults to the widest supported ISA,
/// or to GEOSTAT_ISA=scalar|avx2 when that variable is set.
const KernelSet& active_kernels();
/// Throws DomainError if the ISA is unavailable. Not thread-safe with
/// respect to running tile algorithms.
void set_active_isa(Isa isa);

/// In-place lower Cholesky of an n x n block; reads only the lower triangle.
/// Returns the 0-based index of the first non-positive pivot on failure.
std::optional<Index> potrf(Index n, double* a, Index lda);

/// B <- op(L)^-1 * B, L m x m lower triangular, B m x n.
void trsm_left_lower(Trans t, Index m, Index n, const double* l, Index ldl,
                     double* b, Index ldb);

/// B <- L * B, L m x m lower triangular, B m x n.
void trmm_left_lower(Index m, Index n, const double* l, Index ldl, double* b,
                     Index ldb);

namespace scalar {
void exp_sums(double x, Index count, const double* g, const double* w0,
              const double* w1, double* s0, double* s1);
void gemm(Trans ta, Trans tb, Index m, Index n, Index k, double alpha,
          const double* a, Index lda, const double* b, Index ldb, double* c,
          Index ldc);
void syrk(Index n, Index k, double alpha, const double* a, Index lda, double* c,
          Index ldc);
void trsm_right_lower_trans(Index m, Index n, const double* l, Index ldl,
                            double* b, Index ldb);
double dot(Index n, const double* x, const double* y);
}  // namespace scalar

#ifdef GEOSTAT_BUILD_AVX2
namespace avx2 {
void exp_sums(double x, Index count, const double* g, const double* w0,
              const double* w1, double* s0, double* s1);
void gemm(Trans ta, Trans tb, Index m, Index n, Index k, double alpha,
          const double* a, Index lda, const double* b, Index ldb, double* c,
          Index ldc);
void syrk(Index n, Index k, double alpha, const double* a, Index lda, double* c,
          Index ldc);
void trsm_right_lower_trans(Index m, Index n, const double* l, Index ldl,
                            double* b, Index ldb);
double dot(Index n, const double* x, const double* y);
}  // namespace avx2
#endif

}  // namespace geostat::kernels
