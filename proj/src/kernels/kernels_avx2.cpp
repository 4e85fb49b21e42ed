// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "geostat/kernels.hpp"

namespace geostat::kernels::avx2 {

namespace {

constexpr Index kMr = 8;  // rows per micro-tile (two __m256d)
constexpr Index kNr = 4;  // columns per micro-tile

// out[r + c * kMr] = sum_l A(r, l) * Bt(c, l) for an 8 x 4 micro-tile, where
// Bt(c, l) = b[c * b_col + l * b_step].
inline void micro_8x4(Index k, const double* a, Index lda, const double* b,
                      Index b_col, Index b_step, double* out) {
  __m256d c00 = _mm256_setzero_pd(), c10 = _mm256_setzero_pd();
  __m256d c01 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c02 = _mm256_setzero_pd(), c12 = _mm256_setzero_pd();
  __m256d c03 = _mm256_setzero_pd(), c13 = _mm256_setzero_pd();
  for (Index l = 0; l < k; ++l) {
    const double* al = a + l * lda;
    const __m256d a0 = _mm256_loadu_pd(al);
    const __m256d a1 = _mm256_loadu_pd(al + 4);
    const double* bl = b + l * b_step;
    __m256d bv = _mm256_broadcast_sd(bl);
    c00 = _mm256_fmadd_pd(a0, bv, c00);
    c10 = _mm256_fmadd_pd(a1, bv, c10);
    bv = _mm256_broadcast_sd(bl + b_col);
    c01 = _mm256_fmadd_pd(a0, bv, c01);
    c11 = _mm256_fmadd_pd(a1, bv, c11);
    bv = _mm256_broadcast_sd(bl + 2 * b_col);
    c02 = _mm256_fmadd_pd(a0, bv, c02);
    c12 = _mm256_fmadd_pd(a1, bv, c12);
    bv = _mm256_broadcast_sd(bl + 3 * b_col);
    c03 = _mm256_fmadd_pd(a0, bv, c03);
    c13 = _mm256_fmadd_pd(a1, bv, c13);
  }
  _mm256_storeu_pd(out + 0, c00);
  _mm256_storeu_pd(out + 4, c10);
  _mm256_storeu_pd(out + 8, c01);
  _mm256_storeu_pd(out + 12, c11);
  _mm256_storeu_pd(out + 16, c02);
  _mm256_storeu_pd(out + 20, c12);
  _mm256_storeu_pd(out + 24, c03);
  _mm256_storeu_pd(out + 28, c13);
}

// C(i0.., j0..) += alpha * acc over the full micro-tile.
inline void add_full(double alpha, const double* acc, double* c, Index ldc) {
  const __m256d va = _mm256_set1_pd(alpha);
  for (Index col = 0; col < kNr; ++col) {
    double* cc = c + col * ldc;
    _mm256_storeu_pd(cc, _mm256_fmadd_pd(va, _mm256_loadu_pd(acc + col * kMr),
                                         _mm256_loadu_pd(cc)));
    _mm256_storeu_pd(cc + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(acc + col * kMr + 4),
                                             _mm256_loadu_pd(cc + 4)));
  }
}

// Scalar edge: C(i, j) += alpha * sum_l A(i, l) * Bt(j, l) for a rectangle.
inline void edge(Index m, Index n, Index k, double alpha, const double* a,
                 Index lda, const double* b, Index b_col, Index b_step,
                 double* c, Index ldc, Index lower_from = -1) {
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (lower_from >= 0 && i + lower_from < j) continue;
      double sum = 0.0;
      for (Index l = 0; l < k; ++l) sum += a[i + l * lda] * b[j * b_col + l * b_step];
      c[i + j * ldc] += alpha * sum;
    }
  }
}

// e^a for a in [-708, 0]: a = n ln2 + r with |r| <= ln2 / 2, Taylor
// polynomial of degree 12 for e^r (truncation below 1e-16), then 2^n through
// the exponent field.
inline __m256d exp_nonpositive(__m256d a) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  a = _mm256_max_pd(a, _mm256_set1_pd(-708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(a, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, a);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double kInvFact[13] = {
      1.0, 1.0, 1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120, 1.0 / 720, 1.0 / 5040,
      1.0 / 40320, 1.0 / 362880, 1.0 / 3628800, 1.0 / 39916800, 1.0 / 479001600};
  __m256d p = _mm256_set1_pd(kInvFact[12]);
  for (int k = 11; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[k]));

  // n + 1023 sits in the low bits after adding 2^52 + 2^51 to the rounded n.
  const __m256d shifter = _mm256_set1_pd(6755399441055744.0);
  const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, shifter));
  const __m256i biased = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  return _mm256_mul_pd(p, _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52)));
}

}  // namespace

void exp_sums(double x, Index count, const double* g, const double* w0,
              const double* w1, double* s0, double* s1) {
  const __m256d neg_x = _mm256_set1_pd(-x);
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  Index k = 0;
  for (; k + 4 <= count; k += 4) {
    const __m256d e = exp_nonpositive(_mm256_mul_pd(neg_x, _mm256_loadu_pd(g + k)));
    a = _mm256_fmadd_pd(e, _mm256_loadu_pd(w0 + k), a);
    b = _mm256_fmadd_pd(e, _mm256_loadu_pd(w1 + k), b);
  }
  if (k < count) {
    alignas(32) double gt[4] = {0, 0, 0, 0}, t0[4] = {0, 0, 0, 0}, t1[4] = {0, 0, 0, 0};
    for (Index i = 0; k + i < count; ++i) {
      gt[i] = g[k + i];
      t0[i] = w0[k + i];
      t1[i] = w1[k + i];
    }
    const __m256d e = exp_nonpositive(_mm256_mul_pd(neg_x, _mm256_load_pd(gt)));
    a = _mm256_fmadd_pd(e, _mm256_load_pd(t0), a);
    b = _mm256_fmadd_pd(e, _mm256_load_pd(t1), b);
  }
  alignas(32) double la[4], lb[4];
  _mm256_store_pd(la, a);
  _mm256_store_pd(lb, b);
  *s0 = (la[0] + la[1]) + (la[2] + la[3]);
  *s1 = (lb[0] + lb[1]) + (lb[2] + lb[3]);
}

void gemm(Trans ta, Trans tb, Index m, Index n, Index k, double alpha,
          const double* a, Index lda, const double* b, Index ldb, double* c,
          Index ldc) {
  if (ta == Trans::Yes) {
    scalar::gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, c, ldc);
    return;
  }
  // op(B)(l, j) = b[j * b_col + l * b_step]
  const Index b_col = tb == Trans::No ? ldb : 1;
  const Index b_step = tb == Trans::No ? 1 : ldb;
  const Index m_full = m - m % kMr;
  const Index n_full = n - n % kNr;
  alignas(32) double acc[kMr * kNr];
  for (Index j = 0; j < n_full; j += kNr) {
    for (Index i = 0; i < m_full; i += kMr) {
      micro_8x4(k, a + i, lda, b + j * b_col, b_col, b_step, acc);
      add_full(alpha, acc, c + i + j * ldc, ldc);
    }
    if (m_full < m) {
      edge(m - m_full, kNr, k, alpha, a + m_full, lda, b + j * b_col, b_col,
           b_step, c + m_full + j * ldc, ldc);
    }
  }
  if (n_full < n) {
    edge(m, n - n_full, k, alpha, a, lda, b + n_full * b_col, b_col, b_step,
         c + n_full * ldc, ldc);
  }
}

void syrk(Index n, Index k, double alpha, const double* a, Index lda, double* c,
          Index ldc) {
  const Index n_full4 = n - n % kNr;
  alignas(32) double acc[kMr * kNr];
  for (Index j = 0; j < n_full4; j += kNr) {
    Index i = j;
    for (; i + kMr <= n; i += kMr) {
      micro_8x4(k, a + i, lda, a + j, 1, lda, acc);
      if (i >= j + kNr) {
        add_full(alpha, acc, c + i + j * ldc, ldc);
      } else {
        for (Index col = 0; col < kNr; ++col) {
          for (Index row = 0; row < kMr; ++row) {
            if (i + row >= j + col) {
              c[(i + row) + (j + col) * ldc] += alpha * acc[row + col * kMr];
            }
          }
        }
      }
    }
    if (i < n) {
      edge(n - i, kNr, k, alpha, a + i, lda, a + j, 1, lda, c + i + j * ldc, ldc,
           i - j);
    }
  }
  if (n_full4 < n) {
    const Index j = n_full4;
    edge(n - j, n - j, k, alpha, a + j, lda, a + j, 1, lda, c + j + j * ldc, ldc, 0);
  }
}

void trsm_right_lower_trans(Index m, Index n, const double* l, Index ldl,
                            double* b, Index ldb) {
  const Index m_full = m - m % kMr;
  for (Index i = 0; i < m_full; i += kMr) {
    for (Index j = 0; j < n; ++j) {
      double* bj = b + i + j * ldb;
      __m256d x0 = _mm256_loadu_pd(bj);
      __m256d x1 = _mm256_loadu_pd(bj + 4);
      for (Index p = 0; p < j; ++p) {
        const __m256d s = _mm256_set1_pd(l[j + p * ldl]);
        const double* bp = b + i + p * ldb;
        x0 = _mm256_fnmadd_pd(_mm256_loadu_pd(bp), s, x0);
        x1 = _mm256_fnmadd_pd(_mm256_loadu_pd(bp + 4), s, x1);
      }
      const __m256d inv = _mm256_set1_pd(1.0 / l[j + j * ldl]);
      _mm256_storeu_pd(bj, _mm256_mul_pd(x0, inv));
      _mm256_storeu_pd(bj + 4, _mm256_mul_pd(x1, inv));
    }
  }
  if (m_full < m) {
    scalar::trsm_right_lower_trans(m - m_full, n, l, ldl, b + m_full, ldb);
  }
}

double dot(Index n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  Index i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace geostat::kernels::avx2
