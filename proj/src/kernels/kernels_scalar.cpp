#include <cmath>

#include "geostat/kernels.hpp"

namespace geostat::kernels {

namespace scalar {

void gemm(Trans ta, Trans tb, Index m, Index n, Index k, double alpha,
          const double* a, Index lda, const double* b, Index ldb, double* c,
          Index ldc) {
  auto b_at = [&](Index l, Index j) {
    return tb == Trans::No ? b[l + j * ldb] : b[j + l * ldb];
  };
  if (ta == Trans::No) {
    for (Index j = 0; j < n; ++j) {
      double* cj = c + j * ldc;
      for (Index l = 0; l < k; ++l) {
        const double s = alpha * b_at(l, j);
        const double* al = a + l * lda;
        for (Index i = 0; i < m; ++i) cj[i] += al[i] * s;
      }
    }
  } else {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < m; ++i) {
        const double* ai = a + i * lda;
        double sum = 0.0;
        for (Index l = 0; l < k; ++l) sum += ai[l] * b_at(l, j);
        c[i + j * ldc] += alpha * sum;
      }
    }
  }
}

void syrk(Index n, Index k, double alpha, const double* a, Index lda, double* c,
          Index ldc) {
  for (Index j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    for (Index l = 0; l < k; ++l) {
      const double* al = a + l * lda;
      const double s = alpha * al[j];
      for (Index i = j; i < n; ++i) cj[i] += al[i] * s;
    }
  }
}

void trsm_right_lower_trans(Index m, Index n, const double* l, Index ldl,
                            double* b, Index ldb) {
  for (Index j = 0; j < n; ++j) {
    double* bj = b + j * ldb;
    for (Index p = 0; p < j; ++p) {
      const double s = l[j + p * ldl];
      const double* bp = b + p * ldb;
      for (Index i = 0; i < m; ++i) bj[i] -= bp[i] * s;
    }
    const double inv = 1.0 / l[j + j * ldl];
    for (Index i = 0; i < m; ++i) bj[i] *= inv;
  }
}

double dot(Index n, const double* x, const double* y) {
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void exp_sums(double x, Index count, const double* g, const double* w0,
              const double* w1, double* s0, double* s1) {
  double a = 0.0, b = 0.0;
  for (Index k = 0; k < count; ++k) {
    const double e = std::exp(-x * g[k]);
    a += e * w0[k];
    b += e * w1[k];
  }
  *s0 = a;
  *s1 = b;
}

}  // namespace scalar

std::optional<Index> potrf(Index n, double* a, Index lda) {
  for (Index j = 0; j < n; ++j) {
    double* aj = a + j * lda;
    if (!(aj[j] > 0.0) || !std::isfinite(aj[j])) return j;
    const double d = std::sqrt(aj[j]);
    aj[j] = d;
    const double inv = 1.0 / d;
    for (Index i = j + 1; i < n; ++i) aj[i] *= inv;
    for (Index p = j + 1; p < n; ++p) {
      double* ap = a + p * lda;
      const double s = aj[p];
      for (Index i = p; i < n; ++i) ap[i] -= aj[i] * s;
    }
  }
  return std::nullopt;
}

void trsm_left_lower(Trans t, Index m, Index n, const double* l, Index ldl,
                     double* b, Index ldb) {
  for (Index c = 0; c < n; ++c) {
    double* bc = b + c * ldb;
    if (t == Trans::No) {
      for (Index j = 0; j < m; ++j) {
        const double* lj = l + j * ldl;
        const double x = bc[j] / lj[j];
        bc[j] = x;
        for (Index i = j + 1; i < m; ++i) bc[i] -= lj[i] * x;
      }
    } else {
      for (Index j = m - 1; j >= 0; --j) {
        const double* lj = l + j * ldl;
        double sum = bc[j];
        for (Index i = j + 1; i < m; ++i) sum -= lj[i] * bc[i];
        bc[j] = sum / lj[j];
      }
    }
  }
}

void trmm_left_lower(Index m, Index n, const double* l, Index ldl, double* b,
                     Index ldb) {
  for (Index c = 0; c < n; ++c) {
    double* bc = b + c * ldb;
    for (Index i = m - 1; i >= 0; --i) {
      double sum = 0.0;
      for (Index j = 0; j <= i; ++j) sum += l[i + j * ldl] * bc[j];
      bc[i] = sum;
    }
  }
}

}  // namespace geostat::kernels
