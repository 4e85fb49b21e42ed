#include "geostat/tile_algorithms.hpp"

#include <cmath>
#include <string>

#include "geostat/errors.hpp"

namespace geostat {

namespace {

const kernels::KernelSet& ks() { return kernels::active_kernels(); }

void require_symmetric(const TileMatrix& a, const char* what) {
  if (a.structure() != Structure::SymmetricLower) {
    throw ShapeMismatch(std::string(what) + ": expected symmetric-lower storage");
  }
}

void require_conformal_rows(const TileMatrix& l, const TileMatrix& b, const char* what) {
  if (l.rows() != b.rows() || l.nb() != b.nb()) {
    throw ShapeMismatch(std::string(what) + ": operands are not conformal");
  }
}

}  // namespace

void potrf_tile(Index n, double* a, Index lda) {
  if (auto pivot = kernels::potrf(n, a, lda)) {
    throw NotPositiveDefinite(static_cast<std::size_t>(*pivot));
  }
}

void trsm_tile(Index m, Index n, const double* l, Index ldl, double* b, Index ldb) {
  ks().trsm_right_lower_trans(m, n, l, ldl, b, ldb);
}

void syrk_tile(Index n, Index k, const double* a, Index lda, double* c, Index ldc) {
  ks().syrk(n, k, -1.0, a, lda, c, ldc);
}

void gemm_tile(Index m, Index n, Index k, const double* a, Index lda,
               const double* b, Index ldb, double* c, Index ldc) {
  ks().gemm(Trans::No, Trans::Yes, m, n, k, -1.0, a, lda, b, ldb, c, ldc);
}

void trmm_tile(Index m, Index n, const double* l, Index ldl, double* b, Index ldb) {
  kernels::trmm_left_lower(m, n, l, ldl, b, ldb);
}

void submit_cholesky(sched::TaskStream& stream, TileMatrix& a) {
  require_symmetric(a, "cholesky");
  const Index p = a.tile_rows();
  const Index nb = a.nb();
  for (Index k = 0; k < p; ++k) {
    double* akk = a.tile(k, k);
    if (!akk) throw ShapeMismatch("cholesky: diagonal tile is absent");
    const Index hk = a.tile_height(k);
    stream.submit("potrf", {}, {a.tile_id(k, k)}, [=] {
      if (auto pivot = kernels::potrf(hk, akk, hk)) {
        throw NotPositiveDefinite(static_cast<std::size_t>(k * nb + *pivot));
      }
    });
    for (Index i = k + 1; i < p; ++i) {
      double* aik = a.tile(i, k);
      if (!aik) continue;
      const Index hi = a.tile_height(i);
      stream.submit("trsm", {a.tile_id(k, k)}, {a.tile_id(i, k)},
                    [=] { trsm_tile(hi, hk, akk, hk, aik, hi); });
    }
    for (Index j = k + 1; j < p; ++j) {
      const double* ajk = a.tile(j, k);
      if (!ajk) continue;
      const Index hj = a.tile_height(j);
      double* ajj = a.tile(j, j);
      stream.submit("syrk", {a.tile_id(j, k)}, {a.tile_id(j, j)},
                    [=] { syrk_tile(hj, hk, ajk, hj, ajj, hj); });
      for (Index i = j + 1; i < p; ++i) {
        const double* aik = a.tile(i, k);
        if (!aik) continue;
        double* aij = a.tile(i, j);
        if (!aij) throw ShapeMismatch("cholesky: update would fill an absent tile");
        const Index hi = a.tile_height(i);
        stream.submit("gemm", {a.tile_id(i, k), a.tile_id(j, k)}, {a.tile_id(i, j)},
                      [=] { gemm_tile(hi, hj, hk, aik, hi, ajk, hj, aij, hi); });
      }
    }
  }
}

void submit_trsm(sched::TaskStream& stream, const TileMatrix& l, TileMatrix& b,
                 Trans trans) {
  require_conformal_rows(l, b, "trsm");
  const Index p = l.tile_rows();
  for (Index step = 0; step < p; ++step) {
    const Index k = trans == Trans::No ? step : p - 1 - step;
    const double* lkk = l.tile(k, k);
    if (!lkk) throw ShapeMismatch("trsm: diagonal tile is absent");
    const Index hk = l.tile_height(k);
    for (Index c = 0; c < b.tile_cols(); ++c) {
      double* bkc = b.tile(k, c);
      const Index w = b.tile_width(c);
      stream.submit("trsm", {l.tile_id(k, k)}, {b.tile_id(k, c)}, [=] {
        kernels::trsm_left_lower(trans, hk, w, lkk, hk, bkc, hk);
      });
      if (trans == Trans::No) {
        for (Index i = k + 1; i < p; ++i) {
          const double* lik = l.tile(i, k);
          if (!lik) continue;
          double* bic = b.tile(i, c);
          const Index hi = l.tile_height(i);
          stream.submit("gemm", {l.tile_id(i, k), b.tile_id(k, c)}, {b.tile_id(i, c)}, [=] {
            ks().gemm(Trans::No, Trans::No, hi, w, hk, -1.0, lik, hi, bkc, hk, bic, hi);
          });
        }
      } else {
        for (Index i = 0; i < k; ++i) {
          const double* lki = l.tile(k, i);
          if (!lki) continue;
          double* bic = b.tile(i, c);
          const Index hi = l.tile_height(i);
          stream.submit("gemm", {l.tile_id(k, i), b.tile_id(k, c)}, {b.tile_id(i, c)}, [=] {
            ks().gemm(Trans::Yes, Trans::No, hi, w, hk, -1.0, lki, hk, bkc, hk, bic, hi);
          });
        }
      }
    }
  }
}

void submit_trmm(sched::TaskStream& stream, const TileMatrix& l, TileMatrix& b) {
  require_conformal_rows(l, b, "trmm");
  const Index p = l.tile_rows();
  for (Index i = p - 1; i >= 0; --i) {
    const double* lii = l.tile(i, i);
    if (!lii) throw ShapeMismatch("trmm: diagonal tile is absent");
    const Index hi = l.tile_height(i);
    for (Index c = 0; c < b.tile_cols(); ++c) {
      double* bic = b.tile(i, c);
      const Index w = b.tile_width(c);
      stream.submit("trmm", {l.tile_id(i, i)}, {b.tile_id(i, c)},
                    [=] { trmm_tile(hi, w, lii, hi, bic, hi); });
      for (Index k = 0; k < i; ++k) {
        const double* lik = l.tile(i, k);
        if (!lik) continue;
        const double* bkc = b.tile(k, c);
        const Index hk = l.tile_height(k);
        stream.submit("gemm", {l.tile_id(i, k), b.tile_id(k, c)}, {b.tile_id(i, c)}, [=] {
          ks().gemm(Trans::No, Trans::No, hi, w, hk, 1.0, lik, hi, bkc, hk, bic, hi);
        });
      }
    }
  }
}

void submit_gemm(sched::TaskStream& stream, const TileMatrix& a, const TileMatrix& b,
                 TileMatrix& c) {
  if (a.structure() != Structure::General) {
    throw ShapeMismatch("gemm: left operand must use general storage");
  }
  if (a.cols() != b.rows() || a.nb() != b.nb() || c.rows() != a.rows() ||
      c.cols() != b.cols() || c.nb() != a.nb()) {
    throw ShapeMismatch("gemm: operands are not conformal");
  }
  for (Index i = 0; i < c.tile_rows(); ++i) {
    const Index hi = c.tile_height(i);
    for (Index j = 0; j < c.tile_cols(); ++j) {
      const Index w = c.tile_width(j);
      double* cij = c.ensure_tile(i, j);
      for (Index l = 0; l < a.tile_cols(); ++l) {
        const double* ail = a.tile(i, l);
        const double* blj = b.tile(l, j);
        if (!ail || !blj) continue;
        const Index hl = b.tile_height(l);
        stream.submit("gemm", {a.tile_id(i, l), b.tile_id(l, j)}, {c.tile_id(i, j)}, [=] {
          ks().gemm(Trans::No, Trans::No, hi, w, hl, 1.0, ail, hi, blj, hl, cij, hi);
        });
      }
    }
  }
}

void tile_cholesky(TileMatrix& a, const ExecutionOptions& options) {
  require_symmetric(a, "tile_cholesky");
  for (Index j = 0; j < a.tile_cols(); ++j) {
    for (Index i = j; i < a.tile_rows(); ++i) {
      if (!a.has_tile(i, j)) throw ShapeMismatch("tile_cholesky: matrix has absent tiles");
    }
  }
  sched::TaskStream stream;
  submit_cholesky(stream, a);
  sched::run(std::move(stream), options);
}

void tile_trsm(const TileMatrix& l, TileMatrix& b, Trans trans,
               const ExecutionOptions& options) {
  sched::TaskStream stream;
  submit_trsm(stream, l, b, trans);
  sched::run(std::move(stream), options);
}

void tile_trmm(const TileMatrix& l, TileMatrix& b, const ExecutionOptions& options) {
  sched::TaskStream stream;
  submit_trmm(stream, l, b);
  sched::run(std::move(stream), options);
}

TileMatrix tile_gemm(const TileMatrix& a, const TileMatrix& b,
                     const ExecutionOptions& options) {
  TileMatrix c(a.rows(), b.cols(), a.nb());
  sched::TaskStream stream;
  submit_gemm(stream, a, b, c);
  sched::run(std::move(stream), options);
  return c;
}

void tile_posv(TileMatrix& a, TileMatrix& b, const ExecutionOptions& options) {
  require_conformal_rows(a, b, "tile_posv");
  sched::TaskStream stream;
  submit_cholesky(stream, a);
  submit_trsm(stream, a, b, Trans::No);
  submit_trsm(stream, a, b, Trans::Yes);
  sched::run(std::move(stream), options);
}

double log_det_from_factor(const TileMatrix& l) {
  if (l.rows() != l.cols()) throw ShapeMismatch("log_det_from_factor: factor is not square");
  double sum = 0.0;
  for (Index k = 0; k < l.tile_rows(); ++k) {
    const double* t = l.tile(k, k);
    if (!t) throw ShapeMismatch("log_det_from_factor: diagonal tile is absent");
    const Index h = l.tile_height(k);
    for (Index d = 0; d < h; ++d) {
      const double v = t[d + d * h];
      if (!(v > 0.0)) throw DomainError("log_det_from_factor: non-positive diagonal");
      sum += std::log(v);
    }
  }
  return 2.0 * sum;
}

double tile_dot(const TileMatrix& x, const TileMatrix& y) {
  if (x.cols() != 1 || y.cols() != 1 || x.rows() != y.rows() || x.nb() != y.nb()) {
    throw ShapeMismatch("tile_dot: vectors are not conformal");
  }
  double sum = 0.0;
  for (Index i = 0; i < x.tile_rows(); ++i) {
    sum += ks().dot(x.tile_height(i), x.tile(i, 0), y.tile(i, 0));
  }
  return sum;
}

std::vector<double> lower_factor_dense(const TileMatrix& l) {
  const Index n = l.rows();
  std::vector<double> out(static_cast<std::size_t>(n * n), 0.0);
  for (Index c = 0; c < n; ++c) {
    for (Index r = c; r < n; ++r) {
      const Index i = r / l.nb();
      const Index j = c / l.nb();
      const double* t = l.tile(i, j);
      if (t) out[static_cast<std::size_t>(r + c * n)] = t[(r - i * l.nb()) + (c - j * l.nb()) * l.tile_height(i)];
    }
  }
  return out;
}

}  // namespace geostat
