#include "geostat/tile_matrix.hpp"

#include <atomic>
#include <string>

#include "geostat/errors.hpp"

namespace geostat {

std::uint64_t TileMatrix::next_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed) & ((1ull << 24) - 1);
}

TileMatrix::TileMatrix(Index rows, Index cols, Index nb, Structure structure,
                       bool allocate)
    : rows_(rows), cols_(cols), nb_(nb), structure_(structure) {
  if (rows < 1 || cols < 1) throw ShapeMismatch("TileMatrix: empty dimensions");
  if (nb < 1) throw ShapeMismatch("TileMatrix: tile size must be positive");
  if (structure == Structure::SymmetricLower && rows != cols) {
    throw ShapeMismatch("TileMatrix: symmetric storage requires a square matrix");
  }
  mt_ = (rows + nb - 1) / nb;
  nt_ = (cols + nb - 1) / nb;
  if (mt_ >= (1 << 20) || nt_ >= (1 << 20)) {
    throw ShapeMismatch("TileMatrix: tile grid too large");
  }
  tiles_.resize(static_cast<std::size_t>(mt_ * nt_));
  if (allocate) {
    for (Index j = 0; j < nt_; ++j) {
      for (Index i = structure == Structure::SymmetricLower ? j : 0; i < mt_; ++i) {
        ensure_tile(i, j);
      }
    }
  }
}

TileMatrix::TileMatrix(const TileMatrix& other)
    : rows_(other.rows_),
      cols_(other.cols_),
      nb_(other.nb_),
      mt_(other.mt_),
      nt_(other.nt_),
      structure_(other.structure_),
      tiles_(other.tiles_) {}

TileMatrix& TileMatrix::operator=(const TileMatrix& other) {
  if (this != &other) {
    rows_ = other.rows_;
    cols_ = other.cols_;
    nb_ = other.nb_;
    mt_ = other.mt_;
    nt_ = other.nt_;
    structure_ = other.structure_;
    tiles_ = other.tiles_;
    uid_ = next_uid();
  }
  return *this;
}

void TileMatrix::check_tile_index(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= mt_ || j >= nt_) {
    throw ShapeMismatch("tile index (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") out of range");
  }
}

bool TileMatrix::has_tile(Index i, Index j) const {
  check_tile_index(i, j);
  return !tiles_[slot(i, j)].empty();
}

double* TileMatrix::tile(Index i, Index j) {
  check_tile_index(i, j);
  auto& t = tiles_[slot(i, j)];
  return t.empty() ? nullptr : t.data();
}

const double* TileMatrix::tile(Index i, Index j) const {
  check_tile_index(i, j);
  const auto& t = tiles_[slot(i, j)];
  return t.empty() ? nullptr : t.data();
}

double* TileMatrix::ensure_tile(Index i, Index j) {
  check_tile_index(i, j);
  if (structure_ == Structure::SymmetricLower && i < j) {
    throw ShapeMismatch("symmetric storage has no tiles above the diagonal");
  }
  auto& t = tiles_[slot(i, j)];
  if (t.empty()) t.assign(static_cast<std::size_t>(tile_height(i) * tile_width(j)), 0.0);
  return t.data();
}

void TileMatrix::drop_tile(Index i, Index j) {
  check_tile_index(i, j);
  std::vector<double>().swap(tiles_[slot(i, j)]);
}

std::size_t TileMatrix::allocated_tiles() const {
  std::size_t count = 0;
  for (const auto& t : tiles_) count += !t.empty();
  return count;
}

double TileMatrix::operator()(Index r, Index c) const {
  if (structure_ == Structure::SymmetricLower && r < c) std::swap(r, c);
  const Index i = r / nb_;
  const Index j = c / nb_;
  const double* t = tile(i, j);
  if (!t) return 0.0;
  return t[(r - i * nb_) + (c - j * nb_) * tile_height(i)];
}

void TileMatrix::set(Index r, Index c, double value) {
  if (structure_ == Structure::SymmetricLower && r < c) std::swap(r, c);
  const Index i = r / nb_;
  const Index j = c / nb_;
  double* t = tile(i, j);
  if (!t) throw ShapeMismatch("TileMatrix::set: tile is absent");
  t[(r - i * nb_) + (c - j * nb_) * tile_height(i)] = value;
}

TileMatrix TileMatrix::from_dense(std::span<const double> col_major, Index rows,
                                  Index cols, Index nb, Structure structure) {
  if (static_cast<Index>(col_major.size()) != rows * cols) {
    throw ShapeMismatch("from_dense: data size does not match dimensions");
  }
  TileMatrix m(rows, cols, nb, structure);
  for (Index j = 0; j < m.nt_; ++j) {
    for (Index i = structure == Structure::SymmetricLower ? j : 0; i < m.mt_; ++i) {
      double* t = m.tile(i, j);
      const Index h = m.tile_height(i);
      for (Index c = 0; c < m.tile_width(j); ++c) {
        for (Index r = 0; r < h; ++r) {
          t[r + c * h] = col_major[static_cast<std::size_t>((i * nb + r) + (j * nb + c) * rows)];
        }
      }
    }
  }
  return m;
}

std::vector<double> TileMatrix::to_dense() const {
  std::vector<double> out(static_cast<std::size_t>(rows_ * cols_));
  for (Index c = 0; c < cols_; ++c) {
    for (Index r = 0; r < rows_; ++r) {
      out[static_cast<std::size_t>(r + c * rows_)] = (*this)(r, c);
    }
  }
  return out;
}

TileMatrix TileMatrix::from_vector(std::span<const double> v, Index nb) {
  return from_dense(v, static_cast<Index>(v.size()), 1, nb);
}

std::vector<double> TileMatrix::to_vector() const {
  if (cols_ != 1) throw ShapeMismatch("to_vector: matrix has more than one column");
  return to_dense();
}

}  // namespace geostat
