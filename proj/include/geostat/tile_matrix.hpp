#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geostat {

using Index = std::ptrdiff_t;

/// Identifies one tile of one matrix for dependency tracking.
using TileId = std::uint64_t;

enum class Structure {
  General,
  /// Square; only tiles on or below the diagonal exist and the strictly upper
  /// part of diagonal tiles is never read.
  SymmetricLower,
};

/// Dense matrix stored as a grid of nb x nb column-major tiles. Edge tiles in
/// the last tile row/column are ragged. A tile may be absent, meaning it is
/// structurally zero (used by the independent-blocks approximation).
///
/// Every TileMatrix (including copies) carries a unique id so tile handles of
/// different matrices never alias in the scheduler.
class TileMatrix {
 public:
  TileMatrix() = default;
  TileMatrix(Index rows, Index cols, Index nb,
             Structure structure = Structure::General, bool allocate = true);

  TileMatrix(const TileMatrix& other);
  TileMatrix& operator=(const TileMatrix& other);
  TileMatrix(TileMatrix&&) noexcept = default;
  TileMatrix& operator=(TileMatrix&&) noexcept = default;

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nb() const noexcept { return nb_; }
  Index tile_rows() const noexcept { return mt_; }
  Index tile_cols() const noexcept { return nt_; }
  Structure structure() const noexcept { return structure_; }

  Index tile_height(Index i) const noexcept {
    return i + 1 < mt_ ? nb_ : rows_ - i * nb_;
  }
  Index tile_width(Index j) const noexcept {
    return j + 1 < nt_ ? nb_ : cols_ - j * nb_;
  }

  bool has_tile(Index i, Index j) const;
  /// nullptr when the tile is absent. Leading dimension is tile_height(i).
  double* tile(Index i, Index j);
  const double* tile(Index i, Index j) const;
  /// Allocates a zero tile if absent.
  double* ensure_tile(Index i, Index j);
  void drop_tile(Index i, Index j);
  std::size_t allocated_tiles() const;

  TileId tile_id(Index i, Index j) const noexcept {
    return (uid_ << 40) | (static_cast<TileId>(i) << 20) | static_cast<TileId>(j);
  }

  /// Element read; mirrors the lower triangle for symmetric storage and reads
  /// 0 from absent tiles.
  double operator()(Index r, Index c) const;
  /// Element write into an existing tile (lower triangle for symmetric).
  void set(Index r, Index c, double value);

  /// From a column-major rows x cols array. For symmetric storage only the
  /// lower triangle is read.
  static TileMatrix from_dense(std::span<const double> col_major, Index rows,
                               Index cols, Index nb,
                               Structure structure = Structure::General);
  /// Column-major rows x cols copy, symmetric storage mirrored.
  std::vector<double> to_dense() const;

  /// Column vector with the given blocking.
  static TileMatrix from_vector(std::span<const double> v, Index nb);
  /// Column-major copy of a single-column matrix.
  std::vector<double> to_vector() const;

 private:
  std::size_t slot(Index i, Index j) const {
    return static_cast<std::size_t>(i + j * mt_);
  }
  void check_tile_index(Index i, Index j) const;
  static std::uint64_t next_uid();

  Index rows_ = 0;
  Index cols_ = 0;
  Index nb_ = 1;
  Index mt_ = 0;
  Index nt_ = 0;
  Structure structure_ = Structure::General;
  std::vector<std::vector<double>> tiles_;
  std::uint64_t uid_ = next_uid();
};

/// Column vector in tile layout; blocking must match its partner matrix.
using TileVector = TileMatrix;

}  // namespace geostat
