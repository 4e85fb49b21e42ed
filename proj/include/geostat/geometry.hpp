#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geostat {

/// A 2-D site: planar (x, y) or (longitude, latitude) in degrees.
struct Location {
  double c1 = 0.0;
  double c2 = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

enum class MetricKind { Euclidean, GreatCircle };

inline constexpr double kEarthRadiusKm = 6371.0;

struct Metric {
  MetricKind kind = MetricKind::Euclidean;
  double radius = kEarthRadiusKm;  // GreatCircle only

  static Metric euclidean() { return {}; }
  static Metric great_circle(double radius = kEarthRadiusKm);

  double distance(const Location& a, const Location& b) const;

  friend bool operator==(const Metric&, const Metric&) = default;
};

double euclidean_distance(const Location& a, const Location& b);

/// Great-circle distance via the haversine formula. Coordinates are degrees;
/// throws DomainError for longitude outside [-180,180] or latitude outside
/// [-90,90], or a non-positive radius.
double haversine_gcd(const Location& a, const Location& b, double radius);

/// Ordered, duplicate-free set of sites sharing one metric.
class LocationSet {
 public:
  static constexpr double kDuplicateTolerance = 1e-12;

  /// Validates finiteness, metric coordinate ranges, n >= 1 and the absence of
  /// duplicates (both coordinates within kDuplicateTolerance).
  LocationSet(std::vector<Location> points, Metric metric = Metric::euclidean());

  std::size_t size() const noexcept { return points_.size(); }
  const Metric& metric() const noexcept { return metric_; }
  std::span<const Location> points() const noexcept { return points_; }
  const Location& operator[](std::size_t i) const { return points_[i]; }

  /// Subset in the given index order.
  LocationSet select(std::span<const std::size_t> indices) const;

  /// Largest pairwise distance (0 for a single site).
  double diameter() const;

 private:
  std::vector<Location> points_;
  Metric metric_;
};

/// Dense row-major m x n matrix of pairwise distances.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;

  double operator()(std::size_t i, std::size_t j) const {
    return entries[i * cols + j];
  }
};

/// Entry (i, j) is the metric distance between a[i] and b[j]. Throws
/// ShapeMismatch when the two sets use different metrics.
DistanceMatrix distance_matrix(const LocationSet& a, const LocationSet& b);

/// Jittered-grid sites in the unit square: on a ceil(sqrt(n)) grid, each cell
/// (r, l) holds ((r - 0.5 + X) / g, (l - 0.5 + Y) / g) with X, Y ~ U(-0.4, 0.4).
/// The grid is shuffled by `seed` and truncated to n points.
LocationSet generate_locations(std::size_t n, std::uint64_t seed);

}  // namespace geostat
