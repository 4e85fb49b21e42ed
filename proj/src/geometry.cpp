#include "geostat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "geostat/errors.hpp"
#include "geostat/random.hpp"

namespace geostat {

namespace {

double hav(double angle) {
  const double s = std::sin(0.5 * angle);
  return s * s;
}

void check_lon_lat(const Location& p) {
  if (!(p.c1 >= -180.0 && p.c1 <= 180.0) || !(p.c2 >= -90.0 && p.c2 <= 90.0)) {
    throw DomainError("longitude/latitude out of range: (" +
                      std::to_string(p.c1) + ", " + std::to_string(p.c2) + ")");
  }
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

Metric Metric::great_circle(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("great-circle radius must be positive and finite");
  }
  return {MetricKind::GreatCircle, radius};
}

double Metric::distance(const Location& a, const Location& b) const {
  return kind == MetricKind::Euclidean ? euclidean_distance(a, b)
                                       : haversine_gcd(a, b, radius);
}

double euclidean_distance(const Location& a, const Location& b) {
  const double dx = a.c1 - b.c1;
  const double dy = a.c2 - b.c2;
  return std::sqrt(dx * dx + dy * dy);
}

double haversine_gcd(const Location& a, const Location& b, double radius) {
  if (!(radius > 0.0)) throw DomainError("great-circle radius must be positive");
  check_lon_lat(a);
  check_lon_lat(b);
  const double phi1 = a.c2 * kDegToRad;
  const double phi2 = b.c2 * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.c1 - a.c1) * kDegToRad;
  const double h = hav(dphi) + std::cos(phi1) * std::cos(phi2) * hav(dlambda);
  // Rounding can push h marginally past 1 for antipodal points.
  return 2.0 * radius * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

LocationSet::LocationSet(std::vector<Location> points, Metric metric)
    : points_(std::move(points)), metric_(metric) {
  if (points_.empty()) throw DomainError("a location set needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.c1) || !std::isfinite(p.c2)) {
      throw DomainError("location " + std::to_string(i) + " is not finite");
    }
    if (metric_.kind == MetricKind::GreatCircle) check_lon_lat(p);
  }

  // Sweep in c1 order; only points whose c1 agree within the tolerance can be
  // duplicates.
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points_[a].c1 < points_[b].c1;
  });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto& p = points_[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& q = points_[order[b]];
      if (q.c1 - p.c1 > kDuplicateTolerance) break;
      if (std::abs(q.c2 - p.c2) <= kDuplicateTolerance) {
        throw DomainError("duplicate locations at indices " +
                          std::to_string(std::min(order[a], order[b])) + " and " +
                          std::to_string(std::max(order[a], order[b])));
      }
    }
  }
}

LocationSet LocationSet::select(std::span<const std::size_t> indices) const {
  std::vector<Location> subset;
  subset.reserve(indices.size());
  for (auto i : indices) subset.push_back(points_.at(i));
  return LocationSet(std::move(subset), metric_);
}

double LocationSet::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      best = std::max(best, metric_.distance(points_[i], points_[j]));
    }
  }
  return best;
}

DistanceMatrix distance_matrix(const LocationSet& a, const LocationSet& b) {
  if (!(a.metric() == b.metric())) {
    throw ShapeMismatch("distance_matrix: location sets use different metrics");
  }
  DistanceMatrix d{a.size(), b.size(), std::vector<double>(a.size() * b.size())};
  const auto& metric = a.metric();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      d.entries[i * d.cols + j] = metric.distance(a[i], b[j]);
    }
  }
  return d;
}

LocationSet generate_locations(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("generate_locations: n must be at least 1");
  auto g = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (g * g < n) ++g;
  while (g > 1 && (g - 1) * (g - 1) >= n) --g;

  auto engine = make_engine(seed, Substream::Locations);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  const double inv_g = 1.0 / static_cast<double>(g);

  std::vector<Location> grid;
  grid.reserve(g * g);
  for (std::size_t r = 1; r <= g; ++r) {
    for (std::size_t l = 1; l <= g; ++l) {
      const double x = jitter(engine);
      const double y = jitter(engine);
      grid.push_back({(static_cast<double>(r) - 0.5 + x) * inv_g,
                      (static_cast<double>(l) - 0.5 + y) * inv_g});
    }
  }
  std::shuffle(grid.begin(), grid.end(), engine);
  grid.resize(n);
  return LocationSet(std::move(grid), Metric::euclidean());
}

}  // namespace geostat
