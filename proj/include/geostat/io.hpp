#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geostat/covariance.hpp"
#include "geostat/geometry.hpp"

namespace geostat::io {

struct LocationsCsv {
  std::vector<Location> points;
  /// Present when the file carries a third `z` column.
  std::optional<std::vector<double>> z;
};

/// Reads `x,y` or `x,y,z` CSV with a header line. Throws ParseError with the
/// 1-based line number on a wrong header, field count or non-numeric field.
LocationsCsv read_locations_csv(std::istream& in);
LocationsCsv read_locations_csv(const std::string& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_locations_csv(std::ostream& out, std::span<const Location> points,
                         std::span<const double> z = {});
void write_locations_csv(const std::string& path, std::span<const Location> points,
                         std::span<const double> z = {});

/// Shortest-exact formatting (17 significant digits).
std::string format_double(double v);

}  // namespace geostat::io
