#include "geostat/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "geostat/errors.hpp"

namespace geostat::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line_no, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

LocationsCsv read_locations_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  const auto header = split(line);
  bool with_z = false;
  if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "z") {
    with_z = true;
  } else if (!(header.size() == 2 && header[0] == "x" && header[1] == "y")) {
    throw ParseError(line_no, "expected header 'x,y' or 'x,y,z'");
  }
  const std::size_t width = with_z ? 3 : 2;

  LocationsCsv out;
  if (with_z) out.z.emplace();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    out.points.push_back({parse_number(fields[0], line_no), parse_number(fields[1], line_no)});
    if (with_z) out.z->push_back(parse_number(fields[2], line_no));
  }
  if (out.points.empty()) throw ParseError(line_no, "no data rows");
  return out;
}

LocationsCsv read_locations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_locations_csv(in);
}

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_locations_csv(std::ostream& out, std::span<const Location> points,
                         std::span<const double> z) {
  if (!z.empty() && z.size() != points.size()) {
    throw ShapeMismatch("write_locations_csv: z length differs from point count");
  }
  out << (z.empty() ? "x,y\n" : "x,y,z\n");
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << format_double(points[i].c1) << ',' << format_double(points[i].c2);
    if (!z.empty()) out << ',' << format_double(z[i]);
    out << '\n';
  }
}

void write_locations_csv(const std::string& path, std::span<const Location> points,
                         std::span<const double> z) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot write " + path);
  write_locations_csv(out, points, z);
}

}  // namespace geostat::io
