#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geostat/covariance.hpp"
#include "geostat/geometry.hpp"
#include "geostat/scheduler.hpp"
#include "geostat/tile_matrix.hpp"

namespace geostat {

struct SimulationSpec {
  std::size_t n = 400;
  MaternParams params;
  std::uint64_t seed = 0;
  Index nb = 128;
  /// Sites to simulate on; when empty, generate_locations(n, seed) is used.
  std::optional<LocationSet> sites;
};

struct SimulatedField {
  LocationSet locations;
  std::vector<double> z;
};

/// Z = L e with L the Cholesky factor of the Matérn covariance of the sites
/// and e ~ N(0, I) drawn from the seed's normal sub-stream. A pure function of
/// the spec. Throws NotPositiveDefinite.
SimulatedField simulate_field(const SimulationSpec& spec,
                              const sched::ExecutionOptions& exec);

}  // namespace geostat
