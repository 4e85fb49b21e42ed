#include "geostat/simulate.hpp"

#include <random>

#include "geostat/errors.hpp"
#include "geostat/random.hpp"
#include "geostat/tile_algorithms.hpp"

namespace geostat {

SimulatedField simulate_field(const SimulationSpec& spec,
                              const sched::ExecutionOptions& exec) {
  spec.params.validate();
  if (spec.nb < 1) throw DomainError("simulate: tile size must be positive");
  LocationSet sites = spec.sites ? *spec.sites : generate_locations(spec.n, spec.seed);
  const auto n = static_cast<Index>(sites.size());

  auto engine = make_engine(spec.seed, Substream::Normals);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> e(static_cast<std::size_t>(n));
  for (auto& v : e) v = normal(engine);

  const MaternKernel kernel(spec.params);
  TileMatrix sigma(n, n, spec.nb, Structure::SymmetricLower);
  TileMatrix z = TileMatrix::from_vector(e, spec.nb);

  sched::TaskStream stream;
  submit_cov_generation(stream, sigma, sites, sites, kernel);
  submit_cholesky(stream, sigma);
  submit_trmm(stream, sigma, z);
  sched::run(std::move(stream), exec);

  return {std::move(sites), z.to_vector()};
}

}  // namespace geostat
