#pragma once

#include <cstdint>
#include <random>

namespace geostat {

/// Independent sub-streams derived from one user seed.
enum class Substream : std::uint64_t { Locations = 0, Normals = 1, Folds = 2 };

inline std::mt19937_64 make_engine(std::uint64_t seed, Substream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace geostat
