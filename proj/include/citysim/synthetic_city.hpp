#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citysim/travel.hpp"

namespace citysim {

// A rectangular grid of square blocks. Each block is one region; roads run
// along every block edge and transit lines follow grid roads.
struct SyntheticCitySpec {
  int cols = 1;
  int rows = 1;
  double block_m = 1000.0;
  // Region count per type; must add up to cols * rows.
  std::map<RegionType, int> regions{{RegionType::Housing, 1}};
  int sublocations_per_region = 1;
  // Per-type overrides of sublocations_per_region.
  std::map<RegionType, int> sublocations_by_type;
  double sublocation_radius_m = 5.0;
  int lines = 0;
  double stop_spacing_m = 250.0;
  double headway_s = 600.0;
  double speed_mps = 8.0;
  std::optional<GeoAnchor> anchor;

  friend bool operator==(const SyntheticCitySpec&, const SyntheticCitySpec&) = default;
};

// Problems with the spec, empty when it can be generated.
std::vector<std::string> check_spec(const SyntheticCitySpec& spec);

// Deterministic in (spec, seed). Throws SpecError for invalid specs.
World generate_synthetic_city(const SyntheticCitySpec& spec, std::uint64_t seed);

}  // namespace citysim
