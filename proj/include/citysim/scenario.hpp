#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "citysim/agenda.hpp"
#include "citysim/engine.hpp"
#include "citysim/epidemic.hpp"
#include "citysim/population.hpp"
#include "citysim/synthetic_city.hpp"
#include "citysim/travel.hpp"

namespace citysim {

inline constexpr int kScenarioVersion = 1;

struct SeedingConfig {
  std::size_t count = 1;
  std::vector<PersonId> ids;  // used instead of `count` when non-empty
  double vaccinated_fraction = 0.0;

  friend bool operator==(const SeedingConfig&, const SeedingConfig&) = default;
};

struct OutputConfig {
  std::string dir = "citysim-out";
  double report_every_s = 3600.0;
  double snapshot_every_s = 0.0;  // 0 turns agent snapshots off

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
  std::string city_file;  // absolute once loaded
  std::optional<SyntheticCitySpec> synthetic_city;
  std::uint64_t seed = 0;
  int days = 1;
  double dt_s = 60.0;
  DemographicConfig demographics = default_demographics(500);
  AgendaConfig agenda;
  BehaviorPolicy behavior;
  EpidemicParams epidemic;
  TravelConfig travel;
  SeedingConfig seeding;
  OutputConfig output;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Parses and validates a scenario document. Relative paths resolve against
// `base_dir`. Throws ParseError for malformed YAML and ValidationError with
// one "line N: key: problem" entry per issue otherwise.
ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_scenario(const std::filesystem::path& path);

// YAML text that parses back to an equal config.
std::string serialize_scenario(const ScenarioConfig& cfg);

SimConfig to_sim_config(const ScenarioConfig& cfg);

// Loads or generates the city the scenario refers to.
World build_world(const ScenarioConfig& cfg);

}  // namespace citysim
