#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "citysim/engine.hpp"
#include "citysim/scenario.hpp"

namespace citysim {

struct RunSummary {
  std::size_t population = 0;
  std::size_t seeded = 0;
  std::size_t vaccinated = 0;
  std::size_t infections = 0;  // transmission events, index cases excluded
  std::size_t ever_infected = 0;
  std::size_t deaths = 0;
  double attack_rate = 0.0;
  double peak_time_s = 0.0;
  std::uint32_t peak_infected = 0;
  CurveShape curve;
  StatusCounts final_counts{};
};

// Currently infected (incubating or symptomatic) people at every whole day
// covered by `reports`, starting at time 0.
std::vector<double> daily_infected(std::span<const TickReport> reports);

RunSummary summarize(const Simulation& sim);

void write_ticks_csv(std::ostream& os, const World& world, std::span<const TickReport> reports);
void write_places_csv(std::ostream& os, std::span<const TickReport> reports);
void write_events_csv(std::ostream& os, const Simulation& sim);
void write_transitions_csv(std::ostream& os, const Simulation& sim);
void write_summary(std::ostream& os, const RunSummary& s);
// Agent positions as GeoJSON points; lon/lat when the city has an anchor,
// plane metres otherwise.
void write_snapshot_geojson(std::ostream& os, const Simulation& sim);

// Builds the world and population, seeds, runs to the horizon and writes
// summary.txt, ticks.csv, places.csv, events.csv, transitions.csv and
// optional snapshots/ into `out_dir`. Throws IoError when files cannot be
// written.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                        const std::function<void(const Simulation&)>& progress = {});

// Human-readable report rebuilt from the files of a finished run.
std::string report_run(const std::filesystem::path& out_dir);

}  // namespace citysim
