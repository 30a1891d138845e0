#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "citysim/city_io.hpp"
#include "citysim/errors.hpp"
#include "citysim/run.hpp"
#include "citysim/scenario.hpp"
#include "citysim/synthetic_city.hpp"

using namespace citysim;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

Point parse_point(const std::string& s) {
  std::stringstream ss(s);
  Point p;
  char comma = 0;
  if (!(ss >> p.x >> comma >> p.y) || comma != ',') throw ConfigError("expected x,y in metres but got '" + s + "'");
  return p;
}

void make_parent(const std::string& file) {
  const auto dir = std::filesystem::path(file).parent_path();
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void print_itinerary(const World& w, const TransitItinerary& it) {
  std::cout << fmt::format("walk {:.0f} m to stop {}\n", segment_length(it.access), to_string(it.legs.front().board));
  for (std::size_t i = 0; i < it.legs.size(); ++i) {
    const TransitLeg& leg = it.legs[i];
    const TransitLine& line = w.transit.lines()[leg.line];
    std::cout << fmt::format("ride line {} direction {} from stop {} to stop {} ({} stops, headway {:.0f} s)\n",
                             to_string(line.id), line.direction, to_string(leg.board), to_string(leg.alight),
                             leg.alight_pos - leg.board_pos, line.headway_s);
    if (i + 1 < it.legs.size())
      std::cout << fmt::format("walk {:.0f} m to stop {}\n", segment_length(it.transfer_walks[i]),
                               to_string(it.legs[i + 1].board));
  }
  std::cout << fmt::format("walk {:.0f} m to destination\n", segment_length(it.egress));
  std::cout << fmt::format("transfers: {}\nestimated time: {:.0f} s\n", it.transfers, it.estimated_time_s);
}

std::vector<std::string> split_pairs(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::map<RegionType, int> parse_type_counts(const std::vector<std::string>& items) {
  std::map<RegionType, int> out;
  for (const std::string& item : items) {
    for (const std::string& pair : split_pairs(item)) {
      const auto eq = pair.find('=');
      const auto type = parse_region_type(pair.substr(0, eq));
      if (eq == std::string::npos || !type) throw ConfigError("expected type=count but got '" + pair + "'");
      try {
        out[*type] = std::stoi(pair.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad count in '" + pair + "'");
      }
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"City-scale agent-based epidemic simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress");

  std::string city_path, scenario_path, out_path, from_s, to_s, mode_s = "car", run_dir;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> dt_override;
  std::optional<int> days_override;
  std::optional<std::string> out_dir_override;

  auto* validate = app.add_subcommand("validate-city", "Check a city file and list every violation");
  validate->add_option("city", city_path, "City file (.json or .geojson)")->required();

  SyntheticCitySpec spec;
  std::vector<std::string> region_counts, sl_counts;
  auto* generate = app.add_subcommand("generate-city", "Write a synthetic grid city");
  generate->add_option("-o,--out", out_path, "Output file (.json or .geojson)")->required();
  generate->add_option("--seed", seed, "Random seed");
  generate->add_option("--cols", spec.cols, "Blocks per row");
  generate->add_option("--rows", spec.rows, "Blocks per column");
  generate->add_option("--block", spec.block_m, "Block edge in metres");
  generate->add_option("--regions", region_counts, "Region counts, e.g. housing=6,office=2")->required();
  generate->add_option("--sublocations", spec.sublocations_per_region, "Sublocations per region");
  generate->add_option("--sublocations-by-type", sl_counts, "Per-type sublocation counts, e.g. housing=40");
  generate->add_option("--radius", spec.sublocation_radius_m, "Sublocation radius in metres");
  generate->add_option("--lines", spec.lines, "Number of two-way transit lines");
  generate->add_option("--stop-spacing", spec.stop_spacing_m, "Distance between stops in metres");
  generate->add_option("--headway", spec.headway_s, "Seconds between vehicles");
  generate->add_option("--speed", spec.speed_mps, "Vehicle speed in m/s");

  auto* route = app.add_subcommand("route", "Door-to-door route over the road network");
  route->add_option("city", city_path, "City file")->required();
  route->add_option("--from", from_s, "Start x,y in metres")->required();
  route->add_option("--to", to_s, "End x,y in metres")->required();
  route->add_option("--mode", mode_s, "walk, bike, car or taxi");

  auto* transit = app.add_subcommand("transit-route", "Fewest-transfer public transport itinerary");
  transit->add_option("city", city_path, "City file")->required();
  transit->add_option("--from", from_s, "Start x,y in metres")->required();
  transit->add_option("--to", to_s, "End x,y in metres")->required();

  auto* population = app.add_subcommand("synthesize-population", "Write the population of a scenario as CSV");
  population->add_option("scenario", scenario_path, "Scenario file")->required();
  population->add_option("-o,--out", out_path, "Output CSV (stdout when omitted)");
  population->add_option("--seed", seed_override, "Override the scenario seed");

  auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed_override, "Override the scenario seed");
  run->add_option("--dt", dt_override, "Time step in seconds");
  run->add_option("--days", days_override, "Simulated days");
  run->add_option("-o,--output-dir", out_dir_override, "Output directory (else $CITYSIM_OUTPUT_DIR, else scenario)");

  auto* report = app.add_subcommand("report", "Summarize the outputs of a finished run");
  report->add_option("dir", run_dir, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*validate) {
      const World w = load_city(city_path);
      const auto problems = validate_world(w);
      for (const std::string& p : problems) std::cout << p << '\n';
      std::cout << fmt::format("{}: {} regions, {} sublocations, {} road nodes, {} stops, {} lines, {} violations\n",
                               city_path, w.city.regions().size(), w.city.sublocations().size(),
                               w.roads.nodes().size(), w.transit.stops().size(), w.transit.lines().size(),
                               problems.size());
      return problems.empty() ? 0 : kExitInput;
    }
    if (*generate) {
      spec.regions = parse_type_counts(region_counts);
      spec.sublocations_by_type = parse_type_counts(sl_counts);
      const World w = generate_synthetic_city(spec, seed);
      make_parent(out_path);
      save_city(w, out_path);
      return 0;
    }
    if (*route) {
      const World w = load_city(city_path);
      const auto mode = parse_travel_mode(mode_s);
      if (!mode || *mode == TravelMode::Transit) throw ConfigError("mode must be walk, bike, car or taxi");
      const RoutePath path = route_on_roads(w.roads, parse_point(from_s), parse_point(to_s));
      const char* shape = path.shape == RouteShape::Direct          ? "direct"
                          : path.shape == RouteShape::RoadComposite ? "road"
                                                                    : "fallback";
      std::cout << fmt::format("shape: {}\nsegments: {}\nlength: {:.1f} m\nduration: {:.0f} s\n", shape,
                               path.segments.size(), path.total_length,
                               path.total_length / Speeds{}.of(*mode));
      return 0;
    }
    if (*transit) {
      const World w = load_city(city_path);
      const auto it = route_transit(w.transit, parse_point(from_s), parse_point(to_s));
      if (!it) {
        std::cout << "no transit itinerary; travel falls back to taxi\n";
        return 0;
      }
      print_itinerary(w, *it);
      return 0;
    }
    if (*population) {
      ScenarioConfig cfg = load_scenario(scenario_path);
      if (seed_override) cfg.seed = *seed_override;
      const World w = build_world(cfg);
      const Population pop = synthesize_population(w.city, cfg.demographics, cfg.seed);
      if (out_path.empty()) {
        write_population_csv(std::cout, pop);
      } else {
        make_parent(out_path);
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        write_population_csv(out, pop);
      }
      return 0;
    }
    if (*run) {
      ScenarioConfig cfg = load_scenario(scenario_path);
      if (seed_override) cfg.seed = *seed_override;
      if (dt_override) cfg.dt_s = *dt_override;
      if (days_override) cfg.days = *days_override;
      std::string dir = cfg.output.dir;
      if (const char* env = std::getenv("CITYSIM_OUTPUT_DIR"); env && *env) dir = env;
      if (out_dir_override) dir = *out_dir_override;
      const RunSummary s = run_scenario(cfg, dir);
      write_summary(std::cout, s);
      return 0;
    }
    if (*report) {
      std::cout << report_run(run_dir);
      return 0;
    }
  } catch (const ValidationError& e) {
    for (const std::string& p : e.problems()) std::cerr << "error: " << p << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << (e.line() > 0 ? fmt::format("line {}: ", e.line()) : "") << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const AssignmentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
