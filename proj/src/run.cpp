#include "citysim/run.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "citysim/errors.hpp"

namespace citysim {

namespace {

std::uint32_t infected_now(const StatusCounts& c) {
  return c[static_cast<std::size_t>(InfectionStatus::Incubating)] +
         c[static_cast<std::size_t>(InfectionStatus::Symptomatic)];
}

std::uint32_t ever_infected(const StatusCounts& c) {
  return infected_now(c) + c[static_cast<std::size_t>(InfectionStatus::Recovered)] +
         c[static_cast<std::size_t>(InfectionStatus::Dead)];
}

std::string status_header() {
  std::string h;
  for (InfectionStatus s : kAllStatuses) h += "," + std::string(to_string(s));
  return h;
}

void write_counts(std::ostream& os, const StatusCounts& c) {
  for (std::uint32_t n : c) os << ',' << n;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<double> daily_infected(std::span<const TickReport> reports) {
  std::vector<double> out;
  double next = 0.0;
  for (const TickReport& r : reports) {
    if (r.time + 1e-9 < next) continue;
    out.push_back(infected_now(r.citywide));
    while (next <= r.time + 1e-9) next += kDaySeconds;
  }
  return out;
}

RunSummary summarize(const Simulation& sim) {
  RunSummary s;
  s.population = sim.persons().size();
  s.seeded = sim.seeds().size();
  s.infections = sim.events().size();
  for (const StatusChange& c : sim.transitions())
    if (c.from == InfectionStatus::Susceptible && c.to == InfectionStatus::VaccinatedPending) ++s.vaccinated;
  const TickReport last = sim.reports().empty() ? sim.collect_statistics() : sim.reports().back();
  s.final_counts = last.citywide;
  s.ever_infected = ever_infected(last.citywide);
  s.deaths = last.citywide[static_cast<std::size_t>(InfectionStatus::Dead)];
  s.attack_rate = s.population ? static_cast<double>(s.ever_infected) / s.population : 0.0;
  for (const TickReport& r : sim.reports()) {
    if (infected_now(r.citywide) > s.peak_infected) {
      s.peak_infected = infected_now(r.citywide);
      s.peak_time_s = r.time;
    }
  }
  const auto curve = daily_infected(sim.reports());
  s.curve = analyze_curve(curve);
  return s;
}

void write_ticks_csv(std::ostream& os, const World& world, std::span<const TickReport> reports) {
  os << "time_s,scope" << status_header() << '\n';
  for (const TickReport& r : reports) {
    os << fmt::format("{}", r.time) << ",city";
    write_counts(os, r.citywide);
    os << '\n';
    for (std::size_t i = 0; i < r.by_region.size(); ++i) {
      os << fmt::format("{}", r.time) << ",region:" << raw(world.city.regions()[i].id);
      write_counts(os, r.by_region[i]);
      os << '\n';
    }
  }
}

void write_places_csv(std::ostream& os, std::span<const TickReport> reports) {
  os << "time_s";
  for (PlaceKind k : kAllPlaceKinds) os << ',' << to_string(k);
  os << '\n';
  for (const TickReport& r : reports) {
    os << fmt::format("{}", r.time);
    for (std::uint64_t n : r.infections_by_place) os << ',' << n;
    os << '\n';
  }
}

void write_events_csv(std::ostream& os, const Simulation& sim) {
  os << "time_s,place_id,place_kind,infector,infectee\n";
  for (const InfectionEvent& e : sim.events())
    os << fmt::format("{},{},{},{},{}\n", e.time, describe_place(sim.world(), e.kind, e.place), to_string(e.kind),
                      raw(e.infector), raw(e.infectee));
}

void write_transitions_csv(std::ostream& os, const Simulation& sim) {
  os << "time_s,person,from,to,seeded\n";
  for (const StatusChange& c : sim.transitions())
    os << fmt::format("{},{},{},{},{}\n", c.time, raw(c.person), to_string(c.from), to_string(c.to), c.seeded ? 1 : 0);
}

void write_summary(std::ostream& os, const RunSummary& s) {
  os << "population: " << s.population << '\n';
  os << "index cases: " << s.seeded << '\n';
  os << "vaccinated: " << s.vaccinated << '\n';
  os << "transmissions: " << s.infections << '\n';
  os << "ever infected: " << s.ever_infected << '\n';
  os << "deaths: " << s.deaths << '\n';
  os << fmt::format("attack rate: {:.4f}\n", s.attack_rate);
  os << fmt::format("peak infected: {} at day {:.2f}\n", s.peak_infected, s.peak_time_s / kDaySeconds);
  os << "single peak: " << (s.curve.single_peak ? "yes" : "no") << '\n';
  os << "final counts:";
  for (InfectionStatus st : kAllStatuses) os << ' ' << to_string(st) << '=' << s.final_counts[static_cast<std::size_t>(st)];
  os << '\n';
}

void write_snapshot_geojson(std::ostream& os, const Simulation& sim) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  const auto& anchor = sim.world().city.anchor;
  for (const AgentView& a : sim.agents()) {
    double x = a.position.x, y = a.position.y;
    if (anchor) unproject(*anchor, a.position, x, y);
    nlohmann::ordered_json props{{"person", raw(a.person)},
                                 {"status", std::string(to_string(a.status))},
                                 {"motion", std::string(to_string(a.motion))},
                                 {"sublocation", raw(a.last_sl)}};
    if (a.vehicle) props["vehicle"] = describe_place(sim.world(), PlaceKind::Vehicle, *a.vehicle);
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {x, y}}}},
                        {"properties", std::move(props)}});
  }
  nlohmann::ordered_json doc{{"type", "FeatureCollection"}, {"time_s", sim.clock()}, {"features", std::move(features)}};
  os << doc.dump() << '\n';
}

RunSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                        const std::function<void(const Simulation&)>& progress) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const World world = build_world(cfg);
  Population pop = synthesize_population(world.city, cfg.demographics, cfg.seed);
  Simulation sim(world, std::move(pop), to_sim_config(cfg));
  if (cfg.seeding.vaccinated_fraction > 0.0) sim.vaccinate_fraction(cfg.seeding.vaccinated_fraction);
  if (!cfg.seeding.ids.empty())
    sim.seed_infections(std::span<const PersonId>(cfg.seeding.ids));
  else
    sim.seed_infections(cfg.seeding.count);

  const double snap_every = cfg.output.snapshot_every_s;
  double next_snap = 0.0;
  auto snapshot = [&](const Simulation& s) {
    if (snap_every <= 0.0 || s.clock() + 1e-9 < next_snap) return;
    const auto dir = out_dir / "snapshots";
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const auto path = dir / fmt::format("agents_{:08d}.geojson", static_cast<long long>(std::llround(s.clock())));
    auto out = open_out(path);
    write_snapshot_geojson(out, s);
    check_written(out, path);
    while (next_snap <= s.clock() + 1e-9) next_snap += snap_every;
  };
  snapshot(sim);
  sim.after_step = [&](const Simulation& s) {
    snapshot(s);
    if (progress) progress(s);
  };
  spdlog::info("running {} people for {} days", sim.persons().size(), cfg.days);
  sim.run();

  const RunSummary summary = summarize(sim);
  auto write = [&](const char* name, const std::function<void(std::ostream&)>& body) {
    const auto path = out_dir / name;
    auto out = open_out(path);
    body(out);
    check_written(out, path);
  };
  write("ticks.csv", [&](std::ostream& os) { write_ticks_csv(os, world, sim.reports()); });
  write("places.csv", [&](std::ostream& os) { write_places_csv(os, sim.reports()); });
  write("events.csv", [&](std::ostream& os) { write_events_csv(os, sim); });
  write("transitions.csv", [&](std::ostream& os) { write_transitions_csv(os, sim); });
  write("summary.txt", [&](std::ostream& os) { write_summary(os, summary); });
  write("scenario.yaml", [&](std::ostream& os) { os << serialize_scenario(cfg); });
  return summary;
}

std::string report_run(const std::filesystem::path& out_dir) {
  const auto ticks_path = out_dir / "ticks.csv";
  std::ifstream in(ticks_path);
  if (!in) throw IoError("cannot read " + ticks_path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ticks_path.string() + ": empty file", 1);
  const auto header = split(line, ',');
  if (header.size() != 2 + std::size(kAllStatuses) || header[0] != "time_s")
    throw ParseError(ticks_path.string() + ": unexpected header", 1);

  std::vector<TickReport> reports;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw ParseError(ticks_path.string() + ": wrong column count", line_no);
    if (cells[1] != "city") continue;
    TickReport r;
    try {
      r.time = std::stod(cells[0]);
      for (std::size_t k = 0; k < std::size(kAllStatuses); ++k)
        r.citywide[k] = static_cast<std::uint32_t>(std::stoul(cells[2 + k]));
    } catch (const std::exception&) {
      throw ParseError(ticks_path.string() + ": bad number", line_no);
    }
    reports.push_back(r);
  }
  if (reports.empty()) throw ParseError(ticks_path.string() + ": no citywide rows", line_no);

  std::size_t events = 0;
  std::map<std::string, std::size_t> by_kind;
  if (std::ifstream ev(out_dir / "events.csv"); ev) {
    std::getline(ev, line);
    while (std::getline(ev, line)) {
      const auto cells = split(line, ',');
      if (cells.size() < 5) continue;
      ++events;
      ++by_kind[cells[2]];
    }
  }

  RunSummary s;
  s.final_counts = reports.back().citywide;
  s.population = total(s.final_counts);
  s.ever_infected = ever_infected(s.final_counts);
  s.deaths = s.final_counts[static_cast<std::size_t>(InfectionStatus::Dead)];
  s.attack_rate = s.population ? static_cast<double>(s.ever_infected) / s.population : 0.0;
  s.infections = events;
  for (const TickReport& r : reports)
    if (infected_now(r.citywide) > s.peak_infected) {
      s.peak_infected = infected_now(r.citywide);
      s.peak_time_s = r.time;
    }
  const auto curve = daily_infected(reports);
  s.curve = analyze_curve(curve);

  std::ostringstream os;
  os << fmt::format("run: {}\n", out_dir.string());
  os << fmt::format("simulated: {:.2f} days in {} reports\n", reports.back().time / kDaySeconds, reports.size());
  os << "population: " << s.population << '\n';
  os << "transmissions: " << s.infections << '\n';
  for (const auto& [kind, n] : by_kind) os << "  in " << kind << ": " << n << '\n';
  os << "ever infected: " << s.ever_infected << '\n';
  os << "deaths: " << s.deaths << '\n';
  os << fmt::format("attack rate: {:.4f}\n", s.attack_rate);
  os << fmt::format("peak infected: {} at day {:.2f}\n", s.peak_infected, s.peak_time_s / kDaySeconds);
  os << "single peak: " << (s.curve.single_peak ? "yes" : "no") << '\n';
  os << "daily infected:";
  for (double v : curve) os << ' ' << v;
  os << '\n';
  return os.str();
}

}  // namespace citysim
