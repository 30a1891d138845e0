// Runs the acceptance criteria and prints one PASS/FAIL line for each.
// Usage: citysim_acceptance <toy scenario yaml>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <variant>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "citysim/agenda.hpp"
#include "citysim/epidemic.hpp"
#include "citysim/run.hpp"
#include "citysim/scenario.hpp"
#include "citysim/synthetic_city.hpp"
#include "oracles.hpp"

using namespace citysim;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, const char* what, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = out.ok && in_time;
  failures += !pass;
  fmt::print("[{}] criterion {}: {} ({}; {:.2f} s of {:.0f} s{})\n", pass ? "PASS" : "FAIL", n, what, out.detail, secs,
             limit_s, in_time ? "" : ", too slow");
  std::fflush(stdout);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool near_point(Point a, Point b) { return distance(a, b) < 1e-9; }

// Door-to-door shape check for one routed trip.
bool conforms(const RoadGraph& g, Point a, Point b, const RoutePath& r) {
  const double d = distance(a, b);
  if (d <= 3000.0) {
    if (r.shape != RouteShape::Direct || r.segments.size() != 1) return false;
    const auto* s = std::get_if<StraightSegment>(&r.segments[0]);
    return s && near_point(s->from, a) && near_point(s->to, b);
  }
  if (r.shape != RouteShape::RoadComposite || r.segments.size() < 5) return false;
  const std::size_t n = r.segments.size();
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, n - 2, n - 1})
    if (!std::holds_alternative<StraightSegment>(r.segments[i])) return false;
  for (std::size_t i = 2; i + 2 < n; ++i)
    if (!std::holds_alternative<OnRoadSegment>(r.segments[i])) return false;
  if (!near_point(segment_start(g, r.segments.front()), a) || !near_point(segment_end(g, r.segments.back()), b))
    return false;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (distance(segment_end(g, r.segments[i]), segment_start(g, r.segments[i + 1])) > 1e-6) return false;
  // The access leg meets the road at its nearest point, then walks to a crossing.
  const auto proj = nearest_on_road(g, a);
  const auto node = nearest_node(g, proj->point);
  if (!near_point(segment_end(g, r.segments[0]), proj->point)) return false;
  if (!near_point(segment_end(g, r.segments[1]), g.find_node(*node)->pos)) return false;
  double sum = 0;
  for (const auto& s : r.segments) sum += segment_length(s);
  return std::abs(sum - r.total_length) < 1e-6;
}

double colocated_fraction(double sigma, int reps) {
  EpidemicParams params;
  params.sigma_per_h = sigma;
  const Space bus{PlaceKind::Vehicle, 1, {0, 0}, 0, false};
  int infected = 0;
  std::vector<Person> persons(2);
  std::vector<InfectionEvent> events;
  for (int r = 0; r < reps; ++r) {
    persons[0] = Person{};
    persons[0].id = PersonId(0);
    persons[0].status = InfectionStatus::Symptomatic;
    persons[1] = Person{};
    persons[1].id = PersonId(1);
    ContactAccumulator contacts;
    events.clear();
    Rng rng = substream(2024, "acceptance-mc", {static_cast<std::uint64_t>(r)});
    const Occupant who[] = {{PersonId(0), 0, 7200}, {PersonId(1), 0, 7200}};
    for (double t = 0; t < 7200; t += 60) step_contacts(bus, who, t, 60, persons, contacts, params, rng, events);
    infected += persons[1].status == InfectionStatus::Incubating;
  }
  return static_cast<double>(infected) / reps;
}

struct ToyRun {
  bool conserved = true;
  bool dag = true;
  RunSummary summary;
  std::size_t events = 0;
};

ToyRun run_toy(ScenarioConfig cfg) {
  const World world = build_world(cfg);
  Simulation sim(world, synthesize_population(world.city, cfg.demographics, cfg.seed), to_sim_config(cfg));
  sim.seed_infections(cfg.seeding.count);
  ToyRun out;
  const std::size_t n = sim.persons().size();
  sim.after_step = [&](const Simulation& s) { out.conserved &= total(s.collect_statistics().citywide) == n; };
  sim.run();
  for (const TickReport& r : sim.reports()) out.conserved &= total(r.citywide) == n;
  std::vector<InfectionStatus> state(n, InfectionStatus::Susceptible);
  for (const StatusChange& c : sim.transitions()) {
    out.dag &= state[raw(c.person)] == c.from && transition_allowed(c.from, c.to, c.seeded);
    state[raw(c.person)] = c.to;
  }
  for (std::size_t i = 0; i < n; ++i) out.dag &= state[i] == sim.persons()[i].status;
  out.summary = summarize(sim);
  out.events = sim.events().size();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <toy scenario yaml>\n", argv[0]);
    return 2;
  }
  spdlog::set_level(spdlog::level::warn);
  const std::filesystem::path toy = argv[1];
  const auto suite_start = std::chrono::steady_clock::now();

  criterion(1, "routing threshold rule on 1000 OD pairs", 5, [] {
    SyntheticCitySpec spec;
    spec.cols = 6;
    spec.rows = 6;
    spec.regions = {{RegionType::Housing, 36}};
    const World w = generate_synthetic_city(spec, 3);
    Rng rng(11);
    int good = 0, longer = 0;
    for (int i = 0; i < 1000; ++i) {
      const Point a{uniform(rng, 0, 6000), uniform(rng, 0, 6000)};
      const Point b{uniform(rng, 0, 6000), uniform(rng, 0, 6000)};
      good += conforms(w.roads, a, b, route_on_roads(w.roads, a, b));
      longer += distance(a, b) > 3000;
    }
    return Outcome{good == 1000, fmt::format("{}/1000 conform, {} composite", good, longer)};
  });

  criterion(2, "road shortest paths equal enumeration on 100 random 8-node graphs", 10, [] {
    Rng rng(8);
    int pairs = 0, bad = 0;
    for (int k = 0; k < 100; ++k) {
      const RoadGraph g = oracle::random_road_graph(8, 10, 2000, rng, k % 10 != 0);
      for (const RoadNode& a : g.nodes())
        for (const RoadNode& b : g.nodes()) {
          ++pairs;
          const auto want = oracle::shortest_by_enumeration(g, a.id, b.id);
          const auto got = shortest_path(g, a.id, b.id);
          if (want.has_value() != got.has_value() || (got && std::abs(got->length - *want) > 1e-9)) ++bad;
        }
    }
    return Outcome{bad == 0, fmt::format("{} pairs, {} mismatches", pairs, bad)};
  });

  criterion(3, "transit search agrees with BFS on 200 OD pairs", 30, [] {
    Rng rng(33);
    int agree = 0, routed = 0, transferred = 0;
    for (int net = 0; net < 10; ++net) {
      const TransitGraph g = oracle::random_transit(32 + 2 * net, 14, 5000, rng);
      for (int q = 0; q < 20; ++q) {
        const Point a{uniform(rng, 0, 5000), uniform(rng, 0, 5000)};
        const Point b{uniform(rng, 0, 5000), uniform(rng, 0, 5000)};
        auto rides = oracle::fewest_rides(g, a, b, 1000, 50);
        // The search expands at most eight levels, which allows six rides.
        if (rides && *rides > 6) rides.reset();
        const auto it = route_transit(g, a, b);
        const int want = rides ? *rides - 1 : -1;
        if (want == (it ? it->transfers : -1)) ++agree;
        routed += it.has_value();
        transferred += it && it->transfers > 0;
      }
    }
    return Outcome{agree == 200, fmt::format("{}/200 agree, {} routed, {} with transfers", agree, routed, transferred)};
  });

  criterion(4, "activity pattern shares within 1 pp at 1e5 draws", 5, [] {
    const AgendaConfig cfg;
    Rng rng(4);
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[sample_pattern(PersonClass::Adult, cfg, rng)];
    const std::map<std::string, double> table{
        {"HWH", 53.4}, {"HWH*H", 10.3}, {"HW*WH", 2.7}, {"HWHWH", 27.1}, {"HWHWH*H", 6.5}};
    double worst = 0;
    bool ok = counts.size() == table.size();
    for (const auto& [pattern, pct] : table) worst = std::max(worst, std::abs(100.0 * counts[pattern] / n - pct));
    ok &= worst <= 1.0;
    return Outcome{ok, fmt::format("largest deviation {:.3f} pp", worst)};
  });

  criterion(5, "infection probability closed form and hazard factorization", 1, [] {
    double worst = 0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double sigma = 0.05 * (i + 1) * (i + 1), seconds = 600.0 * j * j;
        worst = std::max(worst, std::abs(infection_probability(sigma, seconds) - (1 - std::exp(-sigma * seconds / 3600))));
      }
    double worst_f = 0;
    for (double sigma : {0.1, 0.3, 1.0, 3.0})
      for (int steps : {2, 10, 120, 1440}) {
        double survive = 1;
        for (int k = 0; k < steps; ++k) survive *= 1 - infection_probability(sigma, 60);
        worst_f = std::max(worst_f, std::abs((1 - survive) - infection_probability(sigma, 60.0 * steps)));
      }
    return Outcome{worst <= 1e-12 && worst_f <= 1e-9, fmt::format("grid error {:.2e}, factorization error {:.2e}", worst, worst_f)};
  });

  criterion(6, "two-hour co-location Monte Carlo within 3 SE", 60, [] {
    const int reps = 100000;
    bool ok = true;
    std::string detail;
    for (double sigma : {0.1, 0.3, 1.0}) {
      const double p = 1 - std::exp(-2 * sigma);
      const double se = std::sqrt(p * (1 - p) / reps);
      const double got = colocated_fraction(sigma, reps);
      ok &= std::abs(got - p) <= 3 * se;
      detail += fmt::format("{}sigma {}: {:.4f} vs {:.4f} ({:+.2f} SE)", detail.empty() ? "" : ", ", sigma, got, p,
                            (got - p) / se);
    }
    return Outcome{ok, detail};
  });

  criterion(7, "stage durations in range and uniform", 5, [] {
    const EpidemicParams params;
    Rng rng(7);
    bool ok = params.incubation.lo_days == 1 && params.incubation.hi_days == 2 && params.symptomatic.lo_days == 1 &&
              params.symptomatic.hi_days == 7 && params.vaccination.lo_days == 7 && params.vaccination.hi_days == 21;
    double worst_ks = 0;
    int outside = 0;
    for (const DayRange& r : {params.incubation, params.symptomatic, params.vaccination}) {
      std::vector<double> days;
      for (int i = 0; i < 10000; ++i) {
        const double d = sample_stage_seconds(r, rng) / kDaySeconds;
        outside += d < r.lo_days || d > r.hi_days;
        days.push_back(d);
      }
      worst_ks = std::max(worst_ks, oracle::ks_uniform(days, r.lo_days, r.hi_days));
    }
    ok &= outside == 0 && worst_ks < oracle::ks_critical_001(10000);
    return Outcome{ok, fmt::format("{} out of range, KS {:.4f} < {:.4f}", outside, worst_ks, oracle::ks_critical_001(10000))};
  });

  criterion(8, "toy epidemic over 20 seeds", 600, [&] {
    const ScenarioConfig base = load_scenario(toy);
    int single = 0;
    bool conserved = true, dag = true;
    std::string attack;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ScenarioConfig cfg = base;
      cfg.seed = seed;
      const ToyRun r = run_toy(cfg);
      conserved &= r.conserved;
      dag &= r.dag;
      const bool good = r.summary.curve.single_peak && r.summary.attack_rate > 0 && r.summary.attack_rate < 1;
      single += good;
      attack += fmt::format("{}{:.2f}", attack.empty() ? "" : " ", r.summary.attack_rate);
    }
    return Outcome{conserved && dag && single >= 18,
                   fmt::format("conservation {}, DAG {}, {}/20 single peak in (0,1); attack rates {}",
                               conserved ? "ok" : "broken", dag ? "ok" : "broken", single, attack)};
  });

  criterion(9, "three identical runs give byte-identical event logs", 120, [&] {
    const ScenarioConfig cfg = load_scenario(toy);
    const auto root = std::filesystem::temp_directory_path() / "citysim-acceptance-determinism";
    std::filesystem::remove_all(root);
    std::vector<std::string> logs;
    for (int k = 0; k < 3; ++k) {
      const auto dir = root / std::to_string(k);
      run_scenario(cfg, dir);
      logs.push_back(slurp(dir / "events.csv"));
    }
    std::filesystem::remove_all(root);
    const bool same = logs[0] == logs[1] && logs[1] == logs[2];
    const auto lines = std::count(logs[0].begin(), logs[0].end(), '\n');
    return Outcome{same && lines > 1, fmt::format("{} event lines, {}", lines - 1, same ? "identical" : "different")};
  });

  criterion(10, "zero sigma gives only the index cases", 60, [&] {
    ScenarioConfig cfg = load_scenario(toy);
    cfg.epidemic.sigma_per_h = 0.0;
    const ToyRun r = run_toy(cfg);
    const bool ok = r.events == 0 && r.summary.seeded == cfg.seeding.count &&
                    r.summary.ever_infected == cfg.seeding.count && r.conserved && r.dag;
    return Outcome{ok, fmt::format("{} events, {} seeded, {} ever infected", r.events, r.summary.seeded,
                                   r.summary.ever_infected)};
  });

  const double total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  fmt::print("{} of 10 criteria passed in {:.1f} s\n", 10 - failures, total_s);
  return failures == 0 ? 0 : 1;
}
