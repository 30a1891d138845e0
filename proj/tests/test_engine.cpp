#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "citysim/engine.hpp"
#include "citysim/errors.hpp"
#include "citysim/synthetic_city.hpp"

using namespace citysim;

namespace {

SyntheticCitySpec small_spec() {
  SyntheticCitySpec s;
  s.cols = 2;
  s.rows = 2;
  s.regions = {{RegionType::Housing, 1}, {RegionType::Office, 1}, {RegionType::School, 1}, {RegionType::Medical, 1}};
  s.sublocations_by_type = {{RegionType::Housing, 40}, {RegionType::Office, 9}, {RegionType::School, 4},
                            {RegionType::Medical, 4}};
  s.sublocation_radius_m = 4;
  s.lines = 1;
  s.headway_s = 300;
  return s;
}

const World& small_world() {
  static const World w = generate_synthetic_city(small_spec(), 1);
  return w;
}

SimConfig config(double sigma, int days, std::uint64_t seed) {
  SimConfig cfg;
  cfg.epidemic.sigma_per_h = sigma;
  cfg.days = days;
  cfg.seed = seed;
  for (ModalSplit& m : cfg.agenda.modal_split) m = {0.2, 0.1, 0.2, 0.5};
  return cfg;
}

Simulation make(double sigma, int days, std::uint64_t seed, std::size_t people = 200) {
  const World& w = small_world();
  return Simulation(w, synthesize_population(w.city, default_demographics(people), seed), config(sigma, days, seed));
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("status counts are conserved and every transition is allowed") {
    Simulation sim = make(2.0, 6, 3);
    sim.seed_infections(3);
    bool conserved = true;
    sim.after_step = [&](const Simulation& s) {
      const TickReport r = s.collect_statistics();
      conserved &= total(r.citywide) == s.persons().size();
      StatusCounts sum{};
      for (const StatusCounts& c : r.by_region)
        for (std::size_t k = 0; k < c.size(); ++k) sum[k] += c[k];
      conserved &= sum == r.citywide;
    };
    sim.run();
    CHECK(conserved);
    CHECK(sim.events().size() > 0);
    for (const StatusChange& c : sim.transitions()) CHECK(transition_allowed(c.from, c.to, c.seeded));
    // Each person's log is a path through the graph.
    std::vector<InfectionStatus> state(sim.persons().size(), InfectionStatus::Susceptible);
    for (const StatusChange& c : sim.transitions()) {
      CHECK(state[raw(c.person)] == c.from);
      state[raw(c.person)] = c.to;
    }
    for (std::size_t i = 0; i < state.size(); ++i) CHECK(state[i] == sim.persons()[i].status);
    CHECK(sim.reports().size() == 6 * 24 + 1);
  }

  TEST_CASE("every infection event has a matching status change") {
    Simulation sim = make(2.0, 4, 5);
    sim.seed_infections(2);
    sim.run();
    for (const InfectionEvent& e : sim.events()) {
      const auto it = std::find_if(sim.transitions().begin(), sim.transitions().end(), [&](const StatusChange& c) {
        return c.person == e.infectee && c.to == InfectionStatus::Incubating;
      });
      REQUIRE(it != sim.transitions().end());
      CHECK(it->time == e.time);
      CHECK(e.infector != e.infectee);
    }
  }

  TEST_CASE("nobody moves faster than the fastest vehicle") {
    Simulation sim = make(0.0, 2, 7);
    std::vector<AgentView> prev = sim.agents();
    const double limit = sim.max_speed() * sim.config().dt_s + 1e-6;
    double worst = 0;
    std::size_t rode = 0;
    sim.after_step = [&](const Simulation& s) {
      const auto now = s.agents();
      for (std::size_t i = 0; i < now.size(); ++i) {
        worst = std::max(worst, distance(prev[i].position, now[i].position));
        rode += now[i].motion == Motion::Riding;
      }
      prev = now;
    };
    sim.run();
    CHECK(worst <= limit);
    CHECK(rode > 0);
  }

  TEST_CASE("agents stay inside their sublocation while there") {
    Simulation sim = make(0.0, 1, 8);
    bool ok = true;
    sim.after_step = [&](const Simulation& s) {
      for (const AgentView& a : s.agents())
        if (a.motion == Motion::AtSublocation) ok &= a.position == s.world().city.sublocation(a.last_sl).center;
    };
    sim.run();
    CHECK(ok);
  }

  TEST_CASE("boardings balance alightings") {
    Simulation sim = make(0.0, 2, 9);
    sim.after_step = [](const Simulation& s) { CHECK(s.boardings() == s.alightings() + s.riders()); };
    sim.run();
    CHECK(sim.boardings() > 0);
  }

  TEST_CASE("identical inputs replay identically") {
    auto trace = [](std::uint64_t seed) {
      Simulation sim = make(1.5, 5, seed);
      sim.seed_infections(2);
      sim.run();
      std::vector<std::tuple<double, std::uint64_t, std::uint32_t, std::uint32_t>> out;
      for (const InfectionEvent& e : sim.events()) out.push_back({e.time, e.place, raw(e.infector), raw(e.infectee)});
      return out;
    };
    const auto a = trace(11), b = trace(11), c = trace(12);
    CHECK(a == b);
    CHECK(a != c);
  }

  TEST_CASE("zero sigma transmits nothing") {
    Simulation sim = make(0.0, 10, 13);
    sim.seed_infections(5);
    sim.run();
    CHECK(sim.events().empty());
    CHECK(sim.seeds().size() == 5);
    const auto& last = sim.reports().back().citywide;
    CHECK(last[static_cast<std::size_t>(InfectionStatus::Recovered)] == 5);
    CHECK(last[static_cast<std::size_t>(InfectionStatus::Susceptible)] == sim.persons().size() - 5);
  }

  TEST_CASE("seeding picks distinct susceptible people") {
    Simulation sim = make(0.0, 1, 14, 50);
    sim.seed_infections(50);
    CHECK(sim.seeds().size() == 50);
    Simulation more = make(0.0, 1, 14, 50);
    CHECK_THROWS_AS(more.seed_infections(51), InsufficientSusceptibles);
    Simulation by_id = make(0.0, 1, 14, 50);
    const PersonId ids[] = {PersonId(3), PersonId(7)};
    by_id.seed_infections(ids);
    CHECK(by_id.persons()[3].status == InfectionStatus::Symptomatic);
    CHECK_THROWS_AS(by_id.seed_infections(ids), InsufficientSusceptibles);
  }

  TEST_CASE("vaccination protects a fraction of the susceptible") {
    Simulation sim = make(0.0, 30, 15, 400);
    CHECK(sim.vaccinate_fraction(0.25) == 100);
    sim.run();
    std::size_t immunized = 0;
    for (const Person& p : sim.persons()) immunized += p.status == InfectionStatus::Immunized;
    CHECK(immunized == 100);
  }

  TEST_CASE("the dead stay home") {
    SimConfig cfg = config(3.0, 12, 16);
    cfg.epidemic.mortality = 1.0;
    const World& w = small_world();
    Simulation sim(w, synthesize_population(w.city, default_demographics(200), 16), cfg);
    sim.seed_infections(5);
    sim.run();
    std::size_t dead = 0;
    for (const Person& p : sim.persons()) {
      if (p.status != InfectionStatus::Dead || p.status_since > 10 * kDaySeconds) continue;
      ++dead;
      const DailyAgenda& a = sim.agenda_of(p.id);
      REQUIRE(a.items.size() == 1);
      CHECK(std::get<Activity>(a.items[0]).sl == p.housing);
    }
    CHECK(dead >= 5);
  }

  TEST_CASE("infections are attributed to place kinds") {
    Simulation sim = make(2.0, 5, 17);
    sim.seed_infections(3);
    sim.run();
    std::uint64_t sum = 0;
    for (std::uint64_t n : sim.reports().back().infections_by_place) sum += n;
    CHECK(sum == sim.events().size());
  }

  TEST_CASE("vehicle keys") {
    const std::uint64_t k = vehicle_key(3, 12345);
    CHECK(vehicle_line(k) == 3);
    CHECK(vehicle_trip(k) == 12345);
    CHECK(describe_place(small_world(), PlaceKind::Vehicle, vehicle_key(1, 4)) == "1:1:4");
    CHECK(describe_place(small_world(), PlaceKind::Housing, 17) == "17");
  }

  TEST_CASE("curve shapes") {
    const std::vector<double> single{1, 3, 8, 15, 20, 18, 12, 7, 3, 1, 0, 0};
    CHECK(analyze_curve(single).single_peak);
    const std::vector<double> twin{1, 10, 20, 10, 2, 1, 10, 20, 10, 1, 0, 0};
    CHECK_FALSE(analyze_curve(twin).single_peak);
    const std::vector<double> still_high{1, 5, 10, 15, 20, 20, 19};
    CHECK_FALSE(analyze_curve(still_high).single_peak);
    const std::vector<double> flat_out{5, 3, 1, 0, 0};
    CHECK_FALSE(analyze_curve(flat_out).single_peak);
    // Small wiggles are smoothed away.
    const std::vector<double> noisy{1, 4, 9, 16, 22, 21, 23, 17, 10, 5, 2, 1};
    CHECK(analyze_curve(noisy).single_peak);
  }
}
