#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "citysim/epidemic.hpp"
#include "oracles.hpp"

using namespace citysim;

namespace {

std::vector<Person> pair_of(InfectionStatus a, InfectionStatus b) {
  std::vector<Person> persons(2);
  persons[0].id = PersonId(0);
  persons[0].status = a;
  persons[1].id = PersonId(1);
  persons[1].status = b;
  return persons;
}

// Fraction of `reps` susceptible people infected by one symptomatic person
// over `hours` in `space`, stepping `dt` seconds at a time.
double infected_fraction(const Space& space, const EpidemicParams& params, double hours, double dt, int reps,
                         std::uint64_t seed) {
  int infected = 0;
  for (int r = 0; r < reps; ++r) {
    auto persons = pair_of(InfectionStatus::Symptomatic, InfectionStatus::Susceptible);
    ContactAccumulator contacts;
    std::vector<InfectionEvent> events;
    Rng rng = substream(seed, "mc", {static_cast<std::uint64_t>(r)});
    const Occupant who[] = {{PersonId(0), 0, hours * 3600}, {PersonId(1), 0, hours * 3600}};
    for (double t = 0; t < hours * 3600 - 1e-9; t += dt)
      step_contacts(space, who, t, dt, persons, contacts, params, rng, events);
    infected += persons[1].status == InfectionStatus::Incubating;
  }
  return static_cast<double>(infected) / reps;
}

}  // namespace

TEST_SUITE("epidemic") {
  TEST_CASE("infection probability is 1 - exp(-sigma T)") {
    for (double sigma : {0.0, 0.05, 0.3, 1.0, 4.0})
      for (double hours : {0.0, 0.01, 0.5, 2.0, 24.0})
        CHECK(infection_probability(sigma, hours * 3600) == doctest::Approx(1 - std::exp(-sigma * hours)).epsilon(1e-12));
    CHECK(infection_probability(0.3, 0) == 0.0);
    CHECK_THROWS_AS(infection_probability(-0.1, 10), std::domain_error);
    CHECK_THROWS_AS(infection_probability(0.1, -10), std::domain_error);
  }

  TEST_CASE("hazards over several steps multiply out") {
    const double sigma = 0.7;
    double survive = 1;
    for (int k = 0; k < 120; ++k) survive *= 1 - infection_probability(sigma, 60);
    CHECK(std::abs((1 - survive) - infection_probability(sigma, 7200)) < 1e-9);
  }

  TEST_CASE("stage durations stay in their ranges and look uniform") {
    const EpidemicParams params;
    Rng rng(3);
    for (const DayRange& r : {params.incubation, params.symptomatic, params.vaccination}) {
      std::vector<double> days;
      for (int i = 0; i < 10000; ++i) {
        const double d = sample_stage_seconds(r, rng) / kDaySeconds;
        REQUIRE(d >= r.lo_days);
        REQUIRE(d <= r.hi_days);
        days.push_back(d);
      }
      CHECK(oracle::ks_uniform(days, r.lo_days, r.hi_days) < oracle::ks_critical_001(days.size()));
    }
  }

  TEST_CASE("colocated exposure matches the closed form") {
    EpidemicParams params;
    params.sigma_per_h = 0.3;
    const Space bus{PlaceKind::Vehicle, 1, {0, 0}, 0, false};
    const int reps = 20000;
    const double p = 1 - std::exp(-0.6);
    const double got = infected_fraction(bus, params, 2, 60, reps, 1);
    CHECK(std::abs(got - p) < 3 * std::sqrt(p * (1 - p) / reps));
  }

  TEST_CASE("outdoor spaces scale sigma") {
    EpidemicParams params;
    params.sigma_per_h = 1.0;
    params.outdoor_factor = 0.5;
    // A disc this small keeps everyone within the contact distance.
    const Space park{PlaceKind::Recreational, 1, {0, 0}, 0.9, true};
    const int reps = 20000;
    const double p = 1 - std::exp(-1.0);
    const double got = infected_fraction(park, params, 2, 60, reps, 2);
    CHECK(std::abs(got - p) < 3 * std::sqrt(p * (1 - p) / reps));
  }

  TEST_CASE("contact only counts inside the contact distance") {
    EpidemicParams params;
    params.sigma_per_h = 1.0;
    params.d_star_m = 2.0;
    const Space room{PlaceKind::Office, 1, {0, 0}, 10.0, false};
    // Chance that two uniform points in the disc are within the contact
    // distance, estimated directly.
    Rng rng(4);
    int close = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
      auto draw = [&] {
        const double r = 10 * std::sqrt(uniform01(rng)), th = 2 * std::acos(-1.0) * uniform01(rng);
        return Point{r * std::cos(th), r * std::sin(th)};
      };
      close += distance(draw(), draw()) <= 2.0;
    }
    const double q = static_cast<double>(close) / n;
    // With one trial per step, infection per step is q * (1 - exp(-sigma dt)).
    const double per_step = q * infection_probability(1.0, 60);
    const double p = 1 - std::pow(1 - per_step, 120);
    const int reps = 20000;
    const double got = infected_fraction(room, params, 2, 60, reps, 5);
    CHECK(std::abs(got - p) < 3.5 * std::sqrt(p * (1 - p) / reps));
  }

  TEST_CASE("partial presence shortens the exposure") {
    EpidemicParams params;
    params.sigma_per_h = 1e6;
    const Space bus{PlaceKind::Vehicle, 9, {0, 0}, 0, false};
    auto persons = pair_of(InfectionStatus::Symptomatic, InfectionStatus::Susceptible);
    ContactAccumulator contacts;
    std::vector<InfectionEvent> events;
    Rng rng(6);
    const Occupant who[] = {{PersonId(0), 0, 60}, {PersonId(1), 45, 60}};
    step_contacts(bus, who, 0, 60, persons, contacts, params, rng, events);
    CHECK(contacts.get(PersonId(0), PersonId(1)) == doctest::Approx(15));
    REQUIRE(events.size() == 1);
    CHECK(events[0].time == 45);
    CHECK(events[0].kind == PlaceKind::Vehicle);
    CHECK(events[0].place == 9);
    CHECK(events[0].infector == PersonId(0));
    CHECK(persons[1].status == InfectionStatus::Incubating);
    contacts.reset(PersonId(1));
    CHECK(contacts.size() == 0);
  }

  TEST_CASE("only symptomatic people infect and only susceptible ones catch it") {
    EpidemicParams params;
    params.sigma_per_h = 1000.0;
    const Space bus{PlaceKind::Vehicle, 1, {0, 0}, 0, false};
    const Occupant who[] = {{PersonId(0), 0, 60}, {PersonId(1), 0, 60}};
    for (auto [a, b] : {std::pair{InfectionStatus::Incubating, InfectionStatus::Susceptible},
                        std::pair{InfectionStatus::Symptomatic, InfectionStatus::Recovered},
                        std::pair{InfectionStatus::Symptomatic, InfectionStatus::Immunized},
                        std::pair{InfectionStatus::Dead, InfectionStatus::Susceptible}}) {
      auto persons = pair_of(a, b);
      ContactAccumulator contacts;
      std::vector<InfectionEvent> events;
      Rng rng(7);
      step_contacts(bus, who, 0, 60, persons, contacts, params, rng, events);
      CHECK(events.empty());
    }
    auto immune = pair_of(InfectionStatus::Symptomatic, InfectionStatus::Susceptible);
    immune[1].immune = true;
    ContactAccumulator contacts;
    std::vector<InfectionEvent> events;
    Rng rng(8);
    step_contacts(bus, who, 0, 60, immune, contacts, params, rng, events);
    CHECK(events.empty());
    auto pending = pair_of(InfectionStatus::Symptomatic, InfectionStatus::VaccinatedPending);
    step_contacts(bus, who, 0, 60, pending, contacts, params, rng, events);
    CHECK(events.size() == 1);
  }

  TEST_CASE("susceptibility scales the chance") {
    EpidemicParams params;
    params.sigma_per_h = 0.5;
    const Space bus{PlaceKind::Vehicle, 1, {0, 0}, 0, false};
    int infected = 0;
    const int reps = 40000;
    for (int r = 0; r < reps; ++r) {
      auto persons = pair_of(InfectionStatus::Symptomatic, InfectionStatus::Susceptible);
      persons[1].susceptibility = 0.4;
      ContactAccumulator contacts;
      std::vector<InfectionEvent> events;
      Rng rng = substream(9, "s", {static_cast<std::uint64_t>(r)});
      const Occupant who[] = {{PersonId(0), 0, 3600}, {PersonId(1), 0, 3600}};
      step_contacts(bus, who, 0, 3600, persons, contacts, params, rng, events);
      infected += !events.empty();
    }
    const double p = 0.4 * (1 - std::exp(-0.5));
    CHECK(std::abs(infected / double(reps) - p) < 3 * std::sqrt(p * (1 - p) / reps));
  }

  TEST_CASE("progression follows the transition graph") {
    EpidemicParams params;
    params.mortality = 0.5;
    Rng rng(10);
    int dead = 0;
    for (int i = 0; i < 4000; ++i) {
      Person p;
      p.id = PersonId(static_cast<std::uint32_t>(i));
      std::vector<StatusChange> log;
      infect(p, 100, params, rng);
      progress_disease(p, 1e9, params, rng, &log);
      REQUIRE(log.size() == 2);
      CHECK(log[0].from == InfectionStatus::Incubating);
      CHECK(log[0].to == InfectionStatus::Symptomatic);
      CHECK(log[0].time - 100 >= kDaySeconds);
      CHECK(log[0].time - 100 <= 2 * kDaySeconds);
      CHECK(log[1].time - log[0].time >= kDaySeconds);
      CHECK(log[1].time - log[0].time <= 7 * kDaySeconds);
      for (const StatusChange& c : log) CHECK(transition_allowed(c.from, c.to));
      dead += p.status == InfectionStatus::Dead;
    }
    CHECK(dead / 4000.0 == doctest::Approx(0.5).epsilon(0.1));

    Person v;
    vaccinate(v, 0, params, rng);
    std::vector<StatusChange> log;
    progress_disease(v, 6 * kDaySeconds, params, rng, &log);
    CHECK(log.empty());
    progress_disease(v, 21 * kDaySeconds, params, rng, &log);
    REQUIRE(log.size() == 1);
    CHECK(log[0].to == InfectionStatus::Immunized);
  }

  TEST_CASE("transition graph edges") {
    using S = InfectionStatus;
    CHECK(transition_allowed(S::Susceptible, S::Incubating));
    CHECK(transition_allowed(S::Susceptible, S::VaccinatedPending));
    CHECK(transition_allowed(S::VaccinatedPending, S::Incubating));
    CHECK(transition_allowed(S::VaccinatedPending, S::Immunized));
    CHECK(transition_allowed(S::Incubating, S::Symptomatic));
    CHECK(transition_allowed(S::Symptomatic, S::Recovered));
    CHECK(transition_allowed(S::Symptomatic, S::Dead));
    CHECK_FALSE(transition_allowed(S::Susceptible, S::Symptomatic));
    CHECK(transition_allowed(S::Susceptible, S::Symptomatic, true));
    CHECK_FALSE(transition_allowed(S::Recovered, S::Incubating));
    CHECK_FALSE(transition_allowed(S::Immunized, S::Incubating));
    CHECK_FALSE(transition_allowed(S::Dead, S::Recovered));
  }

  TEST_CASE("parameter checks") {
    CHECK(check_params(EpidemicParams{}).empty());
    EpidemicParams bad;
    bad.sigma_per_h = -1;
    bad.incubation = {3, 2};
    bad.mortality = 2;
    CHECK(check_params(bad).size() == 3);
  }
}
