#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "citysim/agenda.hpp"
#include "citysim/epidemic.hpp"
#include "citysim/population.hpp"
#include "citysim/travel.hpp"

namespace citysim {

struct SimConfig {
  AgendaConfig agenda;
  BehaviorPolicy policy;
  EpidemicParams epidemic;
  TravelConfig travel;
  double dt_s = 60.0;
  int days = 1;
  std::uint64_t seed = 0;
  double report_every_s = 3600.0;
};

using StatusCounts = std::array<std::uint32_t, std::size(kAllStatuses)>;

std::size_t total(const StatusCounts& c);

struct TickReport {
  double time = 0.0;
  StatusCounts citywide{};
  std::vector<StatusCounts> by_region;  // same order as CityModel::regions()
  std::array<std::uint64_t, std::size(kAllPlaceKinds)> infections_by_place{};  // cumulative
};

enum class Motion { AtSublocation, Traveling, Riding };

std::string_view to_string(Motion m);

struct AgentView {
  PersonId person{};
  Motion motion = Motion::AtSublocation;
  Point position;
  SublocationId last_sl{};
  std::optional<std::uint64_t> vehicle;
  InfectionStatus status = InfectionStatus::Susceptible;
};

// Vehicle `trip` of directed line `line` leaves the first stop at
// trip * headway.
std::uint64_t vehicle_key(std::size_t line, std::uint64_t trip);
std::size_t vehicle_line(std::uint64_t key);
std::uint64_t vehicle_trip(std::uint64_t key);

// Readable place id for logs: the sublocation id, or line:direction:trip.
std::string describe_place(const World& world, PlaceKind kind, std::uint64_t place);

class Simulation {
 public:
  Simulation(const World& world, Population population, SimConfig cfg);

  // Index cases become symptomatic at the current clock. Throws
  // InsufficientSusceptibles when there are not enough candidates.
  void seed_infections(std::size_t count);
  void seed_infections(std::span<const PersonId> ids);
  // Vaccinates round(fraction * susceptible count) randomly chosen
  // susceptible people at the current clock; returns how many.
  std::size_t vaccinate_fraction(double fraction);

  // Advances the clock by one time step.
  void step();
  // Steps until the horizon, recording a TickReport every
  // `report_every_s` (and at the start and end).
  void run();

  double clock() const { return clock_; }
  double horizon() const { return cfg_.days * kDaySeconds; }
  bool finished() const { return clock_ >= horizon(); }
  std::uint64_t tick() const { return tick_; }

  TickReport collect_statistics() const;
  std::vector<AgentView> agents() const;
  Point vehicle_position(std::uint64_t key, double t) const;
  double max_speed() const;

  const World& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  const std::vector<Person>& persons() const { return pop_.persons; }
  const Population& population() const { return pop_; }
  const std::vector<InfectionEvent>& events() const { return events_; }
  const std::vector<StatusChange>& transitions() const { return transitions_; }
  const std::vector<TickReport>& reports() const { return reports_; }
  const std::vector<PersonId>& seeds() const { return seeds_; }
  const DailyAgenda& agenda_of(PersonId p) const { return agents_[raw(p)].agenda; }
  std::uint64_t boardings() const { return boardings_; }
  std::uint64_t alightings() const { return alightings_; }
  std::size_t riders() const;

  // Called after every step() made by run().
  std::function<void(const Simulation&)> after_step;

 private:
  struct Phase {
    enum class Kind : std::uint8_t { Stay, Move, Wait, Ride };
    Kind kind = Kind::Stay;
    double t0 = 0.0;
    double t1 = 0.0;
    std::uint32_t sl = 0;                      // Stay: sublocation index
    Point a, b;                                // Move (straight) / Wait
    const std::vector<Point>* path = nullptr;  // Move along a road route
    std::uint64_t vehicle = 0;                 // Ride
  };

  struct Agent {
    DailyAgenda agenda;
    std::optional<DailyAgenda> upcoming;
    double day_start = 0.0;
    std::size_t item = 0;
    std::vector<Phase> phases;
    std::size_t phase = 0;
    SublocationId last_sl{};
  };

  struct Presence {
    std::uint64_t space = 0;  // sublocation index, or kVehicleBit | vehicle key
    Occupant who;
  };

  void start_day();
  void advance(Agent& agent, PersonId id, double window_end);
  void enter_next(Agent& agent, PersonId id, double now);
  void expand_item(Agent& agent, double now);
  void add_leg_phases(Agent& agent, const TravelLeg& leg, double now);
  Point phase_position(const Phase& ph, double t) const;
  void apply_seed(Person& p);

  const World& world_;
  Population pop_;
  SimConfig cfg_;
  TravelPlanner planner_;
  std::vector<Agent> agents_;
  std::vector<std::uint32_t> region_of_sl_;
  std::vector<std::vector<Point>> line_points_;
  ContactAccumulator contacts_;
  std::vector<InfectionEvent> events_;
  std::vector<StatusChange> transitions_;
  std::vector<TickReport> reports_;
  std::vector<PersonId> seeds_;
  std::array<std::uint64_t, std::size(kAllPlaceKinds)> place_counts_{};
  std::vector<Presence> presence_;
  double clock_ = 0.0;
  std::uint64_t tick_ = 0;
  int day_ = -1;
  std::uint64_t boardings_ = 0;
  std::uint64_t alightings_ = 0;
};

struct CurveShape {
  bool single_peak = false;
  std::size_t prominent_peaks = 0;
  std::size_t peak_index = 0;
  double peak_value = 0.0;
};

// Shape of an epidemic curve after a centred moving average of width
// `smoothing`: a single peak means exactly one local maximum whose
// prominence is at least `prominence_fraction` of the maximum, a rise from
// the first value and a fall to at most half the maximum by the end.
CurveShape analyze_curve(std::span<const double> series, std::size_t smoothing = 3, double prominence_fraction = 0.25);

}  // namespace citysim
