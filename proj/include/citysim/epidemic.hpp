#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citysim/city.hpp"
#include "citysim/clock.hpp"
#include "citysim/population.hpp"
#include "citysim/rng.hpp"

namespace citysim {

struct DayRange {
  double lo_days = 1.0;
  double hi_days = 1.0;

  friend bool operator==(const DayRange&, const DayRange&) = default;
};

struct EpidemicParams {
  double sigma_per_h = 0.0;  // transmission events per hour of close contact
  double d_star_m = 2.0;
  double outdoor_factor = 0.5;
  DayRange incubation{1.0, 2.0};
  DayRange symptomatic{1.0, 7.0};
  DayRange vaccination{7.0, 21.0};
  double mortality = 0.0;  // chance of death at the end of the symptomatic stage

  friend bool operator==(const EpidemicParams&, const EpidemicParams&) = default;
};

// Out-of-range fields, empty when the parameters are usable.
std::vector<std::string> check_params(const EpidemicParams& p);

// 1 - exp(-sigma * T), sigma per hour and T in seconds. Throws
// std::domain_error on negative input.
double infection_probability(double sigma_per_h, double contact_s);

// Uniform draw from the range, in seconds.
double sample_stage_seconds(const DayRange& range, Rng& rng);

enum class PlaceKind { Housing, Office, Classroom, PatientRoom, Recreational, Vehicle };

inline constexpr PlaceKind kAllPlaceKinds[] = {PlaceKind::Housing,     PlaceKind::Office,       PlaceKind::Classroom,
                                               PlaceKind::PatientRoom, PlaceKind::Recreational, PlaceKind::Vehicle};

std::string_view to_string(PlaceKind k);
PlaceKind place_kind(SlClass cls);

// A space in which people can infect each other: a sublocation disc, or a
// vehicle where everyone on board counts as in contact.
struct Space {
  PlaceKind kind = PlaceKind::Housing;
  std::uint64_t id = 0;  // sublocation id, or the vehicle key
  Point center;
  double radius = 0.0;
  bool outdoor = false;

  bool colocated() const { return kind == PlaceKind::Vehicle; }
};

Space space_of(const Sublocation& sl);

// Someone inside a space for the part [from, to) of the current step.
struct Occupant {
  PersonId person{};
  double from = 0.0;
  double to = 0.0;
};

struct InfectionEvent {
  double time = 0.0;
  PlaceKind kind = PlaceKind::Housing;
  std::uint64_t place = 0;
  PersonId infector{};
  PersonId infectee{};
};

// Accumulated close-contact seconds per (infectious, susceptible) pair during
// one shared stay.
class ContactAccumulator {
 public:
  void add(PersonId infector, PersonId infectee, double seconds) { time_[{infector, infectee}] += seconds; }
  double get(PersonId infector, PersonId infectee) const;
  // Forget every pair involving `person` (they left the space).
  void reset(PersonId person);
  std::size_t size() const { return time_.size(); }

 private:
  std::map<std::pair<PersonId, PersonId>, double> time_;
};

// Status changes applied directly to a person.
void infect(Person& p, double now, const EpidemicParams& params, Rng& rng);
void make_symptomatic(Person& p, double now, const EpidemicParams& params, Rng& rng);
void vaccinate(Person& p, double now, const EpidemicParams& params, Rng& rng);

// Whether `p` can still catch the disease.
bool infectable(const Person& p);

struct StatusChange {
  double time = 0.0;
  PersonId person{};
  InfectionStatus from = InfectionStatus::Susceptible;
  InfectionStatus to = InfectionStatus::Susceptible;
  bool seeded = false;
};

// Edges of the disease progression graph. Index cases jump straight to
// symptomatic and are audited with `seeded` set.
bool transition_allowed(InfectionStatus from, InfectionStatus to, bool seeded = false);

// Applies every scheduled transition due at or before `now`.
void progress_disease(Person& p, double now, const EpidemicParams& params, Rng& rng, std::vector<StatusChange>* log = nullptr);

// One time step inside one space, covering [t, t + dt). Positions inside
// the disc are re-sampled, close pairs accumulate contact time and each
// (symptomatic, infectable) pair gets one infection trial for the time it
// was close. Occupants must be sorted by person id.
void step_contacts(const Space& space, std::span<const Occupant> occupants, double t, double dt,
                   std::vector<Person>& persons, ContactAccumulator& contacts, const EpidemicParams& params, Rng& rng,
                   std::vector<InfectionEvent>& events, std::vector<StatusChange>* log = nullptr);

}  // namespace citysim
