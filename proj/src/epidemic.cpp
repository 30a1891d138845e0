#include "citysim/epidemic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace citysim {

std::vector<std::string> check_params(const EpidemicParams& p) {
  std::vector<std::string> problems;
  if (!(p.sigma_per_h >= 0.0)) problems.push_back("sigma must be >= 0");
  if (!(p.d_star_m > 0.0)) problems.push_back("d_star must be > 0");
  if (!(p.outdoor_factor > 0.0 && p.outdoor_factor <= 1.0)) problems.push_back("outdoor_factor must be in (0,1]");
  const std::pair<const char*, const DayRange*> ranges[] = {
      {"incubation", &p.incubation}, {"symptomatic", &p.symptomatic}, {"vaccination", &p.vaccination}};
  for (const auto& [name, r] : ranges)
    if (!(r->lo_days > 0.0 && r->lo_days <= r->hi_days))
      problems.push_back(std::string(name) + " range must satisfy 0 < lo <= hi");
  if (!(p.mortality >= 0.0 && p.mortality <= 1.0)) problems.push_back("mortality must be in [0,1]");
  return problems;
}

double infection_probability(double sigma_per_h, double contact_s) {
  if (sigma_per_h < 0.0 || contact_s < 0.0 || std::isnan(sigma_per_h) || std::isnan(contact_s))
    throw std::domain_error("infection_probability: negative rate or contact time");
  return -std::expm1(-sigma_per_h * contact_s / 3600.0);
}

double sample_stage_seconds(const DayRange& range, Rng& rng) {
  return uniform(rng, range.lo_days, range.hi_days) * kDaySeconds;
}

std::string_view to_string(PlaceKind k) {
  switch (k) {
    case PlaceKind::Housing: return "housing";
    case PlaceKind::Office: return "office";
    case PlaceKind::Classroom: return "classroom";
    case PlaceKind::PatientRoom: return "patient_room";
    case PlaceKind::Recreational: return "recreational";
    case PlaceKind::Vehicle: return "vehicle";
  }
  return "?";
}

PlaceKind place_kind(SlClass cls) {
  switch (cls) {
    case SlClass::Housing: return PlaceKind::Housing;
    case SlClass::Office: return PlaceKind::Office;
    case SlClass::Classroom: return PlaceKind::Classroom;
    case SlClass::PatientRoom: return PlaceKind::PatientRoom;
    case SlClass::Recreational: return PlaceKind::Recreational;
  }
  return PlaceKind::Housing;
}

Space space_of(const Sublocation& sl) {
  return Space{place_kind(sl.cls), raw(sl.id), sl.center, sl.radius, sl.exposure == Exposure::Outdoor};
}

double ContactAccumulator::get(PersonId infector, PersonId infectee) const {
  const auto it = time_.find({infector, infectee});
  return it == time_.end() ? 0.0 : it->second;
}

void ContactAccumulator::reset(PersonId person) {
  std::erase_if(time_, [person](const auto& kv) { return kv.first.first == person || kv.first.second == person; });
}

bool infectable(const Person& p) {
  if (p.immune) return false;
  return p.status == InfectionStatus::Susceptible || p.status == InfectionStatus::VaccinatedPending;
}

void infect(Person& p, double now, const EpidemicParams& params, Rng& rng) {
  p.status = InfectionStatus::Incubating;
  p.status_since = now;
  p.next_transition = now + sample_stage_seconds(params.incubation, rng);
}

void make_symptomatic(Person& p, double now, const EpidemicParams& params, Rng& rng) {
  p.status = InfectionStatus::Symptomatic;
  p.status_since = now;
  p.next_transition = now + sample_stage_seconds(params.symptomatic, rng);
}

void vaccinate(Person& p, double now, const EpidemicParams& params, Rng& rng) {
  p.status = InfectionStatus::VaccinatedPending;
  p.status_since = now;
  p.next_transition = now + sample_stage_seconds(params.vaccination, rng);
}

bool transition_allowed(InfectionStatus from, InfectionStatus to, bool seeded) {
  using S = InfectionStatus;
  if (seeded) return (from == S::Susceptible || from == S::VaccinatedPending) && to == S::Symptomatic;
  switch (from) {
    case S::Susceptible: return to == S::Incubating || to == S::VaccinatedPending;
    case S::VaccinatedPending: return to == S::Incubating || to == S::Immunized;
    case S::Incubating: return to == S::Symptomatic;
    case S::Symptomatic: return to == S::Recovered || to == S::Dead;
    default: return false;
  }
}

void progress_disease(Person& p, double now, const EpidemicParams& params, Rng& rng, std::vector<StatusChange>* log) {
  while (p.next_transition <= now) {
    const double at = p.next_transition;
    const InfectionStatus before = p.status;
    switch (p.status) {
      case InfectionStatus::Incubating: make_symptomatic(p, at, params, rng); break;
      case InfectionStatus::Symptomatic:
        p.status = bernoulli(rng, params.mortality) ? InfectionStatus::Dead : InfectionStatus::Recovered;
        p.status_since = at;
        p.next_transition = std::numeric_limits<double>::infinity();
        break;
      case InfectionStatus::VaccinatedPending:
        p.status = InfectionStatus::Immunized;
        p.status_since = at;
        p.next_transition = std::numeric_limits<double>::infinity();
        break;
      default: p.next_transition = std::numeric_limits<double>::infinity(); continue;
    }
    if (log != nullptr) log->push_back(StatusChange{at, p.id, before, p.status});
  }
}

namespace {

Point random_in_disc(Point center, double radius, Rng& rng) {
  const double r = radius * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

void step_contacts(const Space& space, std::span<const Occupant> occupants, double t, double dt,
                   std::vector<Person>& persons, ContactAccumulator& contacts, const EpidemicParams& params, Rng& rng,
                   std::vector<InfectionEvent>& events, std::vector<StatusChange>* log) {
  bool any_source = false, any_target = false;
  for (const Occupant& o : occupants) {
    const Person& p = persons[raw(o.person)];
    any_source |= p.status == InfectionStatus::Symptomatic;
    any_target |= infectable(p);
  }
  if (!any_source || !any_target) return;

  std::vector<Point> pos(occupants.size(), space.center);
  if (!space.colocated())
    for (auto& q : pos) q = random_in_disc(space.center, space.radius, rng);

  const double sigma = params.sigma_per_h * (space.outdoor ? params.outdoor_factor : 1.0);
  const double d2 = params.d_star_m * params.d_star_m;
  for (std::size_t i = 0; i < occupants.size(); ++i) {
    const Person& src = persons[raw(occupants[i].person)];
    if (src.status != InfectionStatus::Symptomatic) continue;
    for (std::size_t j = 0; j < occupants.size(); ++j) {
      if (i == j) continue;
      Person& dst = persons[raw(occupants[j].person)];
      if (!infectable(dst)) continue;
      if (squared_distance(pos[i], pos[j]) > d2) continue;
      const double from = std::max({occupants[i].from, occupants[j].from, t});
      const double to = std::min({occupants[i].to, occupants[j].to, t + dt});
      if (to <= from) continue;
      contacts.add(src.id, dst.id, to - from);
      const double p = dst.susceptibility * infection_probability(sigma, to - from);
      if (!bernoulli(rng, p)) continue;
      const InfectionStatus before = dst.status;
      infect(dst, from, params, rng);
      events.push_back(InfectionEvent{from, space.kind, space.id, src.id, dst.id});
      if (log != nullptr) log->push_back(StatusChange{from, dst.id, before, dst.status});
    }
  }
}

}  // namespace citysim
