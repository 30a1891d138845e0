#include "citysim/population.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace citysim {

std::string_view to_string(PersonClass c) {
  switch (c) {
    case PersonClass::ChildUnder3: return "child_under_3";
    case PersonClass::SchoolAge: return "school_age";
    case PersonClass::Adult: return "adult";
    case PersonClass::CollegeStudent: return "college_student";
    case PersonClass::Elder: return "elder";
  }
  return "?";
}

std::string_view to_string(InfectionStatus s) {
  switch (s) {
    case InfectionStatus::Susceptible: return "susceptible";
    case InfectionStatus::Incubating: return "incubating";
    case InfectionStatus::Symptomatic: return "symptomatic";
    case InfectionStatus::Recovered: return "recovered";
    case InfectionStatus::Dead: return "dead";
    case InfectionStatus::VaccinatedPending: return "vaccinated_pending";
    case InfectionStatus::Immunized: return "immunized";
  }
  return "?";
}

std::optional<PersonClass> parse_person_class(std::string_view s) {
  for (PersonClass c : kAllPersonClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

PersonClass classify(int age, bool is_college_student) {
  if (age < 3) return PersonClass::ChildUnder3;
  if (age < 18) return PersonClass::SchoolAge;
  if (age < 60) return (is_college_student && age < 25) ? PersonClass::CollegeStudent : PersonClass::Adult;
  return PersonClass::Elder;
}

bool needs_workplace(PersonClass c) {
  return c == PersonClass::SchoolAge || c == PersonClass::Adult || c == PersonClass::CollegeStudent;
}

bool workplace_class_valid(PersonClass c, SlClass sl) {
  switch (c) {
    case PersonClass::SchoolAge:
    case PersonClass::CollegeStudent: return sl == SlClass::Classroom;
    case PersonClass::Adult: return sl == SlClass::Office || sl == SlClass::Recreational || sl == SlClass::PatientRoom;
    default: return false;
  }
}

DemographicConfig default_demographics(std::size_t population) {
  DemographicConfig d;
  d.population = population;
  d.age_bins = {{0, 3, 4}, {3, 18, 17}, {18, 25, 11}, {25, 60, 50}, {60, 90, 18}};
  d.household_size_pmf = {{1, 20}, {2, 30}, {3, 28}, {4, 16}, {5, 6}};
  d.commute_km_bins = {{0.5, 2, 40}, {2, 5, 40}, {5, 10, 20}};
  return d;
}

double sample_bin(std::span<const Bin> bins, Rng& rng) {
  double total = 0.0;
  for (const auto& b : bins) total += b.weight;
  double u = uniform01(rng) * total;
  for (const auto& b : bins) {
    if (u < b.weight) return b.hi > b.lo ? uniform(rng, b.lo, b.hi) : b.lo;
    u -= b.weight;
  }
  const auto& last = bins.back();
  return last.lo;
}

namespace {

void require_distribution(bool ok, std::string_view what) {
  if (!ok) throw ConfigError("demographics: missing or empty distribution '" + std::string(what) + "'");
}

bool positive_total(std::span<const Bin> bins) {
  double t = 0.0;
  for (const auto& b : bins) t += b.weight;
  return !bins.empty() && t > 0.0;
}

int sample_household_size(const std::vector<SizeWeight>& pmf, Rng& rng) {
  double total = 0.0;
  for (const auto& s : pmf) total += s.weight;
  double u = uniform01(rng) * total;
  for (const auto& s : pmf) {
    if (u < s.weight) return s.size;
    u -= s.weight;
  }
  return pmf.back().size;
}

class WorkplacePicker {
 public:
  explicit WorkplacePicker(const CityModel& city) : city_(city) {}

  SublocationId pick(const Person& p, SlClass sl_class, double commute_m, Rng& rng) const {
    const Point home = city_.sublocation(p.housing).center;
    const auto& all = city_.of_class(sl_class);
    // Annulus of +-10% around the drawn distance; pick uniformly among hits.
    std::vector<SublocationId> ring;
    for (const Sublocation* sl : sublocations_near(city_, home, commute_m * 1.1, sl_class)) {
      const double d = distance(sl->center, home);
      if (d >= commute_m * 0.9 && eligible(p, *sl)) ring.push_back(sl->id);
    }
    if (!ring.empty()) {
      std::sort(ring.begin(), ring.end());
      return ring[uniform_index(rng, ring.size())];
    }
    std::optional<SublocationId> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (SublocationId id : all) {  // ascending id
      const Sublocation& sl = city_.sublocation(id);
      if (!eligible(p, sl)) continue;
      const double gap = std::abs(distance(sl.center, home) - commute_m);
      if (gap < best_gap) {
        best_gap = gap;
        best = id;
      }
    }
    if (!best) {
      throw AssignmentError("no " + std::string(to_string(sl_class)) + " sublocation available for " +
                            std::string(to_string(p.cls)) + " person " + to_string(p.id));
    }
    return *best;
  }

  // School children study in Housing/School region classrooms, college
  // students in University classrooms; either falls back to any classroom.
  bool eligible(const Person& p, const Sublocation& sl) const {
    if (sl.cls != SlClass::Classroom) return true;
    const RegionType rt = city_.find_region(sl.region)->type;
    if (p.cls == PersonClass::SchoolAge && has_school_classrooms_)
      return rt == RegionType::School || rt == RegionType::Housing;
    if (p.cls == PersonClass::CollegeStudent && has_university_classrooms_) return rt == RegionType::University;
    return true;
  }

  void scan() {
    for (SublocationId id : city_.of_class(SlClass::Classroom)) {
      const Sublocation& sl = city_.sublocation(id);
      const Region* r = city_.find_region(sl.region);
      if (r == nullptr) continue;
      if (r->type == RegionType::University) has_university_classrooms_ = true;
      if (r->type == RegionType::School || r->type == RegionType::Housing) has_school_classrooms_ = true;
    }
  }

 private:
  const CityModel& city_;
  bool has_school_classrooms_ = false;
  bool has_university_classrooms_ = false;
};

SlClass sample_adult_workplace_class(const CityModel& city, const WorkplaceMix& mix, Rng& rng) {
  const std::pair<SlClass, double> options[] = {
      {SlClass::Office, mix.office}, {SlClass::Recreational, mix.recreational}, {SlClass::PatientRoom, mix.patient_room}};
  double total = 0.0;
  for (const auto& [cls, w] : options)
    if (!city.of_class(cls).empty()) total += w;
  if (total <= 0.0) {
    for (const auto& [cls, w] : options)
      if (!city.of_class(cls).empty()) return cls;
    return SlClass::Office;  // caller reports the AssignmentError
  }
  double u = uniform01(rng) * total;
  for (const auto& [cls, w] : options) {
    if (city.of_class(cls).empty()) continue;
    if (u < w) return cls;
    u -= w;
  }
  for (auto it = std::rbegin(options); it != std::rend(options); ++it)
    if (!city.of_class(it->first).empty() && it->second > 0.0) return it->first;
  return SlClass::Office;
}

}  // namespace

Population synthesize_population(const CityModel& city, const DemographicConfig& demo, std::uint64_t seed) {
  require_distribution(positive_total(demo.age_bins), "age_bins");
  require_distribution(!demo.household_size_pmf.empty(), "household_size_pmf");
  require_distribution(positive_total(demo.commute_km_bins), "commute_km_bins");
  for (const auto& s : demo.household_size_pmf)
    if (s.size < 1) throw ConfigError("demographics: household sizes must be >= 1");

  const auto& housing = city.of_class(SlClass::Housing);
  if (housing.empty()) throw AssignmentError("city has no housing sublocation");

  Rng rng = substream(seed, "population");
  Population pop;
  pop.persons.reserve(demo.population);

  // Step 1: households, placed round-robin over a shuffled housing order.
  std::vector<SublocationId> order(housing.begin(), housing.end());
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  std::size_t next_home = 0;
  while (pop.persons.size() < demo.population) {
    const std::size_t left = demo.population - pop.persons.size();
    const auto size = std::min<std::size_t>(static_cast<std::size_t>(sample_household_size(demo.household_size_pmf, rng)), left);
    Household hh;
    hh.housing = order[next_home++ % order.size()];
    for (std::size_t k = 0; k < size; ++k) {
      Person p;
      p.id = static_cast<PersonId>(pop.persons.size());
      p.age = static_cast<int>(std::floor(sample_bin(demo.age_bins, rng)));
      const bool college = p.age >= 18 && p.age < 25 && bernoulli(rng, demo.college_fraction);
      p.cls = classify(p.age, college);
      p.gender = bernoulli(rng, demo.male_fraction) ? Gender::Male : Gender::Female;
      p.susceptibility = demo.susceptibility;
      p.immune = demo.immune_fraction > 0.0 && bernoulli(rng, demo.immune_fraction);
      p.housing = hh.housing;
      hh.members.push_back(p.id);
      pop.persons.push_back(p);
    }
    pop.households.push_back(std::move(hh));
  }

  // Steps 2 and 3: commute distance, then a workplace about that far away.
  WorkplacePicker picker(city);
  picker.scan();
  for (Person& p : pop.persons) {
    if (!needs_workplace(p.cls)) continue;
    const double commute_m = sample_bin(demo.commute_km_bins, rng) * 1000.0;
    const SlClass target =
        p.cls == PersonClass::Adult ? sample_adult_workplace_class(city, demo.workplace_mix, rng) : SlClass::Classroom;
    p.office = picker.pick(p, target, commute_m, rng);
  }
  return pop;
}

std::vector<std::string> check_population(const CityModel& city, const Population& pop) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < pop.persons.size(); ++i) {
    const Person& p = pop.persons[i];
    const std::string who = "person " + to_string(p.id);
    if (raw(p.id) != i) problems.push_back(who + ": id does not match position");
    if (p.cls != classify(p.age, p.cls == PersonClass::CollegeStudent))
      problems.push_back(who + ": class inconsistent with age");
    const Sublocation* home = city.find_sublocation(p.housing);
    if (home == nullptr || home->cls != SlClass::Housing) problems.push_back(who + ": housing is not a housing sublocation");
    if (needs_workplace(p.cls) != p.office.has_value()) problems.push_back(who + ": workplace presence does not match class");
    if (p.office) {
      const Sublocation* work = city.find_sublocation(*p.office);
      if (work == nullptr || !workplace_class_valid(p.cls, work->cls))
        problems.push_back(who + ": workplace class not valid for work activity");
    }
    if (p.susceptibility < 0.0 || p.susceptibility > 1.0) problems.push_back(who + ": susceptibility outside [0,1]");
  }
  for (std::size_t h = 0; h < pop.households.size(); ++h) {
    const Household& hh = pop.households[h];
    if (hh.members.empty()) problems.push_back("household " + std::to_string(h) + ": empty");
    for (PersonId m : hh.members)
      if (raw(m) >= pop.persons.size() || pop.persons[raw(m)].housing != hh.housing)
        problems.push_back("household " + std::to_string(h) + ": member does not share housing");
  }
  return problems;
}

void write_population_csv(std::ostream& os, const Population& pop) {
  os << "person_id,age,gender,class,housing_sl,office_sl,status\n";
  for (const Person& p : pop.persons) {
    os << raw(p.id) << ',' << p.age << ',' << (p.gender == Gender::Male ? 'M' : 'F') << ',' << to_string(p.cls) << ','
       << raw(p.housing) << ',';
    if (p.office) os << raw(*p.office);
    os << ',' << to_string(p.status) << '\n';
  }
}

}  // namespace citysim
