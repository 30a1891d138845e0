#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citysim/city.hpp"
#include "citysim/errors.hpp"
#include "citysim/ids.hpp"
#include "citysim/rng.hpp"

namespace citysim {

enum class PersonClass { ChildUnder3, SchoolAge, Adult, CollegeStudent, Elder };
enum class Gender { Male, Female };
enum class InfectionStatus { Susceptible, Incubating, Symptomatic, Recovered, Dead, VaccinatedPending, Immunized };

inline constexpr PersonClass kAllPersonClasses[] = {PersonClass::ChildUnder3, PersonClass::SchoolAge, PersonClass::Adult,
                                                    PersonClass::CollegeStudent, PersonClass::Elder};
inline constexpr InfectionStatus kAllStatuses[] = {
    InfectionStatus::Susceptible, InfectionStatus::Incubating,        InfectionStatus::Symptomatic,
    InfectionStatus::Recovered,   InfectionStatus::Dead,              InfectionStatus::VaccinatedPending,
    InfectionStatus::Immunized};

std::string_view to_string(PersonClass c);
std::string_view to_string(InfectionStatus s);
std::optional<PersonClass> parse_person_class(std::string_view s);

// Age boundaries are half-open: [0,3) [3,18) [18,60) [60,inf); the college
// flag only matters for ages in [18,25).
PersonClass classify(int age, bool is_college_student);

// Classes with a daytime anchor away from home.
bool needs_workplace(PersonClass c);

// Sublocation classes where a person of class `c` may work or study.
bool workplace_class_valid(PersonClass c, SlClass sl);

struct Person {
  PersonId id{};
  int age = 30;
  Gender gender = Gender::Female;
  PersonClass cls = PersonClass::Adult;
  double susceptibility = 1.0;
  bool immune = false;
  InfectionStatus status = InfectionStatus::Susceptible;
  double status_since = 0.0;  // simulation seconds
  double next_transition = std::numeric_limits<double>::infinity();
  SublocationId housing{};
  std::optional<SublocationId> office;
};

struct Household {
  SublocationId housing{};
  std::vector<PersonId> members;
};

// Histogram bin over [lo, hi); lo == hi is a point mass.
struct Bin {
  double lo = 0.0;
  double hi = 0.0;
  double weight = 0.0;

  friend bool operator==(const Bin&, const Bin&) = default;
};

struct SizeWeight {
  int size = 1;
  double weight = 0.0;

  friend bool operator==(const SizeWeight&, const SizeWeight&) = default;
};

struct WorkplaceMix {
  double office = 0.80;
  double recreational = 0.12;
  double patient_room = 0.08;

  friend bool operator==(const WorkplaceMix&, const WorkplaceMix&) = default;
};

struct DemographicConfig {
  std::size_t population = 0;
  std::vector<Bin> age_bins;                  // years
  std::vector<SizeWeight> household_size_pmf;
  std::vector<Bin> commute_km_bins;           // kilometres
  double college_fraction = 0.3;              // among ages [18,25)
  double male_fraction = 0.5;
  double susceptibility = 1.0;
  double immune_fraction = 0.0;
  WorkplaceMix workplace_mix;

  friend bool operator==(const DemographicConfig&, const DemographicConfig&) = default;
};

// Toy defaults (not census data).
DemographicConfig default_demographics(std::size_t population);

struct Population {
  std::vector<Person> persons;  // persons[i].id == PersonId{i}
  std::vector<Household> households;
};

double sample_bin(std::span<const Bin> bins, Rng& rng);

// Builds persons and households, then anchors each worker at a sublocation
// roughly a sampled commute distance away from home.
Population synthesize_population(const CityModel& city, const DemographicConfig& demo, std::uint64_t seed);

// Human-readable list of broken person/household invariants (empty when valid).
std::vector<std::string> check_population(const CityModel& city, const Population& pop);

void write_population_csv(std::ostream& os, const Population& pop);

}  // namespace citysim
