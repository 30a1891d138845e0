#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "citysim/clock.hpp"
#include "citysim/population.hpp"
#include "citysim/rng.hpp"
#include "citysim/travel.hpp"

namespace citysim {

enum class ActivityType { Work, Home, MedicalCare, Recreation };

std::string_view to_string(ActivityType t);

// Sublocation classes an activity may take place in.
bool activity_place_valid(ActivityType t, SlClass sl);

struct Activity {
  ActivityType type = ActivityType::Home;
  SublocationId sl{};
  double start = 0.0;     // seconds of day
  double duration = 0.0;  // seconds

  double end() const { return start + duration; }
};

using AgendaItem = std::variant<Activity, TravelLeg>;

struct DailyAgenda {
  PersonId owner{};
  std::vector<AgendaItem> items;

  std::vector<const Activity*> activities() const;
};

struct PatternShare {
  std::string pattern;
  double percent = 0.0;

  friend bool operator==(const PatternShare&, const PatternShare&) = default;
};

// Daily activity patterns for working people and their shares (percent).
struct PatternTable {
  std::vector<PatternShare> patterns{
      {"HWH", 53.4}, {"HWH*H", 10.3}, {"HW*WH", 2.7}, {"HWHWH", 27.1}, {"HWHWH*H", 6.5}};

  double total() const;

  friend bool operator==(const PatternTable&, const PatternTable&) = default;
};

// Multipliers applied to a day's plan. The default-constructed value is the
// identity.
struct BehaviorAdjustment {
  double home_stay_factor = 1.0;      // >= 1 lengthens stays at home
  double recreation_avoidance = 0.0;  // probability of dropping each recreation, [0,1]
  double work_time_factor = 1.0;      // (0,1] shortens work

  bool neutral() const { return home_stay_factor == 1.0 && recreation_avoidance == 0.0 && work_time_factor == 1.0; }

  friend bool operator==(const BehaviorAdjustment&, const BehaviorAdjustment&) = default;
};

// Behaviour as a function of the global alert level and the person's own
// infection status.
struct BehaviorPolicy {
  // Citywide symptomatic prevalence at or above thresholds[k] raises the
  // alert level to k+1.
  std::vector<double> alert_thresholds;
  // Adjustment per alert level; index 0 is "no alert". Missing levels reuse
  // the last entry; an empty list is neutral.
  std::vector<BehaviorAdjustment> by_alert_level;
  // Applied on top for people who are themselves symptomatic.
  BehaviorAdjustment when_symptomatic;

  int alert_level(double symptomatic_fraction) const;
  BehaviorAdjustment resolve(int alert_level, InfectionStatus own) const;

  friend bool operator==(const BehaviorPolicy&, const BehaviorPolicy&) = default;
};

struct DurationStats {
  double mean_s = 0.0;
  double sd_s = 0.0;

  friend bool operator==(const DurationStats&, const DurationStats&) = default;
};

struct ModalSplit {
  double walk = 0.25;
  double bike = 0.10;
  double car = 0.35;
  double transit = 0.30;

  friend bool operator==(const ModalSplit&, const ModalSplit&) = default;
};

struct AgendaConfig {
  DurationStats home{12 * 3600.0 + 24 * 60.0, 5 * 3600.0 + 8 * 60.0};
  DurationStats work{3 * 3600.0 + 4 * 60.0, 2 * 3600.0 + 29 * 60.0};
  DurationStats recreation{5400.0, 3600.0};
  DurationStats medical{7200.0, 3600.0};
  double min_duration_s = 600.0;     // 10 min
  double max_duration_s = 57600.0;   // 16 h
  double work_start_earliest_s = 7.5 * 3600.0;
  double work_start_latest_s = 9.0 * 3600.0;
  double outing_start_earliest_s = 9.0 * 3600.0;  // day start for patterns without W
  double outing_start_latest_s = 16.0 * 3600.0;
  double elder_recreation_probability = 0.3;
  double recreation_distance_floor_m = 50.0;
  PatternTable patterns;
  // Indexed by PersonClass.
  ModalSplit modal_split[5];

  friend bool operator==(const AgendaConfig&, const AgendaConfig&) = default;
};

// Draw from N(mean, sd) restricted to [lo, hi] by rejection.
double sample_truncated_normal(const DurationStats& stats, double lo, double hi, Rng& rng);

std::string sample_pattern(PersonClass cls, const AgendaConfig& cfg, Rng& rng);

TravelMode sample_mode(PersonClass cls, const AgendaConfig& cfg, Rng& rng);

// Turns a pattern into a timed agenda: H at home, W at the workplace, "*" as
// medical care when symptomatic and recreation otherwise. Travel legs come
// from `planner`. Throws MissingAnchor when W appears without a workplace.
DailyAgenda expand_agenda(const Person& person, const std::string& pattern, const BehaviorAdjustment& adjustment,
                          const AgendaConfig& cfg, TravelPlanner& planner, TravelMode mode, Rng& rng);

// Re-times an existing agenda under `adjustment`; a neutral adjustment
// returns it unchanged.
DailyAgenda apply_policy(const DailyAgenda& agenda, const BehaviorAdjustment& adjustment, const Person& person,
                         const AgendaConfig& cfg, TravelPlanner& planner, Rng& rng);

// Broken DailyAgenda invariants, empty when the agenda is well formed.
std::vector<std::string> check_agenda(const DailyAgenda& agenda, const Person& person, const CityModel& city);

void write_agenda_csv_header(std::ostream& os);
void write_agenda_csv(std::ostream& os, const DailyAgenda& agenda, int day);

}  // namespace citysim
