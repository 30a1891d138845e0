#include "citysim/agenda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <type_traits>

#include "citysim/errors.hpp"

namespace citysim {

std::string_view to_string(ActivityType t) {
  switch (t) {
    case ActivityType::Work: return "work";
    case ActivityType::Home: return "home";
    case ActivityType::MedicalCare: return "medical_care";
    case ActivityType::Recreation: return "recreation";
  }
  return "?";
}

bool activity_place_valid(ActivityType t, SlClass sl) {
  switch (t) {
    case ActivityType::Work:
      return sl == SlClass::Office || sl == SlClass::Classroom || sl == SlClass::Recreational || sl == SlClass::PatientRoom;
    case ActivityType::Home: return sl == SlClass::Housing;
    case ActivityType::MedicalCare: return sl == SlClass::PatientRoom;
    case ActivityType::Recreation: return sl == SlClass::Recreational;
  }
  return false;
}

std::vector<const Activity*> DailyAgenda::activities() const {
  std::vector<const Activity*> out;
  for (const auto& item : items)
    if (const auto* a = std::get_if<Activity>(&item)) out.push_back(a);
  return out;
}

double PatternTable::total() const {
  double t = 0.0;
  for (const auto& p : patterns) t += p.percent;
  return t;
}

int BehaviorPolicy::alert_level(double symptomatic_fraction) const {
  int level = 0;
  for (std::size_t k = 0; k < alert_thresholds.size(); ++k)
    if (symptomatic_fraction >= alert_thresholds[k]) level = static_cast<int>(k) + 1;
  return level;
}

namespace {

BehaviorAdjustment combine(const BehaviorAdjustment& a, const BehaviorAdjustment& b) {
  BehaviorAdjustment c;
  c.home_stay_factor = a.home_stay_factor * b.home_stay_factor;
  c.work_time_factor = a.work_time_factor * b.work_time_factor;
  c.recreation_avoidance = 1.0 - (1.0 - a.recreation_avoidance) * (1.0 - b.recreation_avoidance);
  return c;
}

}  // namespace

BehaviorAdjustment BehaviorPolicy::resolve(int level, InfectionStatus own) const {
  BehaviorAdjustment adj;
  if (!by_alert_level.empty()) {
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(level, 0)), by_alert_level.size() - 1);
    adj = by_alert_level[idx];
  }
  if (own == InfectionStatus::Symptomatic) adj = combine(adj, when_symptomatic);
  return adj;
}

double sample_truncated_normal(const DurationStats& stats, double lo, double hi, Rng& rng) {
  if (stats.sd_s <= 0.0) return std::clamp(stats.mean_s, lo, hi);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = stats.mean_s + stats.sd_s * standard_normal(rng);
    if (x >= lo && x <= hi) return x;
  }
  return std::clamp(stats.mean_s, lo, hi);
}

std::string sample_pattern(PersonClass cls, const AgendaConfig& cfg, Rng& rng) {
  switch (cls) {
    case PersonClass::ChildUnder3: return "H";
    case PersonClass::SchoolAge: return "HWH";
    case PersonClass::Elder: return bernoulli(rng, cfg.elder_recreation_probability) ? "H*H" : "H";
    case PersonClass::Adult:
    case PersonClass::CollegeStudent: break;
  }
  const auto& table = cfg.patterns.patterns;
  double u = uniform01(rng) * cfg.patterns.total();
  for (const auto& p : table) {
    if (u < p.percent) return p.pattern;
    u -= p.percent;
  }
  return table.back().pattern;
}

TravelMode sample_mode(PersonClass cls, const AgendaConfig& cfg, Rng& rng) {
  const ModalSplit& m = cfg.modal_split[static_cast<int>(cls)];
  const std::pair<TravelMode, double> options[] = {
      {TravelMode::Walk, m.walk}, {TravelMode::Bike, m.bike}, {TravelMode::Car, m.car}, {TravelMode::Transit, m.transit}};
  double total = 0.0;
  for (const auto& o : options) total += o.second;
  if (total <= 0.0) return TravelMode::Walk;
  double u = uniform01(rng) * total;
  for (const auto& [mode, w] : options) {
    if (u < w) return mode;
    u -= w;
  }
  return TravelMode::Transit;
}

namespace {

struct Slot {
  ActivityType type;
  SublocationId sl;
  double duration;
};

// Sequential layout. The first slot is home with a given duration, the last
// slot fills the day. Non-home slots are shortened or dropped so that the
// person is back home for at least `cfg.min_duration_s` before midnight.
class Layout {
 public:
  Layout(const Person& person, const AgendaConfig& cfg, TravelPlanner& planner, TravelMode mode)
      : person_(person), cfg_(cfg), planner_(planner), mode_(mode) {}

  DailyAgenda run(std::vector<Slot> slots, double first_duration) {
    DailyAgenda out;
    out.owner = person_.id;
    slots = collapse(std::move(slots));
    if (slots.size() <= 1) {
      out.items.push_back(Activity{ActivityType::Home, person_.housing, 0.0, kDaySeconds});
      return out;
    }
    const SublocationId home = person_.housing;
    const double reserve = cfg_.min_duration_s;
    first_duration = std::clamp(first_duration, reserve, kDaySeconds - reserve);
    push_activity(out, ActivityType::Home, home, first_duration);

    for (std::size_t k = 1; k + 1 < slots.size(); ++k) {
      const Slot& s = slots[k];
      if (s.type == ActivityType::Home) {
        const double arrive = t_ + travel_time(cur_, home);
        if (arrive + reserve > kDaySeconds) break;
        go_to(out, home);
        push_activity(out, ActivityType::Home, home, std::min(s.duration, kDaySeconds - t_));
        if (t_ >= kDaySeconds) return out;
        continue;
      }
      const double arrive = t_ + travel_time(cur_, s.sl);
      const double latest_end = kDaySeconds - reserve - travel_time(s.sl, home);
      if (arrive + reserve > latest_end) break;
      go_to(out, s.sl);
      push_activity(out, s.type, s.sl, std::min(s.duration, latest_end - t_));
    }
    go_to(out, home);
    push_activity(out, ActivityType::Home, home, kDaySeconds - t_);
    return out;
  }

  double travel_time(SublocationId from, SublocationId to) {
    if (from == to) return 0.0;
    return planner_.plan(from, to, mode_).duration;
  }

 private:
  static std::vector<Slot> collapse(std::vector<Slot> slots) {
    std::vector<Slot> out;
    for (const Slot& s : slots) {
      if (!out.empty() && out.back().type == s.type && out.back().sl == s.sl) {
        out.back().duration += s.duration;
        continue;
      }
      out.push_back(s);
    }
    return out;
  }

  void go_to(DailyAgenda& out, SublocationId to) {
    if (cur_ == to) return;
    TravelLeg leg = planner_.plan(cur_, to, mode_);
    leg.depart = t_;
    t_ = leg.arrive();
    cur_ = to;
    out.items.push_back(std::move(leg));
  }

  void push_activity(DailyAgenda& out, ActivityType type, SublocationId sl, double duration) {
    if (duration <= 0.0) return;
    if (!out.items.empty()) {
      if (auto* prev = std::get_if<Activity>(&out.items.back()); prev && prev->type == type && prev->sl == sl) {
        prev->duration += duration;
        t_ += duration;
        return;
      }
    }
    out.items.push_back(Activity{type, sl, t_, duration});
    t_ += duration;
    cur_ = sl;
  }

  const Person& person_;
  const AgendaConfig& cfg_;
  TravelPlanner& planner_;
  TravelMode mode_;
  double t_ = 0.0;
  SublocationId cur_{};
};

std::optional<SublocationId> pick_recreation(const CityModel& city, Point from, const AgendaConfig& cfg, Rng& rng) {
  const auto& ids = city.of_class(SlClass::Recreational);
  if (ids.empty()) return std::nullopt;
  std::vector<double> cumulative;
  cumulative.reserve(ids.size());
  double total = 0.0;
  for (SublocationId id : ids) {
    total += 1.0 / std::max(distance(city.sublocation(id).center, from), cfg.recreation_distance_floor_m);
    cumulative.push_back(total);
  }
  const double u = uniform01(rng) * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return ids[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), ids.size() - 1)];
}

std::optional<SublocationId> nearest_patient_room(const CityModel& city, Point from) {
  std::optional<SublocationId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (SublocationId id : city.of_class(SlClass::PatientRoom)) {
    const double d = distance(city.sublocation(id).center, from);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return best;
}

double sample_duration(ActivityType type, const AgendaConfig& cfg, Rng& rng) {
  const DurationStats* stats = &cfg.home;
  switch (type) {
    case ActivityType::Home: stats = &cfg.home; break;
    case ActivityType::Work: stats = &cfg.work; break;
    case ActivityType::Recreation: stats = &cfg.recreation; break;
    case ActivityType::MedicalCare: stats = &cfg.medical; break;
  }
  return sample_truncated_normal(*stats, cfg.min_duration_s, cfg.max_duration_s, rng);
}

TravelMode agenda_mode(const DailyAgenda& agenda) {
  for (const auto& item : agenda.items)
    if (const auto* leg = std::get_if<TravelLeg>(&item)) return leg->mode == TravelMode::Taxi ? TravelMode::Transit : leg->mode;
  return TravelMode::Walk;
}

}  // namespace

DailyAgenda expand_agenda(const Person& person, const std::string& pattern, const BehaviorAdjustment& adjustment,
                          const AgendaConfig& cfg, TravelPlanner& planner, TravelMode mode, Rng& rng) {
  const CityModel& city = planner.world().city;
  std::vector<Slot> slots;
  SublocationId prev = person.housing;
  for (char c : pattern) {
    Slot s{ActivityType::Home, person.housing, 0.0};
    switch (c) {
      case 'H': break;
      case 'W':
        if (!person.office) throw MissingAnchor("person " + to_string(person.id) + " has a W activity but no workplace");
        s = Slot{ActivityType::Work, *person.office, 0.0};
        break;
      case '*': {
        const Point here = city.sublocation(prev).center;
        std::optional<SublocationId> where;
        if (person.status == InfectionStatus::Symptomatic) {
          where = nearest_patient_room(city, here);
          if (where) s = Slot{ActivityType::MedicalCare, *where, 0.0};
        } else {
          where = pick_recreation(city, here, cfg, rng);
          if (where) s = Slot{ActivityType::Recreation, *where, 0.0};
        }
        break;
      }
      default: throw ConfigError("activity pattern '" + pattern + "' contains '" + std::string(1, c) + "'");
    }
    s.duration = sample_duration(s.type, cfg, rng);
    prev = s.sl;
    slots.push_back(s);
  }
  if (slots.empty() || slots.front().type != ActivityType::Home || slots.back().type != ActivityType::Home)
    throw ConfigError("activity pattern '" + pattern + "' must start and end with H");

  // The first outing starts at a sampled clock time; home lasts until then.
  const bool works = pattern.find('W') != std::string::npos;
  const double anchor = works ? uniform(rng, cfg.work_start_earliest_s, cfg.work_start_latest_s)
                              : uniform(rng, cfg.outing_start_earliest_s, cfg.outing_start_latest_s);
  Layout layout(person, cfg, planner, mode);
  double first = anchor;
  if (slots.size() > 1) first -= layout.travel_time(person.housing, slots[1].sl);
  DailyAgenda base = layout.run(std::move(slots), first);
  return apply_policy(base, adjustment, person, cfg, planner, rng);
}

DailyAgenda apply_policy(const DailyAgenda& agenda, const BehaviorAdjustment& adjustment, const Person& person,
                         const AgendaConfig& cfg, TravelPlanner& planner, Rng& rng) {
  if (adjustment.neutral()) return agenda;
  const TravelMode mode = agenda_mode(agenda);
  const auto acts = agenda.activities();
  if (acts.size() <= 1) return agenda;

  std::vector<Slot> slots;
  bool changed = false;
  for (const Activity* a : acts) {
    Slot s{a->type, a->sl, a->duration};
    if (a->type == ActivityType::Recreation && adjustment.recreation_avoidance > 0.0 &&
        bernoulli(rng, adjustment.recreation_avoidance)) {
      changed = true;
      continue;
    }
    if (a->type == ActivityType::Work && adjustment.work_time_factor != 1.0) {
      s.duration = std::max(cfg.min_duration_s, s.duration * adjustment.work_time_factor);
      changed = true;
    }
    slots.push_back(s);
  }

  // Keep the clock time of the first departure.
  Layout first_pass(person, cfg, planner, mode);
  double first = slots.front().duration;
  if (changed && slots.size() > 1 && acts.size() > 1) {
    const double anchor = acts[1]->start;
    first = anchor - first_pass.travel_time(person.housing, slots[1].sl);
  }
  DailyAgenda out = changed ? first_pass.run(slots, first) : agenda;
  if (adjustment.home_stay_factor == 1.0) return out;

  // Lengthen every home stay by the factor (capped at the whole day) and
  // shrink the outings to make room.
  double home_total = 0.0, travel_total = 0.0, away_total = 0.0;
  std::size_t away_count = 0;
  slots.clear();
  for (const auto& item : out.items) {
    if (const auto* a = std::get_if<Activity>(&item)) {
      slots.push_back(Slot{a->type, a->sl, a->duration});
      if (a->type == ActivityType::Home) {
        home_total += a->duration;
      } else {
        away_total += a->duration;
        ++away_count;
      }
    } else {
      travel_total += std::get<TravelLeg>(item).duration;
    }
  }
  const double home_target = std::min(home_total * adjustment.home_stay_factor, kDaySeconds);
  const double room = kDaySeconds - home_target - travel_total;
  const double floor_total = static_cast<double>(away_count) * cfg.min_duration_s;
  if (away_count == 0 || room < floor_total) {
    DailyAgenda home_day;
    home_day.owner = out.owner;
    home_day.items.push_back(Activity{ActivityType::Home, person.housing, 0.0, kDaySeconds});
    return home_day;
  }
  const double home_scale = home_target / home_total;
  const double spare = away_total - floor_total;
  const double away_scale = spare > 0.0 ? (room - floor_total) / spare : 0.0;
  for (Slot& s : slots) {
    if (s.type == ActivityType::Home)
      s.duration *= home_scale;
    else
      s.duration = cfg.min_duration_s + (s.duration - cfg.min_duration_s) * away_scale;
  }
  Layout second_pass(person, cfg, planner, mode);
  return second_pass.run(slots, slots.front().duration);
}

std::vector<std::string> check_agenda(const DailyAgenda& agenda, const Person& person, const CityModel& city) {
  std::vector<std::string> problems;
  const std::string who = "agenda of person " + to_string(agenda.owner);
  constexpr double eps = 1e-6;
  if (agenda.items.empty()) {
    problems.push_back(who + ": empty");
    return problems;
  }
  auto item_start = [](const AgendaItem& it) {
    return std::visit([](const auto& x) -> double {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Activity>) return x.start;
      else return x.depart;
    }, it);
  };
  auto item_end = [](const AgendaItem& it) {
    return std::visit([](const auto& x) -> double {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Activity>) return x.end();
      else return x.arrive();
    }, it);
  };
  const auto* first = std::get_if<Activity>(&agenda.items.front());
  const auto* last = std::get_if<Activity>(&agenda.items.back());
  if (first == nullptr || first->sl != person.housing) problems.push_back(who + ": does not start at home");
  if (last == nullptr || last->sl != person.housing) problems.push_back(who + ": does not end at home");
  if (item_start(agenda.items.front()) < -eps) problems.push_back(who + ": starts before midnight");
  if (item_end(agenda.items.back()) > kDaySeconds + eps) problems.push_back(who + ": runs past midnight");

  const Activity* prev_act = nullptr;
  const TravelLeg* pending_leg = nullptr;
  double prev_end = 0.0;
  for (std::size_t i = 0; i < agenda.items.size(); ++i) {
    const auto& item = agenda.items[i];
    const std::string where = who + " item " + std::to_string(i);
    if (item_start(item) < prev_end - eps) problems.push_back(where + ": overlaps the previous item");
    prev_end = item_end(item);
    if (const auto* a = std::get_if<Activity>(&item)) {
      if (!(a->duration > 0.0)) problems.push_back(where + ": non-positive duration");
      const Sublocation* sl = city.find_sublocation(a->sl);
      if (sl == nullptr) {
        problems.push_back(where + ": unknown sublocation");
      } else if (!activity_place_valid(a->type, sl->cls)) {
        problems.push_back(where + ": " + std::string(to_string(a->type)) + " in a " + std::string(to_string(sl->cls)) +
                           " sublocation");
      }
      if (a->type == ActivityType::Home && a->sl != person.housing) problems.push_back(where + ": home away from housing");
      if (a->type == ActivityType::Work && a->sl != person.office) problems.push_back(where + ": work away from workplace");
      if (prev_act != nullptr && prev_act->sl != a->sl) {
        if (pending_leg == nullptr)
          problems.push_back(where + ": no travel between distinct sublocations");
        else if (pending_leg->from != prev_act->sl || pending_leg->to != a->sl)
          problems.push_back(where + ": travel leg endpoints do not match activities");
      }
      prev_act = a;
      pending_leg = nullptr;
    } else {
      const auto& leg = std::get<TravelLeg>(item);
      if (pending_leg != nullptr) problems.push_back(where + ": two travel legs in a row");
      if (leg.duration < 0.0) problems.push_back(where + ": negative travel time");
      pending_leg = &leg;
    }
  }
  return problems;
}

void write_agenda_csv_header(std::ostream& os) { os << "day,person_id,item,kind,from_sl,to_sl,start_s,end_s\n"; }

void write_agenda_csv(std::ostream& os, const DailyAgenda& agenda, int day) {
  for (const auto& item : agenda.items) {
    os << day << ',' << raw(agenda.owner) << ',';
    if (const auto* a = std::get_if<Activity>(&item)) {
      os << "activity," << to_string(a->type) << ',' << raw(a->sl) << ',' << raw(a->sl) << ',' << a->start << ','
         << a->end() << '\n';
    } else {
      const auto& leg = std::get<TravelLeg>(item);
      os << "travel," << to_string(leg.mode) << ',' << raw(leg.from) << ',' << raw(leg.to) << ',' << leg.depart << ','
         << leg.arrive() << '\n';
    }
  }
}

}  // namespace citysim
