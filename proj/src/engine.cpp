#include "citysim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "citysim/errors.hpp"

namespace citysim {

namespace {

constexpr std::uint64_t kVehicleBit = std::uint64_t{1} << 63;
constexpr int kTripBits = 40;

}  // namespace

std::size_t total(const StatusCounts& c) { return std::accumulate(c.begin(), c.end(), std::size_t{0}); }

std::string_view to_string(Motion m) {
  switch (m) {
    case Motion::AtSublocation: return "at_sublocation";
    case Motion::Traveling: return "traveling";
    case Motion::Riding: return "riding";
  }
  return "?";
}

std::uint64_t vehicle_key(std::size_t line, std::uint64_t trip) {
  return (static_cast<std::uint64_t>(line) << kTripBits) | trip;
}
std::size_t vehicle_line(std::uint64_t key) { return static_cast<std::size_t>((key & ~kVehicleBit) >> kTripBits); }
std::uint64_t vehicle_trip(std::uint64_t key) { return key & ((std::uint64_t{1} << kTripBits) - 1); }

std::string describe_place(const World& world, PlaceKind kind, std::uint64_t place) {
  if (kind != PlaceKind::Vehicle) return std::to_string(place);
  const TransitLine& line = world.transit.lines()[vehicle_line(place)];
  return std::to_string(raw(line.id)) + ":" + std::to_string(line.direction) + ":" + std::to_string(vehicle_trip(place));
}

Simulation::Simulation(const World& world, Population population, SimConfig cfg)
    : world_(world), pop_(std::move(population)), cfg_(std::move(cfg)), planner_(world, cfg_.travel) {
  if (!(cfg_.dt_s > 0.0)) throw ConfigError("dt must be positive");
  if (cfg_.days < 1) throw ConfigError("days must be at least 1");
  if (auto problems = check_params(cfg_.epidemic); !problems.empty()) throw ConfigError("epidemic: " + problems.front());

  const auto& regions = world_.city.regions();
  region_of_sl_.reserve(world_.city.sublocations().size());
  for (const Sublocation& sl : world_.city.sublocations()) {
    const auto it = std::find_if(regions.begin(), regions.end(), [&](const Region& r) { return r.id == sl.region; });
    region_of_sl_.push_back(static_cast<std::uint32_t>(it - regions.begin()));
  }
  for (std::size_t l = 0; l < world_.transit.lines().size(); ++l) {
    std::vector<Point> pts;
    for (std::size_t k = 0; k < world_.transit.lines()[l].stops.size(); ++k)
      pts.push_back(world_.transit.stop_pos(world_.transit.stop_at(l, k)));
    line_points_.push_back(std::move(pts));
  }

  agents_.resize(pop_.persons.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    Agent& a = agents_[i];
    a.last_sl = pop_.persons[i].housing;
    Phase stay;
    stay.sl = static_cast<std::uint32_t>(world_.city.sublocation_index(a.last_sl));
    a.phases.push_back(stay);
  }
}

void Simulation::apply_seed(Person& p) {
  Rng rng = substream(cfg_.seed, "seeding", {raw(p.id)});
  const InfectionStatus before = p.status;
  make_symptomatic(p, clock_, cfg_.epidemic, rng);
  transitions_.push_back(StatusChange{clock_, p.id, before, p.status, true});
  seeds_.push_back(p.id);
}

void Simulation::seed_infections(std::size_t count) {
  if (count == 0) return;
  std::vector<PersonId> candidates;
  for (const Person& p : pop_.persons)
    if (infectable(p)) candidates.push_back(p.id);
  if (count > candidates.size())
    throw InsufficientSusceptibles("cannot seed " + std::to_string(count) + " infections among " +
                                   std::to_string(candidates.size()) + " susceptible people");
  Rng rng = substream(cfg_.seed, "seeding");
  for (std::size_t i = 0; i < count; ++i)
    std::swap(candidates[i], candidates[i + uniform_index(rng, candidates.size() - i)]);
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  for (PersonId id : candidates) apply_seed(pop_.persons[raw(id)]);
}

void Simulation::seed_infections(std::span<const PersonId> ids) {
  std::vector<PersonId> chosen(ids.begin(), ids.end());
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  for (PersonId id : chosen) {
    if (raw(id) >= pop_.persons.size()) throw InsufficientSusceptibles("no person " + to_string(id));
    if (!infectable(pop_.persons[raw(id)]))
      throw InsufficientSusceptibles("person " + to_string(id) + " is not susceptible");
  }
  for (PersonId id : chosen) apply_seed(pop_.persons[raw(id)]);
}

std::size_t Simulation::vaccinate_fraction(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("vaccinated fraction must be in [0,1]");
  std::vector<PersonId> candidates;
  for (const Person& p : pop_.persons)
    if (!p.immune && p.status == InfectionStatus::Susceptible) candidates.push_back(p.id);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(candidates.size())));
  Rng rng = substream(cfg_.seed, "vaccination");
  for (std::size_t i = 0; i < count; ++i)
    std::swap(candidates[i], candidates[i + uniform_index(rng, candidates.size() - i)]);
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  for (PersonId id : candidates) {
    Person& p = pop_.persons[raw(id)];
    Rng own = substream(cfg_.seed, "vaccination", {raw(id)});
    vaccinate(p, clock_, cfg_.epidemic, own);
    transitions_.push_back(StatusChange{clock_, id, InfectionStatus::Susceptible, p.status});
  }
  return count;
}

void Simulation::start_day() {
  ++day_;
  std::size_t symptomatic = 0;
  for (const Person& p : pop_.persons) symptomatic += p.status == InfectionStatus::Symptomatic;
  const double fraction = pop_.persons.empty() ? 0.0 : static_cast<double>(symptomatic) / pop_.persons.size();
  const int level = cfg_.policy.alert_level(fraction);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Person& p = pop_.persons[i];
    Rng rng = substream(cfg_.seed, "agenda", {i, static_cast<std::uint64_t>(day_)});
    DailyAgenda agenda;
    if (p.status == InfectionStatus::Dead) {
      agenda.owner = p.id;
      agenda.items.push_back(Activity{ActivityType::Home, p.housing, 0.0, kDaySeconds});
    } else {
      const std::string pattern = sample_pattern(p.cls, cfg_.agenda, rng);
      const TravelMode mode = sample_mode(p.cls, cfg_.agenda, rng);
      agenda = expand_agenda(p, pattern, cfg_.policy.resolve(level, p.status), cfg_.agenda, planner_, mode, rng);
    }
    agents_[i].upcoming = std::move(agenda);
  }
}

void Simulation::add_leg_phases(Agent& agent, const TravelLeg& leg, double now) {
  const double walk = cfg_.travel.speeds.walk_mps;
  auto move = [&](Point a, Point b, double speed) {
    Phase ph;
    ph.kind = Phase::Kind::Move;
    ph.t0 = now;
    ph.t1 = now + distance(a, b) / speed;
    ph.a = a;
    ph.b = b;
    agent.phases.push_back(ph);
    now = ph.t1;
  };
  if (!leg.route->transit) {
    Phase ph;
    ph.kind = Phase::Kind::Move;
    ph.t0 = now;
    ph.t1 = now + leg.duration;
    ph.a = world_.city.sublocation(leg.from).center;
    ph.b = world_.city.sublocation(leg.to).center;
    ph.path = &leg.route->polyline;
    agent.phases.push_back(ph);
    return;
  }
  const TransitItinerary& it = *leg.route->transit;
  const TransitGraph& g = world_.transit;
  move(it.access.from, it.access.to, walk);
  for (std::size_t k = 0; k < it.legs.size(); ++k) {
    const TransitLeg& ride = it.legs[k];
    const TransitLine& line = g.lines()[ride.line];
    const double first = g.offset(ride.line, ride.board_pos) / line.speed_mps;
    const double trip = std::max(0.0, std::ceil((now - first) / line.headway_s - 1e-9));
    const double board = trip * line.headway_s + first;
    const double alight = trip * line.headway_s + g.offset(ride.line, ride.alight_pos) / line.speed_mps;
    const Point stop = g.stop_pos(g.stop_at(ride.line, ride.board_pos));
    Phase wait;
    wait.kind = Phase::Kind::Wait;
    wait.t0 = now;
    wait.t1 = board;
    wait.a = wait.b = stop;
    agent.phases.push_back(wait);
    Phase on;
    on.kind = Phase::Kind::Ride;
    on.t0 = board;
    on.t1 = alight;
    on.vehicle = vehicle_key(ride.line, static_cast<std::uint64_t>(trip));
    agent.phases.push_back(on);
    now = alight;
    if (k + 1 < it.legs.size()) move(it.transfer_walks[k].from, it.transfer_walks[k].to, walk);
  }
  move(it.egress.from, it.egress.to, walk);
}

void Simulation::expand_item(Agent& agent, double now) {
  agent.phases.clear();
  agent.phase = 0;
  const AgendaItem& item = agent.agenda.items[agent.item++];
  if (const auto* act = std::get_if<Activity>(&item)) {
    Phase stay;
    stay.sl = static_cast<std::uint32_t>(world_.city.sublocation_index(act->sl));
    stay.t0 = now;
    stay.t1 = std::max(now, agent.day_start + act->end());
    agent.phases.push_back(stay);
  } else {
    add_leg_phases(agent, std::get<TravelLeg>(item), now);
  }
}

void Simulation::enter_next(Agent& agent, PersonId id, double now) {
  const Phase& done = agent.phases[agent.phase];
  if (done.kind == Phase::Kind::Stay || done.kind == Phase::Kind::Ride) contacts_.reset(id);
  if (done.kind == Phase::Kind::Ride) ++alightings_;

  if (agent.phase + 1 < agent.phases.size()) {
    ++agent.phase;
  } else {
    if (agent.item >= agent.agenda.items.size()) {
      if (agent.upcoming) {
        agent.agenda = std::move(*agent.upcoming);
        agent.upcoming.reset();
        agent.day_start = day_ * kDaySeconds;
        agent.item = 0;
      } else {
        // Nothing planned yet: wait where we are until the next day starts.
        Phase stay;
        stay.sl = static_cast<std::uint32_t>(world_.city.sublocation_index(agent.last_sl));
        stay.t0 = now;
        stay.t1 = (day_ + 1) * kDaySeconds;
        agent.phases.assign(1, stay);
        agent.phase = 0;
        return;
      }
    }
    expand_item(agent, now);
  }
  const Phase& next = agent.phases[agent.phase];
  if (next.kind == Phase::Kind::Stay) agent.last_sl = world_.city.sublocations()[next.sl].id;
  if (next.kind == Phase::Kind::Ride) ++boardings_;
}

void Simulation::advance(Agent& agent, PersonId id, double window_end) {
  const double t = clock_;
  while (true) {
    const Phase& ph = agent.phases[agent.phase];
    const double from = std::max(ph.t0, t);
    const double to = std::min(ph.t1, window_end);
    if (to > from) {
      if (ph.kind == Phase::Kind::Stay)
        presence_.push_back(Presence{ph.sl, Occupant{id, from, to}});
      else if (ph.kind == Phase::Kind::Ride)
        presence_.push_back(Presence{kVehicleBit | ph.vehicle, Occupant{id, from, to}});
    }
    if (ph.t1 >= window_end) break;
    enter_next(agent, id, std::max(ph.t1, t));
  }
}

void Simulation::step() {
  if (clock_ >= (day_ + 1) * kDaySeconds) start_day();
  const double window_end = clock_ + cfg_.dt_s;

  presence_.clear();
  for (std::size_t i = 0; i < agents_.size(); ++i) advance(agents_[i], PersonId(static_cast<std::uint32_t>(i)), window_end);

  std::vector<std::uint64_t> hot;
  for (const Presence& pr : presence_)
    if (pop_.persons[raw(pr.who.person)].status == InfectionStatus::Symptomatic) hot.push_back(pr.space);
  if (!hot.empty()) {
    std::sort(hot.begin(), hot.end());
    hot.erase(std::unique(hot.begin(), hot.end()), hot.end());
    std::vector<Presence> busy;
    for (const Presence& pr : presence_)
      if (std::binary_search(hot.begin(), hot.end(), pr.space)) busy.push_back(pr);
    std::sort(busy.begin(), busy.end(), [](const Presence& x, const Presence& y) {
      return std::tie(x.space, x.who.person, x.who.from) < std::tie(y.space, y.who.person, y.who.from);
    });
    std::vector<Occupant> occupants;
    for (std::size_t s = 0; s < busy.size();) {
      std::size_t e = s;
      occupants.clear();
      while (e < busy.size() && busy[e].space == busy[s].space) occupants.push_back(busy[e++].who);
      const std::uint64_t key = busy[s].space;
      Space space;
      if (key & kVehicleBit) {
        space.kind = PlaceKind::Vehicle;
        space.id = key & ~kVehicleBit;
      } else {
        space = space_of(world_.city.sublocations()[key]);
      }
      Rng rng = substream(cfg_.seed, "contacts", {key, tick_});
      const std::size_t before = events_.size();
      step_contacts(space, occupants, clock_, cfg_.dt_s, pop_.persons, contacts_, cfg_.epidemic, rng, events_,
                    &transitions_);
      for (std::size_t k = before; k < events_.size(); ++k) ++place_counts_[static_cast<std::size_t>(space.kind)];
      s = e;
    }
  }

  for (Person& p : pop_.persons) {
    if (p.next_transition > window_end) continue;
    Rng rng = substream(cfg_.seed, "progress", {raw(p.id), tick_});
    progress_disease(p, window_end, cfg_.epidemic, rng, &transitions_);
  }
  clock_ = window_end;
  ++tick_;
}

void Simulation::run() {
  if (reports_.empty()) reports_.push_back(collect_statistics());
  double next_report = clock_ + cfg_.report_every_s;
  while (!finished()) {
    step();
    if (after_step) after_step(*this);
    if (clock_ + 1e-9 >= next_report || finished()) {
      reports_.push_back(collect_statistics());
      while (next_report <= clock_ + 1e-9) next_report += cfg_.report_every_s;
    }
  }
}

TickReport Simulation::collect_statistics() const {
  TickReport r;
  r.time = clock_;
  r.by_region.assign(world_.city.regions().size(), StatusCounts{});
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto s = static_cast<std::size_t>(pop_.persons[i].status);
    ++r.citywide[s];
    ++r.by_region[region_of_sl_[world_.city.sublocation_index(agents_[i].last_sl)]][s];
  }
  r.infections_by_place = place_counts_;
  return r;
}

Point Simulation::vehicle_position(std::uint64_t key, double t) const {
  const std::size_t l = vehicle_line(key);
  const TransitLine& line = world_.transit.lines()[l];
  const double start = static_cast<double>(vehicle_trip(key)) * line.headway_s;
  const double offset = std::clamp((t - start) * line.speed_mps, 0.0, world_.transit.line_length(l));
  return point_along(line_points_[l], offset);
}

Point Simulation::phase_position(const Phase& ph, double t) const {
  switch (ph.kind) {
    case Phase::Kind::Stay: return world_.city.sublocations()[ph.sl].center;
    case Phase::Kind::Wait: return ph.a;
    case Phase::Kind::Ride: return vehicle_position(ph.vehicle, t);
    case Phase::Kind::Move: {
      const double f = ph.t1 > ph.t0 ? std::clamp((t - ph.t0) / (ph.t1 - ph.t0), 0.0, 1.0) : 1.0;
      if (ph.path != nullptr && ph.path->size() >= 2) return point_along(*ph.path, f * polyline_length(*ph.path));
      return lerp(ph.a, ph.b, f);
    }
  }
  return {};
}

std::vector<AgentView> Simulation::agents() const {
  std::vector<AgentView> out;
  out.reserve(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Agent& a = agents_[i];
    const Phase& ph = a.phases[a.phase];
    AgentView v;
    v.person = pop_.persons[i].id;
    v.status = pop_.persons[i].status;
    v.last_sl = a.last_sl;
    v.position = phase_position(ph, clock_);
    switch (ph.kind) {
      case Phase::Kind::Stay: v.motion = Motion::AtSublocation; break;
      case Phase::Kind::Ride:
        v.motion = Motion::Riding;
        v.vehicle = ph.vehicle;
        break;
      default: v.motion = Motion::Traveling; break;
    }
    out.push_back(v);
  }
  return out;
}

std::size_t Simulation::riders() const {
  std::size_t n = 0;
  for (const Agent& a : agents_) n += a.phases[a.phase].kind == Phase::Kind::Ride;
  return n;
}

double Simulation::max_speed() const {
  const Speeds& s = cfg_.travel.speeds;
  double v = std::max({s.walk_mps, s.bike_mps, s.car_mps});
  for (const TransitLine& l : world_.transit.lines()) v = std::max(v, l.speed_mps);
  return v;
}

CurveShape analyze_curve(std::span<const double> series, std::size_t smoothing, double prominence_fraction) {
  CurveShape shape;
  const std::size_t n = series.size();
  if (n == 0) return shape;
  const std::size_t half = smoothing / 2;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) sum += series[k];
    s[i] = sum / static_cast<double>(hi - lo + 1);
  }
  const auto top = std::max_element(s.begin(), s.end());
  shape.peak_index = static_cast<std::size_t>(top - s.begin());
  shape.peak_value = *top;
  if (shape.peak_value <= 0.0) return shape;

  // Local maxima, with plateaus counted once at their left end.
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && s[i - 1] >= s[i]) continue;
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    if (j + 1 < n && s[j + 1] > s[i]) continue;
    // Prominence: height above the higher of the two lowest points reached
    // before meeting higher ground (or the series end) on either side.
    double left_min = s[i];
    for (std::size_t k = i; k-- > 0;) {
      if (s[k] > s[i]) break;
      left_min = std::min(left_min, s[k]);
    }
    double right_min = s[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (s[k] > s[i]) break;
      right_min = std::min(right_min, s[k]);
    }
    if (s[i] - std::max(left_min, right_min) >= prominence_fraction * shape.peak_value) ++shape.prominent_peaks;
  }
  shape.single_peak =
      shape.prominent_peaks == 1 && shape.peak_value > s.front() && s.back() <= 0.5 * shape.peak_value;
  return shape;
}

}  // namespace citysim
