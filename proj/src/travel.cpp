#include "citysim/travel.hpp"

namespace citysim {

std::string_view to_string(TravelMode m) {
  switch (m) {
    case TravelMode::Walk: return "walk";
    case TravelMode::Bike: return "bike";
    case TravelMode::Car: return "car";
    case TravelMode::Taxi: return "taxi";
    case TravelMode::Transit: return "transit";
  }
  return "?";
}

std::optional<TravelMode> parse_travel_mode(std::string_view s) {
  for (TravelMode m : kAllTravelModes)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

double Speeds::of(TravelMode m) const {
  switch (m) {
    case TravelMode::Walk: return walk_mps;
    case TravelMode::Bike: return bike_mps;
    case TravelMode::Car:
    case TravelMode::Taxi: return car_mps;
    case TravelMode::Transit: return walk_mps;  // only the walking parts
  }
  return walk_mps;
}

TravelPlanner::TravelPlanner(const World& world, TravelConfig cfg) : world_(world), cfg_(std::move(cfg)) {}

const TravelLeg& TravelPlanner::plan(SublocationId from, SublocationId to, TravelMode mode) {
  const auto key = std::make_tuple(from, to, mode);
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, compute(from, to, mode)).first;
  return it->second;
}

TravelLeg TravelPlanner::compute(SublocationId from, SublocationId to, TravelMode mode) const {
  const Point a = world_.city.sublocation(from).center;
  const Point b = world_.city.sublocation(to).center;
  TravelLeg leg;
  leg.from = from;
  leg.to = to;
  leg.mode = mode;
  auto route = std::make_shared<PlannedRoute>();
  if (mode == TravelMode::Transit) {
    TransitSearch search = cfg_.transit;
    search.walk_speed_mps = cfg_.speeds.walk_mps;
    route->transit = route_transit(world_.transit, a, b, search);
    if (route->transit) {
      leg.duration = route->transit->estimated_time_s;
      leg.route = std::move(route);
      return leg;
    }
    leg.mode = TravelMode::Taxi;
  }
  route->road = route_on_roads(world_.roads, a, b, cfg_.road);
  route->polyline = route_polyline(world_.roads, route->road);
  leg.duration = route->road.total_length / cfg_.speeds.of(leg.mode);
  leg.route = std::move(route);
  return leg;
}

}  // namespace citysim
