#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <tuple>

#include "citysim/city.hpp"
#include "citysim/road_network.hpp"
#include "citysim/transit_network.hpp"

namespace citysim {

// Everything the city file describes.
struct World {
  CityModel city;
  RoadGraph roads;
  TransitGraph transit;
};

enum class TravelMode { Walk, Bike, Car, Taxi, Transit };

inline constexpr TravelMode kAllTravelModes[] = {TravelMode::Walk, TravelMode::Bike, TravelMode::Car, TravelMode::Taxi,
                                                 TravelMode::Transit};

std::string_view to_string(TravelMode m);
std::optional<TravelMode> parse_travel_mode(std::string_view s);

struct Speeds {
  double walk_mps = 5.0 / 3.6;
  double bike_mps = 15.0 / 3.6;
  double car_mps = 30.0 / 3.6;  // also taxi

  double of(TravelMode m) const;

  friend bool operator==(const Speeds&, const Speeds&) = default;
};

struct TravelConfig {
  RoadRouting road;
  TransitSearch transit;
  Speeds speeds;

  friend bool operator==(const TravelConfig&, const TravelConfig&) = default;
};

// Transit trips carry an itinerary; every other mode follows `road`.
struct PlannedRoute {
  RoutePath road;
  std::vector<Point> polyline;  // of `road`
  std::optional<TransitItinerary> transit;
};

// A planned trip between two sublocations. Legs for the same (from, to, mode)
// share one route.
struct TravelLeg {
  SublocationId from{};
  SublocationId to{};
  TravelMode mode = TravelMode::Walk;
  double depart = 0.0;
  double duration = 0.0;
  std::shared_ptr<const PlannedRoute> route;

  double arrive() const { return depart + duration; }
};

// Routes trips and memoises them per (from, to, mode). Transit trips that
// find no itinerary fall back to a taxi on the road network.
class TravelPlanner {
 public:
  TravelPlanner(const World& world, TravelConfig cfg);

  // Leg with depart = 0; callers set the departure time.
  const TravelLeg& plan(SublocationId from, SublocationId to, TravelMode mode);

  const World& world() const { return world_; }
  const TravelConfig& config() const { return cfg_; }

 private:
  TravelLeg compute(SublocationId from, SublocationId to, TravelMode mode) const;

  const World& world_;
  TravelConfig cfg_;
  std::map<std::tuple<SublocationId, SublocationId, TravelMode>, TravelLeg> cache_;
};

}  // namespace citysim
