#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "citysim/travel.hpp"

namespace citysim {

inline constexpr const char* kCityFormat = "citysim-city";
inline constexpr int kCityFormatVersion = 1;

// Reads a city document (JSON). Regions or sublocations of unknown type
// are skipped with a warning. Throws ParseError on malformed text or
// structure and IoError when the file cannot be read.
World parse_city(const std::string& text);
World load_city(const std::filesystem::path& path);

std::string city_to_json(const World& world);
void save_city(const World& world, const std::filesystem::path& path);

// GeoJSON FeatureCollection with lon/lat coordinates. Each feature carries
// a "kind" property: region (Polygon), sublocation (Point), road_node
// (Point), road_edge (LineString), stop (Point) or line (properties only).
// Coordinates are projected around the bounding-box centre unless the
// collection has an "anchor": {"lon": .., "lat": ..} member.
World parse_city_geojson(const std::string& text);
std::string city_to_geojson(const World& world);

// Every city, road and transit rule violation, formatted one per line.
std::vector<std::string> validate_world(const World& world);

}  // namespace citysim
