#include "citysim/city_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "citysim/errors.hpp"

namespace citysim {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_of_offset(text, e.byte));
  }
}

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

std::uint32_t id_of(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 ||
      j.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
    bad(where, "expected a non-negative integer id");
  return j.get<std::uint32_t>();
}

std::string text_of(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Point point_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where, "expected [x, y]");
  return {number(j[0], where), number(j[1], where)};
}

std::vector<Point> points_of(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected a list of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const json& list_field(const json& obj, const char* key, const std::string& where) {
  static const json empty = json::array();
  if (!obj.contains(key)) return empty;
  const json& j = obj.at(key);
  if (!j.is_array()) bad(where + "." + key, "expected a list");
  return j;
}

// Sections shared by the native and GeoJSON readers.
struct CityParts {
  std::vector<Region> regions;
  std::vector<Sublocation> sublocations;
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  std::vector<Stop> stops;
  std::vector<TransitLine> lines;
  std::optional<GeoAnchor> anchor;
};

World assemble(CityParts parts) {
  // Sublocations of skipped regions go too.
  std::vector<RegionId> kept;
  for (const Region& r : parts.regions) kept.push_back(r.id);
  std::sort(kept.begin(), kept.end());
  std::erase_if(parts.sublocations, [&](const Sublocation& sl) {
    if (std::binary_search(kept.begin(), kept.end(), sl.region)) return false;
    spdlog::warn("skipping sublocation {}: region {} was not loaded", raw(sl.id), raw(sl.region));
    return true;
  });
  World w{CityModel(std::move(parts.regions), std::move(parts.sublocations)),
          RoadGraph(std::move(parts.nodes), std::move(parts.edges)),
          TransitGraph(std::move(parts.stops), std::move(parts.lines))};
  w.city.anchor = parts.anchor;
  return w;
}

std::optional<Region> read_region(const json& j, const std::string& where, std::vector<Point> boundary) {
  const std::string type = text_of(field(j, "type", where), where + ".type");
  const auto rt = parse_region_type(type);
  const RegionId id{id_of(field(j, "id", where), where + ".id")};
  if (!rt) {
    spdlog::warn("skipping region {} of unknown type '{}'", raw(id), type);
    return std::nullopt;
  }
  return Region{id, *rt, std::move(boundary)};
}

std::optional<Sublocation> read_sublocation(const json& j, const std::string& where, Point center) {
  Sublocation sl;
  sl.id = SublocationId{id_of(field(j, "id", where), where + ".id")};
  const std::string cls = text_of(field(j, "class", where), where + ".class");
  const auto c = parse_sl_class(cls);
  if (!c) {
    spdlog::warn("skipping sublocation {} of unknown class '{}'", raw(sl.id), cls);
    return std::nullopt;
  }
  sl.cls = *c;
  sl.region = RegionId{id_of(field(j, "region", where), where + ".region")};
  sl.center = center;
  sl.radius = number(field(j, "radius", where), where + ".radius");
  if (j.contains("exposure")) {
    const auto e = parse_exposure(text_of(j.at("exposure"), where + ".exposure"));
    if (!e) bad(where + ".exposure", "expected 'indoor' or 'outdoor'");
    sl.exposure = *e;
  }
  return sl;
}

RoadEdge read_edge(const json& j, const std::string& where, std::vector<Point> polyline) {
  RoadEdge e;
  e.id = EdgeId{id_of(field(j, "id", where), where + ".id")};
  e.from = NodeId{id_of(field(j, "from", where), where + ".from")};
  e.to = NodeId{id_of(field(j, "to", where), where + ".to")};
  e.polyline = std::move(polyline);
  if (j.contains("length")) e.length = number(j.at("length"), where + ".length");
  if (j.contains("oneway")) {
    if (!j.at("oneway").is_boolean()) bad(where + ".oneway", "expected true or false");
    e.oneway = j.at("oneway").get<bool>();
  }
  return e;
}

TransitLine read_line(const json& j, const std::string& where) {
  TransitLine l;
  l.id = LineId{id_of(field(j, "id", where), where + ".id")};
  if (j.contains("direction")) l.direction = static_cast<int>(id_of(j.at("direction"), where + ".direction"));
  const json& stops = field(j, "stops", where);
  if (!stops.is_array()) bad(where + ".stops", "expected a list of stop ids");
  for (std::size_t i = 0; i < stops.size(); ++i)
    l.stops.push_back(StopId{id_of(stops[i], where + ".stops[" + std::to_string(i) + "]")});
  if (j.contains("headway_s")) l.headway_s = number(j.at("headway_s"), where + ".headway_s");
  if (j.contains("speed_mps")) l.speed_mps = number(j.at("speed_mps"), where + ".speed_mps");
  return l;
}

ojson point_json(Point p) { return ojson::array({p.x, p.y}); }

ojson points_json(const std::vector<Point>& pts) {
  ojson a = ojson::array();
  for (Point p : pts) a.push_back(point_json(p));
  return a;
}

ojson line_json(const TransitLine& l) {
  ojson stops = ojson::array();
  for (StopId s : l.stops) stops.push_back(raw(s));
  return ojson{{"id", raw(l.id)}, {"direction", l.direction}, {"stops", stops}, {"headway_s", l.headway_s},
               {"speed_mps", l.speed_mps}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

World parse_city(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("city document must be a JSON object", 1);
  if (text_of(field(doc, "format", "city"), "format") != kCityFormat)
    throw ParseError(std::string("unsupported city format, expected '") + kCityFormat + "'");
  const double version = number(field(doc, "version", "city"), "version");
  if (version != kCityFormatVersion) throw ParseError("unsupported city format version " + field(doc, "version", "city").dump());

  CityParts parts;
  if (doc.contains("anchor")) {
    const json& a = doc.at("anchor");
    parts.anchor = GeoAnchor{number(field(a, "lon", "anchor"), "anchor.lon"), number(field(a, "lat", "anchor"), "anchor.lat")};
  }
  const json& regions = list_field(doc, "regions", "city");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    auto r = read_region(regions[i], where, points_of(field(regions[i], "boundary", where), where + ".boundary"));
    if (r) parts.regions.push_back(std::move(*r));
  }
  const json& sls = list_field(doc, "sublocations", "city");
  for (std::size_t i = 0; i < sls.size(); ++i) {
    const std::string where = "sublocations[" + std::to_string(i) + "]";
    auto sl = read_sublocation(sls[i], where, point_of(field(sls[i], "center", where), where + ".center"));
    if (sl) parts.sublocations.push_back(*sl);
  }
  if (doc.contains("roads")) {
    const json& roads = doc.at("roads");
    const json& nodes = list_field(roads, "nodes", "roads");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string where = "roads.nodes[" + std::to_string(i) + "]";
      parts.nodes.push_back(RoadNode{NodeId{id_of(field(nodes[i], "id", where), where + ".id")},
                                     point_of(field(nodes[i], "pos", where), where + ".pos")});
    }
    const json& edges = list_field(roads, "edges", "roads");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string where = "roads.edges[" + std::to_string(i) + "]";
      parts.edges.push_back(read_edge(edges[i], where, points_of(field(edges[i], "polyline", where), where + ".polyline")));
    }
  }
  if (doc.contains("transit")) {
    const json& transit = doc.at("transit");
    const json& stops = list_field(transit, "stops", "transit");
    for (std::size_t i = 0; i < stops.size(); ++i) {
      const std::string where = "transit.stops[" + std::to_string(i) + "]";
      parts.stops.push_back(Stop{StopId{id_of(field(stops[i], "id", where), where + ".id")},
                                 point_of(field(stops[i], "pos", where), where + ".pos")});
    }
    const json& lines = list_field(transit, "lines", "transit");
    for (std::size_t i = 0; i < lines.size(); ++i) parts.lines.push_back(read_line(lines[i], "transit.lines[" + std::to_string(i) + "]"));
  }
  return assemble(std::move(parts));
}

World load_city(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".geojson") return parse_city_geojson(text);
  return parse_city(text);
}

std::string city_to_json(const World& world) {
  ojson doc;
  doc["format"] = kCityFormat;
  doc["version"] = kCityFormatVersion;
  if (world.city.anchor) doc["anchor"] = ojson{{"lon", world.city.anchor->lon0}, {"lat", world.city.anchor->lat0}};
  ojson regions = ojson::array();
  for (const Region& r : world.city.regions())
    regions.push_back(ojson{{"id", raw(r.id)}, {"type", to_string(r.type)}, {"boundary", points_json(r.boundary)}});
  doc["regions"] = std::move(regions);
  ojson sls = ojson::array();
  for (const Sublocation& sl : world.city.sublocations())
    sls.push_back(ojson{{"id", raw(sl.id)},
                        {"class", to_string(sl.cls)},
                        {"region", raw(sl.region)},
                        {"center", point_json(sl.center)},
                        {"radius", sl.radius},
                        {"exposure", to_string(sl.exposure)}});
  doc["sublocations"] = std::move(sls);
  ojson nodes = ojson::array();
  for (const RoadNode& n : world.roads.nodes()) nodes.push_back(ojson{{"id", raw(n.id)}, {"pos", point_json(n.pos)}});
  ojson edges = ojson::array();
  for (const RoadEdge& e : world.roads.edges())
    edges.push_back(ojson{{"id", raw(e.id)},
                          {"from", raw(e.from)},
                          {"to", raw(e.to)},
                          {"polyline", points_json(e.polyline)},
                          {"length", e.length},
                          {"oneway", e.oneway}});
  doc["roads"] = ojson{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  ojson stops = ojson::array();
  for (const Stop& s : world.transit.stops()) stops.push_back(ojson{{"id", raw(s.id)}, {"pos", point_json(s.pos)}});
  ojson lines = ojson::array();
  for (const TransitLine& l : world.transit.lines()) lines.push_back(line_json(l));
  doc["transit"] = ojson{{"stops", std::move(stops)}, {"lines", std::move(lines)}};
  return doc.dump(1) + "\n";
}

void save_city(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << city_to_json(world);
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

struct Bounds {
  double lo_lon = std::numeric_limits<double>::infinity(), hi_lon = -lo_lon;
  double lo_lat = lo_lon, hi_lat = -lo_lon;

  void add(const json& c) {
    if (c.is_array() && c.size() >= 2 && c[0].is_number() && c[1].is_number()) {
      lo_lon = std::min(lo_lon, c[0].get<double>());
      hi_lon = std::max(hi_lon, c[0].get<double>());
      lo_lat = std::min(lo_lat, c[1].get<double>());
      hi_lat = std::max(hi_lat, c[1].get<double>());
      return;
    }
    if (c.is_array())
      for (const auto& x : c) add(x);
  }
};

}  // namespace

World parse_city_geojson(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
    throw ParseError("GeoJSON city must be a FeatureCollection", 1);
  const json& features = field(doc, "features", "geojson");
  if (!features.is_array()) bad("features", "expected a list");

  GeoAnchor anchor;
  if (doc.contains("anchor")) {
    const json& a = doc.at("anchor");
    anchor = GeoAnchor{number(field(a, "lon", "anchor"), "anchor.lon"), number(field(a, "lat", "anchor"), "anchor.lat")};
  } else {
    Bounds b;
    for (const auto& f : features)
      if (f.contains("geometry") && f.at("geometry").is_object()) b.add(f.at("geometry").value("coordinates", json()));
    if (b.lo_lon <= b.hi_lon) anchor = GeoAnchor{(b.lo_lon + b.hi_lon) / 2.0, (b.lo_lat + b.hi_lat) / 2.0};
  }
  auto project = [&](const json& c, const std::string& where) {
    const Point ll = point_of(c, where);
    return project_lonlat(anchor, ll.x, ll.y);
  };
  auto project_all = [&](const json& c, const std::string& where) {
    if (!c.is_array()) bad(where, "expected a coordinate list");
    std::vector<Point> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back(project(c[i], where + "[" + std::to_string(i) + "]"));
    return out;
  };

  CityParts parts;
  parts.anchor = anchor;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string where = "features[" + std::to_string(i) + "]";
    const json& f = features[i];
    const json& props = field(f, "properties", where);
    const std::string kind = text_of(field(props, "kind", where + ".properties"), where + ".properties.kind");
    const std::string pw = where + ".properties";
    auto geometry = [&](const char* type) -> const json& {
      const json& g = field(f, "geometry", where);
      if (text_of(field(g, "type", where + ".geometry"), where + ".geometry.type") != type)
        bad(where + ".geometry", std::string("expected a ") + type);
      return field(g, "coordinates", where + ".geometry");
    };
    if (kind == "region") {
      const json& rings = geometry("Polygon");
      if (!rings.is_array() || rings.empty()) bad(where + ".geometry", "polygon without rings");
      std::vector<Point> ring = project_all(rings[0], where + ".geometry.coordinates[0]");
      if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
      if (auto r = read_region(props, pw, std::move(ring))) parts.regions.push_back(std::move(*r));
    } else if (kind == "sublocation") {
      if (auto sl = read_sublocation(props, pw, project(geometry("Point"), where + ".geometry.coordinates")))
        parts.sublocations.push_back(*sl);
    } else if (kind == "road_node") {
      parts.nodes.push_back(RoadNode{NodeId{id_of(field(props, "id", pw), pw + ".id")},
                                     project(geometry("Point"), where + ".geometry.coordinates")});
    } else if (kind == "road_edge") {
      RoadEdge e = read_edge(props, pw, project_all(geometry("LineString"), where + ".geometry.coordinates"));
      e.length = 0.0;  // recomputed from the projected geometry
      parts.edges.push_back(std::move(e));
    } else if (kind == "stop") {
      parts.stops.push_back(Stop{StopId{id_of(field(props, "id", pw), pw + ".id")},
                                 project(geometry("Point"), where + ".geometry.coordinates")});
    } else if (kind == "line") {
      parts.lines.push_back(read_line(props, pw));
    } else {
      spdlog::warn("skipping GeoJSON feature {} of unknown kind '{}'", i, kind);
    }
  }
  return assemble(std::move(parts));
}

std::string city_to_geojson(const World& world) {
  const GeoAnchor anchor = world.city.anchor.value_or(GeoAnchor{0.0, 0.0});
  auto lonlat = [&](Point p) {
    double lon = 0.0, lat = 0.0;
    unproject(anchor, p, lon, lat);
    return ojson::array({lon, lat});
  };
  auto lonlats = [&](const std::vector<Point>& pts) {
    ojson a = ojson::array();
    for (Point p : pts) a.push_back(lonlat(p));
    return a;
  };
  auto feature = [](ojson geometry, ojson props) {
    return ojson{{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(props)}};
  };
  ojson features = ojson::array();
  for (const Region& r : world.city.regions()) {
    std::vector<Point> ring = r.boundary;
    if (!ring.empty()) ring.push_back(ring.front());
    features.push_back(feature(ojson{{"type", "Polygon"}, {"coordinates", ojson::array({lonlats(ring)})}},
                               ojson{{"kind", "region"}, {"id", raw(r.id)}, {"type", to_string(r.type)}}));
  }
  for (const Sublocation& sl : world.city.sublocations())
    features.push_back(feature(ojson{{"type", "Point"}, {"coordinates", lonlat(sl.center)}},
                               ojson{{"kind", "sublocation"},
                                     {"id", raw(sl.id)},
                                     {"class", to_string(sl.cls)},
                                     {"region", raw(sl.region)},
                                     {"radius", sl.radius},
                                     {"exposure", to_string(sl.exposure)}}));
  for (const RoadNode& n : world.roads.nodes())
    features.push_back(feature(ojson{{"type", "Point"}, {"coordinates", lonlat(n.pos)}},
                               ojson{{"kind", "road_node"}, {"id", raw(n.id)}}));
  for (const RoadEdge& e : world.roads.edges())
    features.push_back(feature(
        ojson{{"type", "LineString"}, {"coordinates", lonlats(e.polyline)}},
        ojson{{"kind", "road_edge"}, {"id", raw(e.id)}, {"from", raw(e.from)}, {"to", raw(e.to)}, {"oneway", e.oneway}}));
  for (const Stop& s : world.transit.stops())
    features.push_back(feature(ojson{{"type", "Point"}, {"coordinates", lonlat(s.pos)}},
                               ojson{{"kind", "stop"}, {"id", raw(s.id)}}));
  for (const TransitLine& l : world.transit.lines()) {
    ojson props = line_json(l);
    props["kind"] = "line";
    features.push_back(ojson{{"type", "Feature"}, {"geometry", nullptr}, {"properties", std::move(props)}});
  }
  ojson doc{{"type", "FeatureCollection"}, {"anchor", ojson{{"lon", anchor.lon0}, {"lat", anchor.lat0}}}, {"features", std::move(features)}};
  return doc.dump(1) + "\n";
}

std::vector<std::string> validate_world(const World& world) {
  std::vector<std::string> out;
  for (const Violation& v : validate_city(world.city)) out.push_back(v.entity + ": " + v.rule + " (" + v.detail + ")");
  for (const GraphViolation& v : validate_roads(world.roads)) out.push_back(v.entity + ": " + v.rule + " (" + v.detail + ")");
  for (const GraphViolation& v : validate_transit(world.transit))
    out.push_back(v.entity + ": " + v.rule + " (" + v.detail + ")");
  return out;
}

}  // namespace citysim
