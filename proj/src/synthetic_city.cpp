#include "citysim/synthetic_city.hpp"

#include <algorithm>
#include <cmath>

#include "citysim/errors.hpp"
#include "citysim/rng.hpp"

namespace citysim {

namespace {

struct ClassShare {
  SlClass cls;
  double share;
};

// Sublocation mix per region type; the first entry is the main class.
std::vector<ClassShare> class_mix(RegionType t) {
  switch (t) {
    case RegionType::Housing: return {{SlClass::Housing, 0.9}, {SlClass::Recreational, 0.1}};
    case RegionType::Office: return {{SlClass::Office, 0.85}, {SlClass::Recreational, 0.15}};
    case RegionType::School:
      return {{SlClass::Classroom, 0.85}, {SlClass::Office, 0.1}, {SlClass::Recreational, 0.05}};
    case RegionType::University:
      return {{SlClass::Classroom, 0.8}, {SlClass::Office, 0.1}, {SlClass::Recreational, 0.1}};
    case RegionType::Medical:
      return {{SlClass::PatientRoom, 0.6}, {SlClass::Office, 0.3}, {SlClass::Recreational, 0.1}};
    case RegionType::Recreational: return {{SlClass::Recreational, 1.0}};
  }
  return {{SlClass::Recreational, 1.0}};
}

// Largest-remainder apportionment of n sublocations; the main class gets at
// least one.
std::vector<SlClass> class_sequence(RegionType t, int n) {
  const auto mix = class_mix(t);
  std::vector<int> count(mix.size());
  std::vector<std::pair<double, std::size_t>> rest;
  int used = 0;
  for (std::size_t k = 0; k < mix.size(); ++k) {
    const double exact = mix[k].share * n;
    count[k] = static_cast<int>(std::floor(exact));
    used += count[k];
    rest.push_back({exact - count[k], k});
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < n; k = (k + 1) % rest.size(), ++used) ++count[rest[k].second];
  if (count[0] == 0) {
    const auto donor = std::max_element(count.begin(), count.end());
    --*donor;
    ++count[0];
  }
  std::vector<SlClass> seq;
  for (std::size_t k = 0; k < mix.size(); ++k) seq.insert(seq.end(), static_cast<std::size_t>(count[k]), mix[k].cls);
  return seq;
}

int sl_count(const SyntheticCitySpec& spec, RegionType t) {
  const auto it = spec.sublocations_by_type.find(t);
  return it != spec.sublocations_by_type.end() ? it->second : spec.sublocations_per_region;
}

}  // namespace

std::vector<std::string> check_spec(const SyntheticCitySpec& spec) {
  std::vector<std::string> problems;
  if (spec.cols < 1 || spec.rows < 1) problems.push_back("grid needs at least one column and one row");
  if (!(spec.block_m > 0.0)) problems.push_back("block size must be positive");
  int total = 0;
  for (const auto& [type, n] : spec.regions) {
    if (n < 0) problems.push_back("negative region count for " + std::string(to_string(type)));
    total += n;
  }
  if (total != spec.cols * spec.rows)
    problems.push_back("region counts add up to " + std::to_string(total) + " but the grid has " +
                       std::to_string(spec.cols * spec.rows) + " blocks");
  double tightest = spec.block_m;
  for (const auto& [type, n] : spec.regions) {
    if (n == 0) continue;
    const int k = sl_count(spec, type);
    if (k < 1) {
      problems.push_back("regions of type " + std::string(to_string(type)) + " need at least one sublocation");
      continue;
    }
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
    tightest = std::min(tightest, spec.block_m / (side + 1));
  }
  if (!(spec.sublocation_radius_m > 0.0)) problems.push_back("sublocation radius must be positive");
  else if (spec.sublocation_radius_m * 2.0 > tightest) problems.push_back("sublocations too large to fit their blocks");
  if (spec.lines < 0 || spec.lines > spec.rows + spec.cols + 2) problems.push_back("line count must fit the grid roads");
  if (!(spec.stop_spacing_m > 0.0)) problems.push_back("stop spacing must be positive");
  if (!(spec.headway_s > 0.0) || !(spec.speed_mps > 0.0)) problems.push_back("headway and speed must be positive");
  return problems;
}

World generate_synthetic_city(const SyntheticCitySpec& spec, std::uint64_t seed) {
  if (auto problems = check_spec(spec); !problems.empty()) throw SpecError("synthetic city: " + problems.front());
  Rng rng = substream(seed, "synthetic-city");
  const double B = spec.block_m;

  std::vector<RegionType> types;
  for (const auto& [type, n] : spec.regions) types.insert(types.end(), static_cast<std::size_t>(n), type);
  for (std::size_t i = types.size(); i > 1; --i) std::swap(types[i - 1], types[uniform_index(rng, i)]);

  std::vector<Region> regions;
  std::vector<Sublocation> sls;
  std::uint32_t next_sl = 1;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      const std::size_t b = static_cast<std::size_t>(r * spec.cols + c);
      const double x0 = c * B, y0 = r * B;
      Region region{RegionId(static_cast<std::uint32_t>(b + 1)), types[b], {{x0, y0}, {x0 + B, y0}, {x0 + B, y0 + B}, {x0, y0 + B}}};
      std::vector<SlClass> seq = class_sequence(region.type, sl_count(spec, region.type));
      for (std::size_t i = seq.size(); i > 1; --i) std::swap(seq[i - 1], seq[uniform_index(rng, i)]);
      const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(seq.size()))));
      const double step = B / (side + 1);
      for (std::size_t k = 0; k < seq.size(); ++k) {
        Sublocation sl;
        sl.id = SublocationId(next_sl++);
        sl.cls = seq[k];
        sl.region = region.id;
        sl.center = {x0 + step * static_cast<double>(k % side + 1), y0 + step * static_cast<double>(k / side + 1)};
        sl.radius = spec.sublocation_radius_m;
        sl.exposure = sl.cls == SlClass::Recreational ? Exposure::Outdoor : Exposure::Indoor;
        sls.push_back(sl);
      }
      regions.push_back(std::move(region));
    }
  }

  const int nx = spec.cols + 1, ny = spec.rows + 1;
  auto node_id = [&](int i, int j) { return NodeId(static_cast<std::uint32_t>(j * nx + i + 1)); };
  std::vector<RoadNode> nodes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) nodes.push_back(RoadNode{node_id(i, j), {i * B, j * B}});
  std::vector<RoadEdge> edges;
  std::uint32_t next_edge = 1;
  auto add_edge = [&](int i0, int j0, int i1, int j1) {
    RoadEdge e;
    e.id = EdgeId(next_edge++);
    e.from = node_id(i0, j0);
    e.to = node_id(i1, j1);
    e.polyline = {{i0 * B, j0 * B}, {i1 * B, j1 * B}};
    e.length = B;
    edges.push_back(std::move(e));
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) add_edge(i, j, i + 1, j);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j) add_edge(i, j, i, j + 1);

  // Lines use horizontal roads from the middle outwards, then vertical ones.
  std::vector<std::pair<bool, int>> corridors;
  for (int k = 0; k < ny; ++k) corridors.push_back({true, (ny / 2 + (k % 2 ? -(k + 1) / 2 : k / 2) + ny) % ny});
  for (int k = 0; k < nx; ++k) corridors.push_back({false, (nx / 2 + (k % 2 ? -(k + 1) / 2 : k / 2) + nx) % nx});
  std::vector<Stop> stops;
  std::vector<TransitLine> lines;
  std::uint32_t next_stop = 1;
  for (int l = 0; l < spec.lines; ++l) {
    const auto [horizontal, index] = corridors[static_cast<std::size_t>(l)];
    const double length = horizontal ? spec.cols * B : spec.rows * B;
    const int gaps = std::max(1, static_cast<int>(std::round(length / spec.stop_spacing_m)));
    TransitLine fwd;
    fwd.id = LineId(static_cast<std::uint32_t>(l + 1));
    fwd.headway_s = spec.headway_s;
    fwd.speed_mps = spec.speed_mps;
    for (int s = 0; s <= gaps; ++s) {
      const double along = length * s / gaps;
      const Point p = horizontal ? Point{along, index * B} : Point{index * B, along};
      stops.push_back(Stop{StopId(next_stop), p});
      fwd.stops.push_back(StopId(next_stop++));
    }
    TransitLine back = fwd;
    back.direction = 1;
    std::reverse(back.stops.begin(), back.stops.end());
    lines.push_back(std::move(fwd));
    lines.push_back(std::move(back));
  }

  World w{CityModel(std::move(regions), std::move(sls)), RoadGraph(std::move(nodes), std::move(edges)),
          TransitGraph(std::move(stops), std::move(lines))};
  w.city.anchor = spec.anchor;
  return w;
}

}  // namespace citysim
