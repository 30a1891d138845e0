#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>

using namespace citysim;

namespace oracle {

std::optional<double> shortest_by_enumeration(const RoadGraph& g, NodeId src, NodeId dst) {
  std::map<NodeId, std::vector<std::pair<NodeId, double>>> adj;
  for (const RoadEdge& e : g.edges()) {
    adj[e.from].push_back({e.to, e.length});
    if (!e.oneway) adj[e.to].push_back({e.from, e.length});
  }
  std::optional<double> best;
  std::set<NodeId> on_path{src};
  std::function<void(NodeId, double)> dfs = [&](NodeId at, double len) {
    if (at == dst) {
      if (!best || len < *best) best = len;
      return;
    }
    for (const auto& [next, w] : adj[at]) {
      if (on_path.count(next)) continue;
      on_path.insert(next);
      dfs(next, len + w);
      on_path.erase(next);
    }
  };
  dfs(src, 0.0);
  return best;
}

RoadGraph random_road_graph(int n, int extra_edges, double extent, Rng& rng, bool connected) {
  std::vector<RoadNode> nodes;
  for (int i = 0; i < n; ++i)
    nodes.push_back({NodeId(static_cast<std::uint32_t>(i + 1)), {uniform(rng, 0, extent), uniform(rng, 0, extent)}});
  std::vector<RoadEdge> edges;
  auto add = [&](int a, int b, double stretch) {
    RoadEdge e;
    e.id = EdgeId(static_cast<std::uint32_t>(edges.size() + 1));
    e.from = nodes[a].id;
    e.to = nodes[b].id;
    e.polyline = {nodes[a].pos, nodes[b].pos};
    // Lengths at least the straight distance, sometimes longer (winding road).
    e.length = distance(nodes[a].pos, nodes[b].pos) * stretch;
    e.oneway = bernoulli(rng, 0.2);
    edges.push_back(std::move(e));
  };
  if (connected) {
    for (int i = 1; i < n; ++i) {
      add(static_cast<int>(uniform_index(rng, i)), i, 1.0);
      edges.back().oneway = false;
    }
  }
  for (int k = 0; k < extra_edges; ++k) {
    const int a = static_cast<int>(uniform_index(rng, n));
    const int b = static_cast<int>(uniform_index(rng, n));
    if (a == b) continue;
    add(a, b, bernoulli(rng, 0.5) ? 1.0 : uniform(rng, 1.0, 2.0));
  }
  for (RoadEdge& e : edges)
    if (e.length != distance(e.polyline.front(), e.polyline.back())) {
      // Bend the polyline so its length matches the stated length.
      const Point a = e.polyline.front(), b = e.polyline.back();
      const double half = e.length / 2.0, base = distance(a, b) / 2.0;
      const double h = std::sqrt(std::max(0.0, half * half - base * base));
      const Point mid = lerp(a, b, 0.5);
      const Point dir = base > 0 ? Point{-(b.y - a.y) / (2 * base), (b.x - a.x) / (2 * base)} : Point{0, 1};
      e.polyline = {a, mid + dir * h, b};
      e.length = polyline_length(e.polyline);
    }
  return RoadGraph(std::move(nodes), std::move(edges));
}

std::optional<int> fewest_rides(const TransitGraph& g, Point start, Point end, double access_m, double transfer_m) {
  const auto& stops = g.stops();
  const std::size_t n = stops.size();
  auto near = [&](Point p, std::size_t s, double r) { return distance(p, stops[s].pos) <= r; };
  // boarding[s]: fewest rides completed before boarding at s.
  std::vector<int> boarding(n, std::numeric_limits<int>::max());
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s)
    if (near(start, s, access_m)) {
      boarding[s] = 0;
      queue.push_back(s);
    }
  std::vector<bool> alighted(n, false);
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const int rides = boarding[s] + 1;
    for (std::size_t l = 0; l < g.lines().size(); ++l) {
      const auto& line = g.lines()[l];
      for (std::size_t p = 0; p < line.stops.size(); ++p) {
        if (line.stops[p] != stops[s].id) continue;
        for (std::size_t q = p + 1; q < line.stops.size(); ++q) {
          const std::size_t t = g.stop_index(line.stops[q]);
          if (near(end, t, access_m)) return rides;
          if (alighted[t]) continue;
          alighted[t] = true;
          for (std::size_t u = 0; u < n; ++u)
            if (boarding[u] == std::numeric_limits<int>::max() && distance(stops[t].pos, stops[u].pos) <= transfer_m) {
              boarding[u] = rides;
              queue.push_back(u);
            }
        }
      }
    }
  }
  return std::nullopt;
}

TransitGraph random_transit(int n_stops, int n_lines, double extent, Rng& rng) {
  std::vector<Stop> stops;
  for (int i = 0; i < n_stops; ++i) {
    Point p{uniform(rng, 0, extent), uniform(rng, 0, extent)};
    // Some stops sit right next to an earlier one so short transfer walks exist.
    if (i > 0 && bernoulli(rng, 0.3)) {
      const Point base = stops[uniform_index(rng, static_cast<std::uint64_t>(i))].pos;
      p = {base.x + uniform(rng, -30, 30), base.y + uniform(rng, -30, 30)};
    }
    stops.push_back({StopId(static_cast<std::uint32_t>(i + 1)), p});
  }
  std::vector<TransitLine> lines;
  for (int l = 0; l < n_lines; ++l) {
    const int len = 2 + static_cast<int>(uniform_index(rng, 6));
    std::vector<StopId> seq;
    std::set<std::uint32_t> used;
    while (static_cast<int>(seq.size()) < len) {
      const auto s = static_cast<std::uint32_t>(uniform_index(rng, static_cast<std::uint64_t>(n_stops)) + 1);
      if (used.insert(s).second) seq.push_back(StopId(s));
    }
    TransitLine fwd{LineId(static_cast<std::uint32_t>(l + 1)), 0, seq, uniform(rng, 120, 900), uniform(rng, 5, 12)};
    TransitLine back = fwd;
    back.direction = 1;
    std::reverse(back.stops.begin(), back.stops.end());
    lines.push_back(fwd);
    if (bernoulli(rng, 0.7)) lines.push_back(back);
  }
  return TransitGraph(std::move(stops), std::move(lines));
}

double truncated_normal_mean(double mean, double sd, double lo, double hi) {
  const double pi = std::acos(-1.0);
  auto phi = [&](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi); };
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double a = (lo - mean) / sd, b = (hi - mean) / sd;
  return mean + sd * (phi(a) - phi(b)) / (cdf(b) - cdf(a));
}

double ks_uniform(std::vector<double> samples, double lo, double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical_001(std::size_t n) { return 1.949 / std::sqrt(static_cast<double>(n)); }

int road_components(const RoadGraph& g) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const RoadNode& n : g.nodes()) adj[n.id];
  for (const RoadEdge& e : g.edges()) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  std::set<NodeId> seen;
  int components = 0;
  for (const auto& [id, _] : adj) {
    if (seen.count(id)) continue;
    ++components;
    std::vector<NodeId> stack{id};
    seen.insert(id);
    while (!stack.empty()) {
      const NodeId at = stack.back();
      stack.pop_back();
      for (NodeId next : adj[at])
        if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return components;
}

World strip_city(const std::vector<RegionType>& types, int per_region, double radius_m) {
  auto main_class = [](RegionType t) {
    switch (t) {
      case RegionType::Housing: return SlClass::Housing;
      case RegionType::Office: return SlClass::Office;
      case RegionType::School:
      case RegionType::University: return SlClass::Classroom;
      case RegionType::Medical: return SlClass::PatientRoom;
      case RegionType::Recreational: return SlClass::Recreational;
    }
    return SlClass::Housing;
  };
  std::vector<Region> regions;
  std::vector<Sublocation> sls;
  const double B = 1000.0;
  std::uint32_t next = 1;
  for (std::size_t r = 0; r < types.size(); ++r) {
    const double x0 = static_cast<double>(r) * B;
    regions.push_back({RegionId(static_cast<std::uint32_t>(r + 1)), types[r], {{x0, 0}, {x0 + B, 0}, {x0 + B, B}, {x0, B}}});
    const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(per_region))));
    for (int k = 0; k < per_region; ++k) {
      Sublocation sl;
      sl.id = SublocationId(next++);
      sl.cls = main_class(types[r]);
      sl.region = regions.back().id;
      sl.center = {x0 + B * (k % side + 1) / (side + 1), B * (k / side + 1) / (side + 1)};
      sl.radius = radius_m;
      sl.exposure = sl.cls == SlClass::Recreational ? Exposure::Outdoor : Exposure::Indoor;
      sls.push_back(sl);
    }
  }
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  const std::size_t cols = types.size() + 1;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      nodes.push_back({NodeId(static_cast<std::uint32_t>(j * cols + i + 1)), {static_cast<double>(i) * B, j * B}});
  auto edge = [&](std::size_t a, std::size_t b) {
    edges.push_back({EdgeId(static_cast<std::uint32_t>(edges.size() + 1)), nodes[a].id, nodes[b].id,
                     {nodes[a].pos, nodes[b].pos}, B, false});
  };
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i + 1 < cols; ++i) edge(j * cols + i, j * cols + i + 1);
  for (std::size_t i = 0; i < cols; ++i) edge(i, cols + i);
  return World{CityModel(std::move(regions), std::move(sls)), RoadGraph(std::move(nodes), std::move(edges)), {}};
}

}  // namespace oracle
