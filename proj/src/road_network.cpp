#include "citysim/road_network.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace citysim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-9 + 1e-12 * std::max(std::abs(a), std::abs(b)); }

void add_arc(std::vector<RoadGraph::Arc>& arcs, const RoadGraph::Arc& arc, const std::vector<RoadEdge>& edges) {
  for (auto& existing : arcs) {
    if (existing.to != arc.to) continue;
    if (arc.length < existing.length ||
        (arc.length == existing.length && edges[arc.edge].id < edges[existing.edge].id)) {
      existing = arc;
    }
    return;
  }
  arcs.push_back(arc);
}

}  // namespace

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::stable_sort(nodes_.begin(), nodes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_pos_.emplace(nodes_[i].id, i);
  for (std::size_t i = 0; i < edges_.size(); ++i) edge_pos_.emplace(edges_[i].id, i);
  out_.resize(nodes_.size());
  in_.resize(nodes_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto& edge = edges_[e];
    if (edge.length <= 0.0) edge.length = polyline_length(edge.polyline);
    auto f = node_pos_.find(edge.from);
    auto t = node_pos_.find(edge.to);
    if (f == node_pos_.end() || t == node_pos_.end()) continue;  // reported by validate_roads
    add_arc(out_[f->second], {t->second, e, edge.length, true}, edges_);
    add_arc(in_[t->second], {f->second, e, edge.length, true}, edges_);
    if (!edge.oneway) {
      add_arc(out_[t->second], {f->second, e, edge.length, false}, edges_);
      add_arc(in_[f->second], {t->second, e, edge.length, false}, edges_);
    }
  }
}

const RoadNode* RoadGraph::find_node(NodeId id) const {
  auto it = node_pos_.find(id);
  return it == node_pos_.end() ? nullptr : &nodes_[it->second];
}

const RoadEdge* RoadGraph::find_edge(EdgeId id) const {
  auto it = edge_pos_.find(id);
  return it == edge_pos_.end() ? nullptr : &edges_[it->second];
}

const RoadEdge& RoadGraph::edge(EdgeId id) const {
  const auto* e = find_edge(id);
  if (e == nullptr) throw std::out_of_range("unknown road edge " + to_string(id));
  return *e;
}

std::size_t RoadGraph::node_index(NodeId id) const {
  auto it = node_pos_.find(id);
  if (it == node_pos_.end()) throw std::out_of_range("unknown road node " + to_string(id));
  return it->second;
}

std::vector<GraphViolation> validate_roads(const RoadGraph& graph) {
  std::vector<GraphViolation> out;
  std::vector<int> degree(graph.nodes().size(), 0);
  std::unordered_set<NodeId> node_ids;
  for (const auto& n : graph.nodes())
    if (!node_ids.insert(n.id).second) out.push_back({"node " + to_string(n.id), "unique-id", "duplicate node id"});
  std::unordered_set<EdgeId> edge_ids;
  for (const auto& e : graph.edges()) {
    const std::string who = "edge " + to_string(e.id);
    if (!edge_ids.insert(e.id).second) out.push_back({who, "unique-id", "duplicate edge id"});
    const RoadNode* from = graph.find_node(e.from);
    const RoadNode* to = graph.find_node(e.to);
    if (from == nullptr || to == nullptr) {
      out.push_back({who, "endpoint-exists", "edge references an unknown node"});
      continue;
    }
    ++degree[graph.node_index(e.from)];
    ++degree[graph.node_index(e.to)];
    if (e.polyline.size() < 2) {
      out.push_back({who, "polyline", "polyline needs at least two points"});
      continue;
    }
    if (distance(e.polyline.front(), from->pos) > 1e-6 || distance(e.polyline.back(), to->pos) > 1e-6)
      out.push_back({who, "endpoint-coincide", "polyline ends do not coincide with node coordinates"});
    const double arc = polyline_length(e.polyline);
    if (!(arc > 0.0)) out.push_back({who, "positive-length", "edge has zero length"});
    if (std::abs(arc - e.length) > 1e-6 * std::max(arc, 1e-12))
      out.push_back({who, "length-matches-polyline", "declared length differs from polyline arc length"});
  }
  for (std::size_t i = 0; i < degree.size(); ++i)
    if (degree[i] < 1) out.push_back({"node " + to_string(graph.nodes()[i].id), "degree", "node has no incident edge"});
  return out;
}

double segment_length(const RouteSegment& seg) {
  if (const auto* s = std::get_if<StraightSegment>(&seg)) return distance(s->from, s->to);
  const auto& r = std::get<OnRoadSegment>(seg);
  return std::abs(r.exit_offset - r.entry_offset);
}

Point segment_start(const RoadGraph& graph, const RouteSegment& seg) {
  if (const auto* s = std::get_if<StraightSegment>(&seg)) return s->from;
  const auto& r = std::get<OnRoadSegment>(seg);
  return point_along(graph.edge(r.edge).polyline, r.entry_offset);
}

Point segment_end(const RoadGraph& graph, const RouteSegment& seg) {
  if (const auto* s = std::get_if<StraightSegment>(&seg)) return s->to;
  const auto& r = std::get<OnRoadSegment>(seg);
  return point_along(graph.edge(r.edge).polyline, r.exit_offset);
}

std::vector<Point> route_polyline(const RoadGraph& graph, const RoutePath& path) {
  std::vector<Point> pts;
  auto push = [&pts](Point p) {
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
  };
  for (const auto& seg : path.segments) {
    if (const auto* s = std::get_if<StraightSegment>(&seg)) {
      push(s->from);
      push(s->to);
    } else {
      const auto& r = std::get<OnRoadSegment>(seg);
      for (Point p : sub_polyline(graph.edge(r.edge).polyline, r.entry_offset, r.exit_offset)) push(p);
    }
  }
  return pts;
}

std::optional<NodePath> shortest_path(const RoadGraph& graph, NodeId src, NodeId dst) {
  const std::size_t s = graph.node_index(src);
  const std::size_t t = graph.node_index(dst);
  const std::size_t n = graph.nodes().size();

  // Distances to dst over reversed arcs.
  std::vector<double> to_dst(n, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  to_dst[t] = 0.0;
  pq.emplace(0.0, t);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > to_dst[u]) continue;
    for (const auto& arc : graph.in_arcs(u)) {
      const double nd = d + arc.length;
      if (nd < to_dst[arc.to]) {
        to_dst[arc.to] = nd;
        pq.emplace(nd, arc.to);
      }
    }
  }
  if (to_dst[s] == kInf) return std::nullopt;

  // Walk forward choosing the smallest next node id that stays on a shortest
  // path; this yields the lexicographically smallest node sequence.
  NodePath path;
  path.nodes.push_back(graph.nodes()[s].id);
  std::vector<bool> seen(n, false);
  seen[s] = true;
  std::size_t u = s;
  while (u != t) {
    const RoadGraph::Arc* best = nullptr;
    for (const auto& arc : graph.out_arcs(u)) {
      if (seen[arc.to] || to_dst[arc.to] == kInf) continue;
      if (!nearly_equal(arc.length + to_dst[arc.to], to_dst[u])) continue;
      if (best == nullptr || graph.nodes()[arc.to].id < graph.nodes()[best->to].id) best = &arc;
    }
    if (best == nullptr) return std::nullopt;  // only reachable through numerical noise
    path.edges.push_back(graph.edges()[best->edge].id);
    path.length += best->length;
    u = best->to;
    seen[u] = true;
    path.nodes.push_back(graph.nodes()[u].id);
  }
  return path;
}

RoutePath to_route(const RoadGraph& graph, const NodePath& path) {
  RoutePath route;
  route.shape = RouteShape::RoadComposite;
  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const RoadEdge& e = graph.edge(path.edges[i]);
    const bool forward = e.from == path.nodes[i] && e.to == path.nodes[i + 1];
    route.segments.emplace_back(OnRoadSegment{e.id, forward ? 0.0 : e.length, forward ? e.length : 0.0});
    route.total_length += e.length;
  }
  return route;
}

std::optional<RoadProjection> nearest_on_road(const RoadGraph& graph, Point p) {
  std::optional<RoadProjection> best;
  for (const auto& e : graph.edges()) {  // ascending id
    const Projection proj = project_onto_polyline(e.polyline, p);
    if (!best || proj.distance < best->distance) best = RoadProjection{e.id, proj.point, proj.offset, proj.distance};
  }
  return best;
}

std::optional<NodeId> nearest_node(const RoadGraph& graph, Point p) {
  std::optional<NodeId> best;
  double best_d = kInf;
  for (const auto& n : graph.nodes()) {  // ascending id
    const double d = distance(n.pos, p);
    if (d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

RoutePath route_on_roads(const RoadGraph& graph, Point start, Point end, const RoadRouting& opts) {
  RoutePath direct;
  direct.segments.emplace_back(StraightSegment{start, end});
  direct.total_length = distance(start, end);
  direct.shape = RouteShape::Direct;
  if (direct.total_length <= opts.walk_threshold_m) return direct;

  const auto on_start = nearest_on_road(graph, start);
  const auto on_end = nearest_on_road(graph, end);
  if (!on_start || !on_end) {
    spdlog::warn("road routing: graph has no edges, falling back to a straight line");
    direct.shape = RouteShape::Fallback;
    return direct;
  }
  const NodeId node_start = *nearest_node(graph, on_start->point);
  const NodeId node_end = *nearest_node(graph, on_end->point);
  const auto core = shortest_path(graph, node_start, node_end);
  if (!core) {
    spdlog::warn("road routing: node {} cannot reach node {}, falling back to a straight line", raw(node_start),
                 raw(node_end));
    direct.shape = RouteShape::Fallback;
    return direct;
  }

  const Point ns = graph.find_node(node_start)->pos;
  const Point ne = graph.find_node(node_end)->pos;
  RoutePath route;
  route.shape = RouteShape::RoadComposite;
  route.segments.emplace_back(StraightSegment{start, on_start->point});
  route.segments.emplace_back(StraightSegment{on_start->point, ns});
  RoutePath middle = to_route(graph, *core);
  for (auto& seg : middle.segments) route.segments.push_back(seg);
  route.segments.emplace_back(StraightSegment{ne, on_end->point});
  route.segments.emplace_back(StraightSegment{on_end->point, end});
  for (const auto& seg : route.segments) route.total_length += segment_length(seg);
  return route;
}

}  // namespace citysim
