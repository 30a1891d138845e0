#pragma once

#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "citysim/geometry.hpp"
#include "citysim/ids.hpp"

namespace citysim {

struct RoadNode {
  NodeId id{};
  Point pos;
};

struct RoadEdge {
  EdgeId id{};
  NodeId from{};
  NodeId to{};
  // Full geometry from `from` to `to`, endpoints included.
  std::vector<Point> polyline;
  double length = 0.0;
  bool oneway = false;
};

// Crossings (nodes) joined by road sections (edges). Immutable after
// construction; queries are const and may run concurrently.
class RoadGraph {
 public:
  RoadGraph() = default;
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  bool empty() const { return nodes_.empty(); }

  const RoadNode* find_node(NodeId id) const;
  const RoadEdge* find_edge(EdgeId id) const;
  const RoadEdge& edge(EdgeId id) const;
  std::size_t node_index(NodeId id) const;

  struct Arc {
    std::size_t to = 0;  // node index
    std::size_t edge = 0;  // edge index
    double length = 0.0;
    bool forward = true;  // traversed from polyline start to end
  };
  // Outgoing arcs per node index; parallel edges collapsed to the shortest
  // (lowest edge id on ties).
  const std::vector<Arc>& out_arcs(std::size_t node) const { return out_[node]; }
  const std::vector<Arc>& in_arcs(std::size_t node) const { return in_[node]; }

 private:
  std::vector<RoadNode> nodes_;  // sorted by id
  std::vector<RoadEdge> edges_;  // sorted by id
  std::unordered_map<NodeId, std::size_t> node_pos_;
  std::unordered_map<EdgeId, std::size_t> edge_pos_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
};

struct GraphViolation {
  std::string entity;
  std::string rule;
  std::string detail;
};

std::vector<GraphViolation> validate_roads(const RoadGraph& graph);

struct StraightSegment {
  Point from;
  Point to;
};

struct OnRoadSegment {
  EdgeId edge{};
  double entry_offset = 0.0;  // arc length along the edge polyline
  double exit_offset = 0.0;   // may be < entry when driven backwards
};

using RouteSegment = std::variant<StraightSegment, OnRoadSegment>;

enum class RouteShape {
  Direct,        // single straight line (short trips)
  RoadComposite, // access legs + shortest road path + egress legs
  Fallback       // road core unreachable; straight line
};

struct RoutePath {
  std::vector<RouteSegment> segments;
  double total_length = 0.0;
  RouteShape shape = RouteShape::Direct;
};

double segment_length(const RouteSegment& seg);
Point segment_start(const RoadGraph& graph, const RouteSegment& seg);
Point segment_end(const RoadGraph& graph, const RouteSegment& seg);

// Flattens a route into a point sequence (consecutive duplicates removed).
std::vector<Point> route_polyline(const RoadGraph& graph, const RoutePath& path);

struct NodePath {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  double length = 0.0;
};

// Dijkstra over directed arcs. Among equal-length paths the one with the
// lexicographically smallest node-id sequence is returned.
std::optional<NodePath> shortest_path(const RoadGraph& graph, NodeId src, NodeId dst);

// Converts a node path into whole-edge on-road segments.
RoutePath to_route(const RoadGraph& graph, const NodePath& path);

struct RoadRouting {
  double walk_threshold_m = 3000.0;

  friend bool operator==(const RoadRouting&, const RoadRouting&) = default;
};

struct RoadProjection {
  EdgeId edge{};
  Point point;
  double offset = 0.0;
  double distance = 0.0;
};

// Nearest point on any edge polyline; ties go to the lowest edge id.
std::optional<RoadProjection> nearest_on_road(const RoadGraph& graph, Point p);
// Nearest crossing; ties go to the lowest node id.
std::optional<NodeId> nearest_node(const RoadGraph& graph, Point p);

// Door-to-door route. Short trips are a straight line; longer ones are the
// five-part composition through the road graph.
RoutePath route_on_roads(const RoadGraph& graph, Point start, Point end, const RoadRouting& opts = {});

}  // namespace citysim
