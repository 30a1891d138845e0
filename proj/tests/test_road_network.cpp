#include <doctest.h>

#include <algorithm>

#include "citysim/road_network.hpp"
#include "oracles.hpp"

using namespace citysim;

namespace {

RoadGraph grid(int n, double spacing) {
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  auto id = [&](int i, int j) { return NodeId(static_cast<std::uint32_t>(j * n + i + 1)); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) nodes.push_back({id(i, j), {i * spacing, j * spacing}});
  auto add = [&](int i0, int j0, int i1, int j1) {
    edges.push_back({EdgeId(static_cast<std::uint32_t>(edges.size() + 1)), id(i0, j0), id(i1, j1),
                     {{i0 * spacing, j0 * spacing}, {i1 * spacing, j1 * spacing}}, spacing, false});
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + 1 < n; ++i) add(i, j, i + 1, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j + 1 < n; ++j) add(i, j, i, j + 1);
  return RoadGraph(std::move(nodes), std::move(edges));
}

}  // namespace

TEST_SUITE("road_network") {
  TEST_CASE("shortest paths equal exhaustive enumeration") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
      const RoadGraph g = oracle::random_road_graph(7, 8, 1000, rng, trial % 5 != 0);
      for (const RoadNode& a : g.nodes())
        for (const RoadNode& b : g.nodes()) {
          const auto expected = oracle::shortest_by_enumeration(g, a.id, b.id);
          const auto got = shortest_path(g, a.id, b.id);
          REQUIRE(expected.has_value() == got.has_value());
          if (!got) continue;
          CHECK(got->length == doctest::Approx(*expected).epsilon(1e-12));
          CHECK(got->nodes.front() == a.id);
          CHECK(got->nodes.back() == b.id);
          CHECK(got->edges.size() + 1 == got->nodes.size());
          double sum = 0;
          for (EdgeId e : got->edges) sum += g.edge(e).length;
          CHECK(sum == doctest::Approx(got->length).epsilon(1e-12));
        }
    }
  }

  TEST_CASE("one-way edges are only driven forwards") {
    std::vector<RoadNode> nodes{{NodeId(1), {0, 0}}, {NodeId(2), {100, 0}}, {NodeId(3), {50, 80}}};
    std::vector<RoadEdge> edges{{EdgeId(1), NodeId(1), NodeId(2), {{0, 0}, {100, 0}}, 100, true},
                                {EdgeId(2), NodeId(2), NodeId(3), {{100, 0}, {50, 80}}, 200, false},
                                {EdgeId(3), NodeId(3), NodeId(1), {{50, 80}, {0, 0}}, 200, false}};
    const RoadGraph g(nodes, edges);
    CHECK(shortest_path(g, NodeId(1), NodeId(2))->length == doctest::Approx(100));
    CHECK(shortest_path(g, NodeId(2), NodeId(1))->length == doctest::Approx(400));
  }

  TEST_CASE("ties resolve to the smallest node sequence") {
    const RoadGraph g = grid(2, 100);
    const auto p = shortest_path(g, NodeId(1), NodeId(4));
    REQUIRE(p);
    CHECK(p->nodes == std::vector<NodeId>{NodeId(1), NodeId(2), NodeId(4)});
  }

  TEST_CASE("short trips are a single straight line") {
    const RoadGraph g = grid(5, 1000);
    const auto r = route_on_roads(g, {100, 100}, {2100, 2100});
    CHECK(r.shape == RouteShape::Direct);
    REQUIRE(r.segments.size() == 1);
    CHECK(r.total_length == doctest::Approx(distance({100, 100}, {2100, 2100})));
    const auto exactly = route_on_roads(g, {0, 0}, {3000, 0});
    CHECK(exactly.shape == RouteShape::Direct);
  }

  TEST_CASE("long trips go access, road core, egress") {
    const RoadGraph g = grid(5, 1000);
    const Point a{120, 430}, b{3900, 3300};
    const auto r = route_on_roads(g, a, b);
    REQUIRE(r.shape == RouteShape::RoadComposite);
    REQUIRE(r.segments.size() >= 5);
    CHECK(std::holds_alternative<StraightSegment>(r.segments[0]));
    CHECK(std::holds_alternative<StraightSegment>(r.segments[1]));
    CHECK(std::holds_alternative<StraightSegment>(r.segments[r.segments.size() - 2]));
    CHECK(std::holds_alternative<StraightSegment>(r.segments.back()));
    for (std::size_t k = 2; k + 2 < r.segments.size(); ++k) CHECK(std::holds_alternative<OnRoadSegment>(r.segments[k]));
    CHECK(segment_start(g, r.segments.front()) == a);
    CHECK(segment_end(g, r.segments.back()) == b);
    for (std::size_t k = 0; k + 1 < r.segments.size(); ++k)
      CHECK(distance(segment_end(g, r.segments[k]), segment_start(g, r.segments[k + 1])) < 1e-9);
    // a projects to (0,430), nearest node (0,0); b projects to (4000,3300),
    // nearest node (4000,3000); the grid core between them is 7000 m.
    CHECK(r.total_length == doctest::Approx(120 + 430 + 7000 + 300 + 100));
    const auto poly = route_polyline(g, r);
    CHECK(polyline_length(poly) == doctest::Approx(r.total_length));
  }

  TEST_CASE("unreachable cores fall back to a straight line") {
    std::vector<RoadNode> nodes{{NodeId(1), {0, 0}}, {NodeId(2), {100, 0}}, {NodeId(3), {9000, 0}},
                                {NodeId(4), {9100, 0}}};
    std::vector<RoadEdge> edges{{EdgeId(1), NodeId(1), NodeId(2), {{0, 0}, {100, 0}}, 100, false},
                                {EdgeId(2), NodeId(3), NodeId(4), {{9000, 0}, {9100, 0}}, 100, false}};
    const RoadGraph g(nodes, edges);
    const auto r = route_on_roads(g, {0, 10}, {9100, 10});
    CHECK(r.shape == RouteShape::Fallback);
    CHECK(r.segments.size() == 1);
  }

  TEST_CASE("validation finds dangling references") {
    std::vector<RoadNode> nodes{{NodeId(1), {0, 0}}, {NodeId(2), {100, 0}}};
    std::vector<RoadEdge> edges{{EdgeId(1), NodeId(1), NodeId(7), {{0, 0}, {100, 0}}, 100, false}};
    const auto v = validate_roads(RoadGraph(nodes, edges));
    CHECK_FALSE(v.empty());
    CHECK(validate_roads(grid(3, 10)).empty());
  }
}
