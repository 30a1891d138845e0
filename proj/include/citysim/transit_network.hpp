#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "citysim/city.hpp"
#include "citysim/geometry.hpp"
#include "citysim/ids.hpp"
#include "citysim/road_network.hpp"

namespace citysim {

struct Stop {
  StopId id{};
  Point pos;
};

// One direction of a public transport line. Vehicles leave the first stop
// every `headway_s` seconds and run at constant `speed_mps`.
struct TransitLine {
  LineId id{};
  int direction = 0;
  std::vector<StopId> stops;
  double headway_s = 600.0;
  double speed_mps = 8.0;
};

class TransitGraph {
 public:
  TransitGraph() = default;
  TransitGraph(std::vector<Stop> stops, std::vector<TransitLine> lines);

  const std::vector<Stop>& stops() const { return stops_; }
  // Directed lines, sorted by (line id, direction).
  const std::vector<TransitLine>& lines() const { return lines_; }
  bool empty() const { return stops_.empty(); }

  const Stop* find_stop(StopId id) const;
  std::size_t stop_index(StopId id) const;
  Point stop_pos(std::size_t stop_idx) const { return stops_[stop_idx].pos; }

  // Arc length from the first stop to stop position `pos` of directed line `line`.
  double offset(std::size_t line, std::size_t pos) const { return offsets_[line][pos]; }
  double line_length(std::size_t line) const { return offsets_[line].back(); }

  // Stop index of position `pos` on directed line `line`.
  std::size_t stop_at(std::size_t line, std::size_t pos) const { return line_stop_idx_[line][pos]; }

  struct Occurrence {
    std::size_t line = 0;
    std::size_t pos = 0;
  };
  // Every (directed line, position) at which a stop is served.
  const std::vector<Occurrence>& occurrences(std::size_t stop_idx) const { return occ_[stop_idx]; }

  // Stop indices within `radius` of `center`, ascending by stop id.
  std::vector<std::size_t> stops_within(Point center, double radius) const;

 private:
  std::vector<Stop> stops_;  // sorted by id
  std::vector<TransitLine> lines_;
  std::unordered_map<StopId, std::size_t> stop_pos_;
  std::vector<std::vector<std::size_t>> line_stop_idx_;
  std::vector<std::vector<double>> offsets_;
  std::vector<std::vector<Occurrence>> occ_;
  SpatialIndex index_;
};

std::vector<GraphViolation> validate_transit(const TransitGraph& graph);

// Ex operator: stops within `radius` of `center` (ascending id).
std::vector<StopId> extension(const TransitGraph& graph, Point center, double radius);

// DR operator: the stop right after `stop` on every directed line serving it.
std::vector<StopId> directly_reachable(const TransitGraph& graph, StopId stop);

struct TransitLeg {
  std::size_t line = 0;  // index into TransitGraph::lines()
  LineId line_id{};
  int direction = 0;
  std::size_t board_pos = 0;
  std::size_t alight_pos = 0;
  StopId board{};
  StopId alight{};
};

struct TransitItinerary {
  StraightSegment access;
  std::vector<TransitLeg> legs;
  std::vector<StraightSegment> transfer_walks;  // legs.size() - 1 entries
  StraightSegment egress;
  int transfers = 0;
  double estimated_time_s = 0.0;
  // Expansion levels on each side at which the searches met.
  int start_level = 0;
  int end_level = 0;
};

struct TransitSearch {
  // radii_m[0] is the access/egress catchment; later entries are the
  // transfer radius at each further expansion level (the last one repeats).
  std::vector<double> radii_m{1000.0, 50.0};
  int max_levels = 8;           // bound on start_level + end_level
  double walk_speed_mps = 5.0 / 3.6;

  friend bool operator==(const TransitSearch&, const TransitSearch&) = default;
};

// Bidirectional level-synchronous search from both endpoints. Returns the
// itinerary with fewest transfers, then least estimated time, or nullopt
// when the expansion limit is reached without the two sides meeting.
std::optional<TransitItinerary> route_transit(const TransitGraph& graph, Point start, Point end,
                                              const TransitSearch& opts = {});

// Estimated time of one ride: in-vehicle time plus half a headway of waiting.
double estimated_ride_time(const TransitGraph& graph, std::size_t line, std::size_t board_pos, std::size_t alight_pos);

}  // namespace citysim
