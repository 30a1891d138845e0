#include "citysim/transit_network.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace citysim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double radius_for(const TransitSearch& opts, int level) {
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(level), opts.radii_m.size()) - 1;
  return opts.radii_m[i];
}

// Per-stop best label at one expansion level.
struct Label {
  double time = kInf;
  std::size_t via = kNone;  // predecessor stop index (kNone: access or egress walk)
  std::size_t line = kNone;
  std::size_t from_pos = 0;
  std::size_t to_pos = 0;
};

using LevelLabels = std::vector<Label>;

bool improve(Label& slot, const Label& cand) {
  if (cand.time < slot.time) {
    slot = cand;
    return true;
  }
  return false;
}

class BidirectionalSearch {
 public:
  BidirectionalSearch(const TransitGraph& g, Point start, Point end, const TransitSearch& opts)
      : g_(g), start_(start), end_(end), opts_(opts) {
    const std::size_t n = g.stops().size();
    // Level 1 on both sides: the catchment circles around the endpoints.
    board_s_.emplace_back();  // index 0 unused
    alight_r_.emplace_back();
    alight_e_.emplace_back();
    board_q_.emplace_back();
    LevelLabels s1(n), e1(n);
    for (std::size_t s : g.stops_within(start, radius_for(opts, 1)))
      s1[s].time = distance(start, g.stop_pos(s)) / opts.walk_speed_mps;
    for (std::size_t s : g.stops_within(end, radius_for(opts, 1)))
      e1[s].time = distance(g.stop_pos(s), end) / opts.walk_speed_mps;
    board_s_.push_back(std::move(s1));
    alight_r_.emplace_back();  // no rides at level 1
    alight_e_.push_back(std::move(e1));
    board_q_.emplace_back();
  }

  std::optional<TransitItinerary> run() {
    for (int total = 3; total <= opts_.max_levels; ++total) {
      struct Candidate {
        double time;
        std::size_t stop;
        int i;
      };
      std::optional<Candidate> best;
      for (int i = 1; i < total; ++i) {
        const int j = total - i;
        ensure_start_level(i);
        ensure_end_level(j);
        const LevelLabels& fwd = i == 1 ? board_s_[1] : alight_r_[i];
        const LevelLabels& bwd = i == 1 ? board_q_[j] : alight_e_[j];
        for (std::size_t m = 0; m < fwd.size(); ++m) {
          if (fwd[m].time == kInf || bwd[m].time == kInf) continue;
          const Candidate c{fwd[m].time + bwd[m].time, m, i};
          // Equal transfers at this level; then time, then stop id, then i.
          if (!best || c.time < best->time ||
              (c.time == best->time && g_.stops()[c.stop].id < g_.stops()[best->stop].id)) {
            best = c;
          }
        }
      }
      if (best) return reconstruct(best->stop, best->i, total - best->i, best->time);
    }
    return std::nullopt;
  }

 private:
  // S side: alight labels R_i from board labels S_{i-1}; board labels S_i from R_i by transfer walks.
  void ensure_start_level(int level) {
    while (static_cast<int>(board_s_.size()) <= level) {
      const int i = static_cast<int>(board_s_.size());
      const std::size_t n = g_.stops().size();
      LevelLabels alight(n), board(n);
      const LevelLabels& prev = board_s_[i - 1];
      for (std::size_t s = 0; s < n; ++s) {
        if (prev[s].time == kInf) continue;
        for (const auto& occ : g_.occurrences(s)) {
          const auto& line = g_.lines()[occ.line];
          for (std::size_t m = occ.pos + 1; m < line.stops.size(); ++m) {
            const std::size_t t = g_.stop_at(occ.line, m);
            improve(alight[t], {prev[s].time + estimated_ride_time(g_, occ.line, occ.pos, m), s, occ.line, occ.pos, m});
          }
        }
      }
      const double r = radius_for(opts_, i);
      for (std::size_t a = 0; a < n; ++a) {
        if (alight[a].time == kInf) continue;
        for (std::size_t b : g_.stops_within(g_.stop_pos(a), r))
          improve(board[b], {alight[a].time + distance(g_.stop_pos(a), g_.stop_pos(b)) / opts_.walk_speed_mps, a});
      }
      alight_r_.push_back(std::move(alight));
      board_s_.push_back(std::move(board));
    }
  }

  // E side mirrored: board labels Q_j ride into E_{j-1}; E_j are stops that can
  // walk to a stop of Q_j.
  void ensure_end_level(int level) {
    while (static_cast<int>(alight_e_.size()) <= level) {
      const int j = static_cast<int>(alight_e_.size());
      const std::size_t n = g_.stops().size();
      LevelLabels board(n), alight(n);
      const LevelLabels& prev = alight_e_[j - 1];
      for (std::size_t e = 0; e < n; ++e) {
        if (prev[e].time == kInf) continue;
        for (const auto& occ : g_.occurrences(e)) {
          for (std::size_t k = 0; k < occ.pos; ++k) {
            const std::size_t p = g_.stop_at(occ.line, k);
            improve(board[p], {prev[e].time + estimated_ride_time(g_, occ.line, k, occ.pos), e, occ.line, k, occ.pos});
          }
        }
      }
      const double r = radius_for(opts_, j);
      for (std::size_t b = 0; b < n; ++b) {
        if (board[b].time == kInf) continue;
        for (std::size_t a : g_.stops_within(g_.stop_pos(b), r))
          improve(alight[a], {board[b].time + distance(g_.stop_pos(a), g_.stop_pos(b)) / opts_.walk_speed_mps, b});
      }
      board_q_.push_back(std::move(board));
      alight_e_.push_back(std::move(alight));
    }
  }

  TransitLeg make_leg(const Label& ride) const {
    const auto& line = g_.lines()[ride.line];
    return {ride.line,
            line.id,
            line.direction,
            ride.from_pos,
            ride.to_pos,
            line.stops[ride.from_pos],
            line.stops[ride.to_pos]};
  }

  TransitItinerary reconstruct(std::size_t meet, int i, int j, double time) const {
    TransitItinerary it;
    it.start_level = i;
    it.end_level = j;
    it.estimated_time_s = time;

    // Forward half, collected backwards from the meeting stop.
    std::vector<TransitLeg> head;
    std::size_t stop = meet;
    bool at_alight = i >= 2;  // meeting at an alight position unless i == 1
    for (int level = i; level >= 1;) {
      if (at_alight) {
        const Label& ride = alight_r_[level][stop];
        head.push_back(make_leg(ride));
        stop = ride.via;
        --level;
        at_alight = false;
      } else if (level == 1) {
        break;
      } else {
        stop = board_s_[level][stop].via;
        at_alight = true;
      }
    }
    std::reverse(head.begin(), head.end());
    const std::size_t first_board = stop;

    // Backward half, walked forward from the meeting stop.
    std::vector<TransitLeg> tail;
    stop = meet;
    bool at_board = i == 1;
    for (int level = j; level >= 1;) {
      if (at_board) {
        const Label& ride = board_q_[level][stop];
        tail.push_back(make_leg(ride));
        stop = ride.via;
        --level;
        at_board = false;
      } else if (level == 1) {
        break;
      } else {
        stop = alight_e_[level][stop].via;
        at_board = true;
      }
    }
    const std::size_t last_alight = stop;

    it.legs = std::move(head);
    it.legs.insert(it.legs.end(), tail.begin(), tail.end());
    it.transfers = static_cast<int>(it.legs.size()) - 1;
    it.access = {start_, g_.stop_pos(first_board)};
    it.egress = {g_.stop_pos(last_alight), end_};
    for (std::size_t k = 0; k + 1 < it.legs.size(); ++k) {
      it.transfer_walks.push_back({g_.find_stop(it.legs[k].alight)->pos, g_.find_stop(it.legs[k + 1].board)->pos});
    }
    return it;
  }

  const TransitGraph& g_;
  Point start_;
  Point end_;
  const TransitSearch& opts_;
  std::vector<LevelLabels> board_s_;   // S_i
  std::vector<LevelLabels> alight_r_;  // stops reached by the (i-1)th ride
  std::vector<LevelLabels> alight_e_;  // E_j
  std::vector<LevelLabels> board_q_;   // boarding stops of the (j-1)th ride from the end
};

}  // namespace

TransitGraph::TransitGraph(std::vector<Stop> stops, std::vector<TransitLine> lines)
    : stops_(std::move(stops)), lines_(std::move(lines)) {
  std::stable_sort(stops_.begin(), stops_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(lines_.begin(), lines_.end(), [](const auto& a, const auto& b) {
    return a.id != b.id ? a.id < b.id : a.direction < b.direction;
  });
  std::vector<SpatialIndex::Entry> entries;
  for (std::size_t i = 0; i < stops_.size(); ++i) {
    stop_pos_.emplace(stops_[i].id, i);
    entries.push_back({stops_[i].pos, static_cast<std::uint32_t>(i)});
  }
  index_ = SpatialIndex(std::move(entries));
  occ_.resize(stops_.size());
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    std::vector<std::size_t> idx;
    std::vector<double> off;
    for (std::size_t p = 0; p < lines_[l].stops.size(); ++p) {
      auto it = stop_pos_.find(lines_[l].stops[p]);
      if (it == stop_pos_.end()) {
        // Unknown stops are reported by validate_transit; cut the line here.
        break;
      }
      off.push_back(idx.empty() ? 0.0 : off.back() + distance(stops_[idx.back()].pos, stops_[it->second].pos));
      idx.push_back(it->second);
      occ_[it->second].push_back({l, p});
    }
    if (off.empty()) off.push_back(0.0);
    line_stop_idx_.push_back(std::move(idx));
    offsets_.push_back(std::move(off));
  }
}

const Stop* TransitGraph::find_stop(StopId id) const {
  auto it = stop_pos_.find(id);
  return it == stop_pos_.end() ? nullptr : &stops_[it->second];
}

std::size_t TransitGraph::stop_index(StopId id) const {
  auto it = stop_pos_.find(id);
  if (it == stop_pos_.end()) throw std::out_of_range("unknown stop " + to_string(id));
  return it->second;
}

std::vector<std::size_t> TransitGraph::stops_within(Point center, double radius) const {
  std::vector<std::size_t> out;
  for (const auto& hit : index_.query(center, radius)) out.push_back(hit.key);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GraphViolation> validate_transit(const TransitGraph& graph) {
  std::vector<GraphViolation> out;
  std::unordered_set<StopId> ids;
  for (const auto& s : graph.stops())
    if (!ids.insert(s.id).second) out.push_back({"stop " + to_string(s.id), "unique-id", "duplicate stop id"});
  for (const auto& line : graph.lines()) {
    const std::string who = "line " + to_string(line.id) + "/" + std::to_string(line.direction);
    std::unordered_set<StopId> distinct;
    for (std::size_t p = 0; p < line.stops.size(); ++p) {
      if (graph.find_stop(line.stops[p]) == nullptr)
        out.push_back({who, "stop-exists", "unknown stop " + to_string(line.stops[p])});
      if (p > 0 && line.stops[p] == line.stops[p - 1])
        out.push_back({who, "successive-distinct", "stop " + to_string(line.stops[p]) + " repeated consecutively"});
      distinct.insert(line.stops[p]);
    }
    if (distinct.size() < 2) out.push_back({who, "two-stops", "line visits fewer than 2 distinct stops"});
    if (!(line.headway_s > 0.0)) out.push_back({who, "headway", "headway must be > 0"});
    if (!(line.speed_mps > 0.0)) out.push_back({who, "speed", "speed must be > 0"});
  }
  return out;
}

std::vector<StopId> extension(const TransitGraph& graph, Point center, double radius) {
  std::vector<StopId> out;
  for (std::size_t s : graph.stops_within(center, radius)) out.push_back(graph.stops()[s].id);
  return out;
}

std::vector<StopId> directly_reachable(const TransitGraph& graph, StopId stop) {
  std::vector<StopId> out;
  for (const auto& occ : graph.occurrences(graph.stop_index(stop))) {
    const auto& line = graph.lines()[occ.line];
    if (occ.pos + 1 < line.stops.size()) out.push_back(line.stops[occ.pos + 1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double estimated_ride_time(const TransitGraph& graph, std::size_t line, std::size_t board_pos, std::size_t alight_pos) {
  const auto& l = graph.lines()[line];
  return (graph.offset(line, alight_pos) - graph.offset(line, board_pos)) / l.speed_mps + 0.5 * l.headway_s;
}

std::optional<TransitItinerary> route_transit(const TransitGraph& graph, Point start, Point end,
                                              const TransitSearch& opts) {
  if (graph.empty() || opts.radii_m.empty()) return std::nullopt;
  return BidirectionalSearch(graph, start, end, opts).run();
}

}  // namespace citysim
