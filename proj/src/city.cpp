#include "citysim/city.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace citysim {

std::string_view to_string(RegionType t) {
  switch (t) {
    case RegionType::Housing: return "housing";
    case RegionType::Office: return "office";
    case RegionType::School: return "school";
    case RegionType::University: return "university";
    case RegionType::Medical: return "medical";
    case RegionType::Recreational: return "recreational";
  }
  return "?";
}

std::string_view to_string(SlClass c) {
  switch (c) {
    case SlClass::Housing: return "housing";
    case SlClass::Office: return "office";
    case SlClass::Classroom: return "classroom";
    case SlClass::PatientRoom: return "patient_room";
    case SlClass::Recreational: return "recreational";
  }
  return "?";
}

std::string_view to_string(Exposure e) { return e == Exposure::Indoor ? "indoor" : "outdoor"; }

std::optional<RegionType> parse_region_type(std::string_view s) {
  for (RegionType t : kAllRegionTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::optional<SlClass> parse_sl_class(std::string_view s) {
  for (SlClass c : kAllSlClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::optional<Exposure> parse_exposure(std::string_view s) {
  if (s == "indoor") return Exposure::Indoor;
  if (s == "outdoor") return Exposure::Outdoor;
  return std::nullopt;
}

bool class_allowed_in(SlClass cls, RegionType region) {
  using enum SlClass;
  switch (region) {
    case RegionType::Housing: return cls == Housing || cls == Office || cls == Recreational || cls == Classroom;
    case RegionType::Office: return cls == Office || cls == Recreational;
    case RegionType::School:
    case RegionType::University: return cls == Housing || cls == Office || cls == Classroom || cls == Recreational;
    case RegionType::Medical: return cls == Office || cls == PatientRoom || cls == Recreational;
    case RegionType::Recreational: return cls == Recreational;
  }
  return false;
}

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(std::vector<Entry> entries, double cell_size) : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  double min_x = entries_[0].point.x, max_x = min_x;
  double min_y = entries_[0].point.y, max_y = min_y;
  for (const auto& e : entries_) {
    min_x = std::min(min_x, e.point.x);
    max_x = std::max(max_x, e.point.x);
    min_y = std::min(min_y, e.point.y);
    max_y = std::max(max_y, e.point.y);
  }
  const double w = std::max(max_x - min_x, 1.0);
  const double h = std::max(max_y - min_y, 1.0);
  if (cell_size <= 0.0) cell_size = std::max(std::sqrt(w * h / static_cast<double>(entries_.size())), 1.0);
  cell_ = cell_size;
  origin_ = {min_x, min_y};
  nx_ = static_cast<std::int64_t>(w / cell_) + 1;
  ny_ = static_cast<std::int64_t>(h / cell_) + 1;

  const auto ncells = static_cast<std::size_t>(nx_ * ny_);
  std::vector<std::uint32_t> counts(ncells + 1, 0);
  std::vector<std::size_t> cell_idx(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto cx = cell_of(entries_[i].point.x, origin_.x);
    const auto cy = cell_of(entries_[i].point.y, origin_.y);
    cell_idx[i] = static_cast<std::size_t>(cy * nx_ + cx);
    ++counts[cell_idx[i] + 1];
  }
  for (std::size_t c = 1; c <= ncells; ++c) counts[c] += counts[c - 1];
  cell_start_ = counts;
  cell_items_.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) cell_items_[counts[cell_idx[i]]++] = static_cast<std::uint32_t>(i);
}

std::int64_t SpatialIndex::cell_of(double v, double origin) const {
  const double c = std::floor((v - origin) / cell_);
  return static_cast<std::int64_t>(std::clamp(c, -1.0, static_cast<double>(std::max(nx_, ny_)) + 1.0));
}

std::vector<SpatialIndex::Hit> SpatialIndex::query(Point center, double radius) const {
  std::vector<Hit> hits;
  if (entries_.empty() || radius < 0.0) return hits;
  const auto x0 = std::max<std::int64_t>(0, cell_of(center.x - radius, origin_.x));
  const auto x1 = std::min<std::int64_t>(nx_ - 1, cell_of(center.x + radius, origin_.x));
  const auto y0 = std::max<std::int64_t>(0, cell_of(center.y - radius, origin_.y));
  const auto y1 = std::min<std::int64_t>(ny_ - 1, cell_of(center.y + radius, origin_.y));
  for (std::int64_t cy = y0; cy <= y1; ++cy) {
    for (std::int64_t cx = x0; cx <= x1; ++cx) {
      const auto c = static_cast<std::size_t>(cy * nx_ + cx);
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const Entry& e = entries_[cell_items_[k]];
        const double d = distance(e.point, center);
        if (d <= radius) hits.push_back({e.key, d});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.key < b.key;
  });
  return hits;
}

// ---------------------------------------------------------------------------
// CityModel

CityModel::CityModel(std::vector<Region> regions, std::vector<Sublocation> sublocations)
    : regions_(std::move(regions)), sublocations_(std::move(sublocations)) {
  std::stable_sort(sublocations_.begin(), sublocations_.end(),
                   [](const Sublocation& a, const Sublocation& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < regions_.size(); ++i) region_pos_.emplace(regions_[i].id, i);
  by_class_.resize(std::size(kAllSlClasses));
  std::vector<SpatialIndex::Entry> entries;
  entries.reserve(sublocations_.size());
  for (std::size_t i = 0; i < sublocations_.size(); ++i) {
    const auto& sl = sublocations_[i];
    sl_pos_.emplace(sl.id, i);
    by_class_[static_cast<std::size_t>(sl.cls)].push_back(sl.id);
    entries.push_back({sl.center, static_cast<std::uint32_t>(i)});
  }
  index_ = SpatialIndex(std::move(entries));
}

const Region* CityModel::find_region(RegionId id) const {
  auto it = region_pos_.find(id);
  return it == region_pos_.end() ? nullptr : &regions_[it->second];
}

const Sublocation* CityModel::find_sublocation(SublocationId id) const {
  auto it = sl_pos_.find(id);
  return it == sl_pos_.end() ? nullptr : &sublocations_[it->second];
}

const Sublocation& CityModel::sublocation(SublocationId id) const {
  const auto* sl = find_sublocation(id);
  if (sl == nullptr) throw std::out_of_range("unknown sublocation " + to_string(id));
  return *sl;
}

std::size_t CityModel::sublocation_index(SublocationId id) const {
  auto it = sl_pos_.find(id);
  if (it == sl_pos_.end()) throw std::out_of_range("unknown sublocation " + to_string(id));
  return it->second;
}

const std::vector<SublocationId>& CityModel::of_class(SlClass cls) const {
  return by_class_[static_cast<std::size_t>(cls)];
}

// ---------------------------------------------------------------------------

std::vector<Violation> validate_city(const CityModel& city) {
  std::vector<Violation> out;
  std::unordered_set<RegionId> region_ids;
  for (const auto& r : city.regions()) {
    const std::string who = "region " + to_string(r.id);
    if (!region_ids.insert(r.id).second) out.push_back({who, "unique-id", "duplicate region id"});
    if (r.boundary.size() < 3) {
      out.push_back({who, "polygon-vertices", "boundary has fewer than 3 vertices"});
    } else if (!is_simple_polygon(r.boundary)) {
      out.push_back({who, "simple-polygon", "boundary is self-intersecting or degenerate"});
    }
  }
  std::unordered_set<SublocationId> sl_ids;
  for (const auto& sl : city.sublocations()) {
    const std::string who = "sublocation " + to_string(sl.id);
    if (!sl_ids.insert(sl.id).second) out.push_back({who, "unique-id", "duplicate sublocation id"});
    if (!(sl.radius > 0.0)) out.push_back({who, "positive-radius", "radius must be > 0"});
    const Region* region = city.find_region(sl.region);
    if (region == nullptr) {
      out.push_back({who, "region-exists", "unknown region " + to_string(sl.region)});
      continue;
    }
    if (!class_allowed_in(sl.cls, region->type)) {
      out.push_back({who, "class-in-region",
                     std::string(to_string(sl.cls)) + " not permitted in " + std::string(to_string(region->type)) +
                         " region " + to_string(region->id)});
    }
    if (region->boundary.size() >= 3 && !point_in_polygon(region->boundary, sl.center)) {
      out.push_back({who, "center-in-region", "center lies outside region " + to_string(region->id)});
    }
  }
  return out;
}

std::vector<const Sublocation*> sublocations_near(const CityModel& city, Point point, double radius,
                                                  std::optional<SlClass> class_filter) {
  std::vector<const Sublocation*> out;
  if (radius < 0.0) return out;
  // Hits come back ordered by (distance, position); positions follow id order.
  for (const auto& hit : city.index().query(point, radius)) {
    const Sublocation& sl = city.sublocations()[hit.key];
    if (class_filter && sl.cls != *class_filter) continue;
    out.push_back(&sl);
  }
  return out;
}

}  // namespace citysim
