#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citysim/geometry.hpp"
#include "citysim/ids.hpp"

namespace citysim {

enum class RegionType { Housing, Office, School, University, Medical, Recreational };
enum class SlClass { Housing, Office, Classroom, PatientRoom, Recreational };
enum class Exposure { Indoor, Outdoor };

inline constexpr RegionType kAllRegionTypes[] = {RegionType::Housing, RegionType::Office,  RegionType::School,
                                                 RegionType::University, RegionType::Medical, RegionType::Recreational};
inline constexpr SlClass kAllSlClasses[] = {SlClass::Housing, SlClass::Office, SlClass::Classroom, SlClass::PatientRoom,
                                            SlClass::Recreational};

std::string_view to_string(RegionType t);
std::string_view to_string(SlClass c);
std::string_view to_string(Exposure e);
std::optional<RegionType> parse_region_type(std::string_view s);
std::optional<SlClass> parse_sl_class(std::string_view s);
std::optional<Exposure> parse_exposure(std::string_view s);

// Which sublocation classes a region of the given type may contain.
bool class_allowed_in(SlClass cls, RegionType region);

struct Region {
  RegionId id{};
  RegionType type = RegionType::Housing;
  std::vector<Point> boundary;
};

struct Sublocation {
  SublocationId id{};
  SlClass cls = SlClass::Housing;
  RegionId region{};
  Point center;
  double radius = 1.0;
  Exposure exposure = Exposure::Indoor;
};

// Uniform-grid bucket index over a set of points. Each point carries an
// opaque 32-bit key; results are ordered by distance, then key.
class SpatialIndex {
 public:
  struct Entry {
    Point point;
    std::uint32_t key = 0;
  };
  struct Hit {
    std::uint32_t key = 0;
    double distance = 0.0;
  };

  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Entry> entries, double cell_size = 0.0);

  // All entries with distance(point, center) <= radius.
  std::vector<Hit> query(Point center, double radius) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::int64_t cell_of(double v, double origin) const;

  std::vector<Entry> entries_;
  double cell_ = 1.0;
  Point origin_;
  std::int64_t nx_ = 0;
  std::int64_t ny_ = 0;
  std::vector<std::uint32_t> cell_start_;  // CSR layout, size nx*ny + 1
  std::vector<std::uint32_t> cell_items_;
};

// Regions and sublocations of a city. Immutable once constructed.
class CityModel {
 public:
  CityModel() = default;
  CityModel(std::vector<Region> regions, std::vector<Sublocation> sublocations);

  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<Sublocation>& sublocations() const { return sublocations_; }

  const Region* find_region(RegionId id) const;
  const Sublocation* find_sublocation(SublocationId id) const;
  const Sublocation& sublocation(SublocationId id) const;
  std::size_t sublocation_index(SublocationId id) const;

  // All sublocations of one class, in ascending id order.
  const std::vector<SublocationId>& of_class(SlClass cls) const;

  const SpatialIndex& index() const { return index_; }

  std::optional<GeoAnchor> anchor;

 private:
  std::vector<Region> regions_;
  std::vector<Sublocation> sublocations_;  // sorted by id
  std::unordered_map<RegionId, std::size_t> region_pos_;
  std::unordered_map<SublocationId, std::size_t> sl_pos_;
  std::vector<std::vector<SublocationId>> by_class_;
  SpatialIndex index_;
};

struct Violation {
  std::string entity;  // e.g. "region 4", "sublocation 17"
  std::string rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_city(const CityModel& city);

std::vector<const Sublocation*> sublocations_near(const CityModel& city, Point point, double radius,
                                                  std::optional<SlClass> class_filter = std::nullopt);

}  // namespace citysim
