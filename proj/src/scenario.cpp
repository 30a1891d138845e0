#include "citysim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "citysim/city_io.hpp"
#include "citysim/errors.hpp"

namespace citysim {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const YAML::Node& at, const std::string& path, const std::string& msg) {
    const int line = line_of(at);
    problems.push_back((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + path + ": " + msg);
  }

  // False when `n` is not a map; unknown keys are reported.
  bool map(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!n.IsMap()) {
      fail(n, path, "expected a mapping");
      return false;
    }
    for (const auto& kv : n) {
      const std::string key = kv.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(kv.first, join(path, key), "unknown key");
    }
    return true;
  }

  template <class T>
  bool scalar(const YAML::Node& n, const std::string& path, T& out) {
    if (!n.IsScalar()) {
      fail(n, path, "expected a single value");
      return false;
    }
    try {
      out = n.as<T>();
      return true;
    } catch (const YAML::Exception&) {
      fail(n, path, "cannot read '" + n.Scalar() + "'");
      return false;
    }
  }

  // Reads parent[key] into `out` if present; `ok` validates the value.
  template <class T>
  void get(const YAML::Node& parent, const std::string& path, const char* key, T& out,
           const std::function<bool(const T&)>& ok = {}, const char* rule = "") {
    const YAML::Node n = parent[key];
    if (!n) return;
    T v{};
    if (!scalar(n, join(path, key), v)) return;
    if (ok && !ok(v)) {
      fail(n, join(path, key), rule);
      return;
    }
    out = v;
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& path) {
    std::vector<double> out;
    if (!n.IsSequence()) {
      fail(n, path, "expected a list of numbers");
      return out;
    }
    for (std::size_t i = 0; i < n.size(); ++i) {
      double v = 0.0;
      if (scalar(n[i], path + "[" + std::to_string(i) + "]", v)) out.push_back(v);
    }
    return out;
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
};

auto positive = [](const double& v) { return v > 0.0; };
auto non_negative = [](const double& v) { return v >= 0.0; };
auto unit = [](const double& v) { return v >= 0.0 && v <= 1.0; };

void read_range_pair(Reader& r, const YAML::Node& parent, const std::string& path, const char* key, double& lo,
                     double& hi, bool days) {
  const YAML::Node n = parent[key];
  if (!n) return;
  const auto v = r.numbers(n, Reader::join(path, key));
  if (v.size() != 2) {
    if (n.IsSequence()) r.fail(n, Reader::join(path, key), "expected [low, high]");
    return;
  }
  if (!(v[0] <= v[1]) || (days && !(v[0] > 0.0)) || v[0] < 0.0) {
    r.fail(n, Reader::join(path, key), days ? "need 0 < low <= high" : "need 0 <= low <= high");
    return;
  }
  lo = v[0];
  hi = v[1];
}

std::vector<Bin> read_bins(Reader& r, const YAML::Node& n, const std::string& path) {
  std::vector<Bin> out;
  if (!n.IsSequence() || n.size() == 0) {
    r.fail(n, path, "expected a non-empty list of [low, high, weight]");
    return out;
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const auto v = r.numbers(n[i], p);
    if (v.size() != 3 || v[0] > v[1] || v[2] < 0.0) {
      r.fail(n[i], p, "expected [low, high, weight] with low <= high and weight >= 0");
      continue;
    }
    out.push_back(Bin{v[0], v[1], v[2]});
  }
  return out;
}

void read_population(Reader& r, const YAML::Node& n, DemographicConfig& d) {
  const std::string path = "population";
  if (!r.map(n, path,
             {"size", "age_bins", "household_sizes", "commute_km_bins", "college_fraction", "male_fraction",
              "susceptibility", "immune_fraction", "workplace_mix"}))
    return;
  r.get<std::size_t>(n, path, "size", d.population);
  if (n["age_bins"]) d.age_bins = read_bins(r, n["age_bins"], path + ".age_bins");
  if (n["commute_km_bins"]) d.commute_km_bins = read_bins(r, n["commute_km_bins"], path + ".commute_km_bins");
  if (const YAML::Node h = n["household_sizes"]) {
    d.household_size_pmf.clear();
    if (!h.IsSequence() || h.size() == 0) r.fail(h, path + ".household_sizes", "expected a list of [size, weight]");
    for (std::size_t i = 0; h.IsSequence() && i < h.size(); ++i) {
      const std::string p = path + ".household_sizes[" + std::to_string(i) + "]";
      const auto v = r.numbers(h[i], p);
      if (v.size() != 2 || v[0] < 1.0 || v[0] != std::floor(v[0]) || v[1] < 0.0) {
        r.fail(h[i], p, "expected [size >= 1, weight >= 0]");
        continue;
      }
      d.household_size_pmf.push_back(SizeWeight{static_cast<int>(v[0]), v[1]});
    }
  }
  r.get<double>(n, path, "college_fraction", d.college_fraction, unit, "must be in [0,1]");
  r.get<double>(n, path, "male_fraction", d.male_fraction, unit, "must be in [0,1]");
  r.get<double>(n, path, "susceptibility", d.susceptibility, unit, "must be in [0,1]");
  r.get<double>(n, path, "immune_fraction", d.immune_fraction, unit, "must be in [0,1]");
  if (const YAML::Node w = n["workplace_mix"]) {
    const std::string p = path + ".workplace_mix";
    if (r.map(w, p, {"office", "recreational", "patient_room"})) {
      r.get<double>(w, p, "office", d.workplace_mix.office, non_negative, "must be >= 0");
      r.get<double>(w, p, "recreational", d.workplace_mix.recreational, non_negative, "must be >= 0");
      r.get<double>(w, p, "patient_room", d.workplace_mix.patient_room, non_negative, "must be >= 0");
    }
  }
}

void read_duration(Reader& r, const YAML::Node& parent, const std::string& path, const char* key, DurationStats& d) {
  const YAML::Node n = parent[key];
  if (!n) return;
  const std::string p = Reader::join(path, key);
  if (!r.map(n, p, {"mean_s", "sd_s"})) return;
  r.get<double>(n, p, "mean_s", d.mean_s, positive, "must be positive");
  r.get<double>(n, p, "sd_s", d.sd_s, non_negative, "must be >= 0");
}

void read_agenda(Reader& r, const YAML::Node& n, AgendaConfig& a) {
  const std::string path = "agenda";
  if (!r.map(n, path,
             {"patterns", "home", "work", "recreation", "medical", "min_duration_s", "max_duration_s",
              "work_start_window_s", "outing_start_window_s", "elder_recreation_probability",
              "recreation_distance_floor_m", "modal_split"}))
    return;
  if (const YAML::Node p = n["patterns"]) {
    const std::string pp = path + ".patterns";
    if (!p.IsMap() || p.size() == 0) {
      r.fail(p, pp, "expected a mapping of pattern to percent");
    } else {
      a.patterns.patterns.clear();
      for (const auto& kv : p) {
        const std::string pattern = kv.first.Scalar();
        double pct = 0.0;
        if (!r.scalar(kv.second, pp + "." + pattern, pct)) continue;
        const bool letters = !pattern.empty() && pattern.find_first_not_of("HW*") == std::string::npos;
        if (!letters || pattern.front() != 'H' || pattern.back() != 'H')
          r.fail(kv.first, pp + "." + pattern, "patterns use H, W and * and start and end with H");
        if (pct < 0.0) r.fail(kv.second, pp + "." + pattern, "percent must be >= 0");
        a.patterns.patterns.push_back(PatternShare{pattern, pct});
      }
      if (std::abs(a.patterns.total() - 100.0) > 0.1) r.fail(p, pp, "percentages must add up to 100 (+-0.1)");
    }
  }
  read_duration(r, n, path, "home", a.home);
  read_duration(r, n, path, "work", a.work);
  read_duration(r, n, path, "recreation", a.recreation);
  read_duration(r, n, path, "medical", a.medical);
  r.get<double>(n, path, "min_duration_s", a.min_duration_s, positive, "must be positive");
  r.get<double>(n, path, "max_duration_s", a.max_duration_s, positive, "must be positive");
  if (a.min_duration_s >= a.max_duration_s) r.fail(n, path, "min_duration_s must be below max_duration_s");
  read_range_pair(r, n, path, "work_start_window_s", a.work_start_earliest_s, a.work_start_latest_s, false);
  read_range_pair(r, n, path, "outing_start_window_s", a.outing_start_earliest_s, a.outing_start_latest_s, false);
  if (a.work_start_latest_s >= kDaySeconds || a.outing_start_latest_s >= kDaySeconds)
    r.fail(n, path, "start windows must end before midnight");
  r.get<double>(n, path, "elder_recreation_probability", a.elder_recreation_probability, unit, "must be in [0,1]");
  r.get<double>(n, path, "recreation_distance_floor_m", a.recreation_distance_floor_m, positive, "must be positive");
  if (const YAML::Node m = n["modal_split"]) {
    const std::string mp = path + ".modal_split";
    if (r.map(m, mp, {"child_under_3", "school_age", "adult", "college_student", "elder"})) {
      for (const auto& kv : m) {
        const auto cls = parse_person_class(kv.first.Scalar());
        if (!cls) continue;
        const std::string p = mp + "." + kv.first.Scalar();
        ModalSplit& s = a.modal_split[static_cast<int>(*cls)];
        if (!r.map(kv.second, p, {"walk", "bike", "car", "transit"})) continue;
        r.get<double>(kv.second, p, "walk", s.walk, non_negative, "must be >= 0");
        r.get<double>(kv.second, p, "bike", s.bike, non_negative, "must be >= 0");
        r.get<double>(kv.second, p, "car", s.car, non_negative, "must be >= 0");
        r.get<double>(kv.second, p, "transit", s.transit, non_negative, "must be >= 0");
        if (s.walk + s.bike + s.car + s.transit <= 0.0) r.fail(kv.second, p, "weights must not all be zero");
      }
    }
  }
}

void read_adjustment(Reader& r, const YAML::Node& n, const std::string& path, BehaviorAdjustment& a) {
  if (!r.map(n, path, {"home_stay_factor", "recreation_avoidance", "work_time_factor"})) return;
  r.get<double>(n, path, "home_stay_factor", a.home_stay_factor, [](const double& v) { return v >= 1.0; },
                "must be >= 1");
  r.get<double>(n, path, "recreation_avoidance", a.recreation_avoidance, unit, "must be in [0,1]");
  r.get<double>(n, path, "work_time_factor", a.work_time_factor, [](const double& v) { return v > 0.0 && v <= 1.0; },
                "must be in (0,1]");
}

void read_behavior(Reader& r, const YAML::Node& n, BehaviorPolicy& b) {
  const std::string path = "behavior";
  if (!r.map(n, path, {"alert_thresholds", "by_alert_level", "when_symptomatic"})) return;
  if (const YAML::Node t = n["alert_thresholds"]) {
    b.alert_thresholds = r.numbers(t, path + ".alert_thresholds");
    for (std::size_t i = 0; i < b.alert_thresholds.size(); ++i)
      if (!unit(b.alert_thresholds[i]) || (i > 0 && b.alert_thresholds[i] <= b.alert_thresholds[i - 1]))
        r.fail(t, path + ".alert_thresholds", "thresholds must increase within [0,1]");
  }
  if (const YAML::Node l = n["by_alert_level"]) {
    if (!l.IsSequence()) {
      r.fail(l, path + ".by_alert_level", "expected a list");
    } else {
      b.by_alert_level.assign(l.size(), BehaviorAdjustment{});
      for (std::size_t i = 0; i < l.size(); ++i)
        read_adjustment(r, l[i], path + ".by_alert_level[" + std::to_string(i) + "]", b.by_alert_level[i]);
    }
  }
  if (const YAML::Node s = n["when_symptomatic"]) read_adjustment(r, s, path + ".when_symptomatic", b.when_symptomatic);
}

void read_epidemic(Reader& r, const YAML::Node& n, EpidemicParams& e) {
  const std::string path = "epidemic";
  if (!r.map(n, path,
             {"sigma_per_h", "d_star_m", "outdoor_factor", "incubation_days", "symptomatic_days", "vaccination_days",
              "mortality"}))
    return;
  if (!n["sigma_per_h"]) r.fail(n, path + ".sigma_per_h", "required");
  r.get<double>(n, path, "sigma_per_h", e.sigma_per_h, non_negative, "must be >= 0");
  r.get<double>(n, path, "d_star_m", e.d_star_m, positive, "must be positive");
  r.get<double>(n, path, "outdoor_factor", e.outdoor_factor, [](const double& v) { return v > 0.0 && v <= 1.0; },
                "must be in (0,1]");
  read_range_pair(r, n, path, "incubation_days", e.incubation.lo_days, e.incubation.hi_days, true);
  read_range_pair(r, n, path, "symptomatic_days", e.symptomatic.lo_days, e.symptomatic.hi_days, true);
  read_range_pair(r, n, path, "vaccination_days", e.vaccination.lo_days, e.vaccination.hi_days, true);
  r.get<double>(n, path, "mortality", e.mortality, unit, "must be in [0,1]");
}

void read_travel(Reader& r, const YAML::Node& n, TravelConfig& t) {
  const std::string path = "travel";
  if (!r.map(n, path, {"walk_threshold_m", "transit_radii_m", "transit_max_levels", "walk_mps", "bike_mps", "car_mps"}))
    return;
  r.get<double>(n, path, "walk_threshold_m", t.road.walk_threshold_m, non_negative, "must be >= 0");
  if (const YAML::Node radii = n["transit_radii_m"]) {
    const auto v = r.numbers(radii, path + ".transit_radii_m");
    if (v.empty() || std::any_of(v.begin(), v.end(), [](double x) { return !(x > 0.0); }))
      r.fail(radii, path + ".transit_radii_m", "expected a non-empty list of positive radii");
    else
      t.transit.radii_m = v;
  }
  r.get<int>(n, path, "transit_max_levels", t.transit.max_levels, [](const int& v) { return v >= 2; }, "must be >= 2");
  r.get<double>(n, path, "walk_mps", t.speeds.walk_mps, positive, "must be positive");
  r.get<double>(n, path, "bike_mps", t.speeds.bike_mps, positive, "must be positive");
  r.get<double>(n, path, "car_mps", t.speeds.car_mps, positive, "must be positive");
  t.transit.walk_speed_mps = t.speeds.walk_mps;
}

void read_synthetic(Reader& r, const YAML::Node& n, SyntheticCitySpec& s) {
  const std::string path = "synthetic_city";
  if (!r.map(n, path,
             {"cols", "rows", "block_m", "regions", "sublocations_per_region", "sublocations_by_type",
              "sublocation_radius_m", "lines", "stop_spacing_m", "headway_s", "speed_mps", "anchor"}))
    return;
  r.get<int>(n, path, "cols", s.cols);
  r.get<int>(n, path, "rows", s.rows);
  r.get<double>(n, path, "block_m", s.block_m);
  auto type_counts = [&](const char* key, std::map<RegionType, int>& out) {
    const YAML::Node m = n[key];
    if (!m) return;
    const std::string p = path + "." + key;
    if (!m.IsMap()) {
      r.fail(m, p, "expected a mapping of region type to count");
      return;
    }
    out.clear();
    for (const auto& kv : m) {
      const auto type = parse_region_type(kv.first.Scalar());
      if (!type) {
        r.fail(kv.first, p + "." + kv.first.Scalar(), "unknown region type");
        continue;
      }
      int count = 0;
      if (r.scalar(kv.second, p + "." + kv.first.Scalar(), count)) out[*type] = count;
    }
  };
  type_counts("regions", s.regions);
  r.get<int>(n, path, "sublocations_per_region", s.sublocations_per_region);
  type_counts("sublocations_by_type", s.sublocations_by_type);
  r.get<double>(n, path, "sublocation_radius_m", s.sublocation_radius_m);
  r.get<int>(n, path, "lines", s.lines);
  r.get<double>(n, path, "stop_spacing_m", s.stop_spacing_m);
  r.get<double>(n, path, "headway_s", s.headway_s);
  r.get<double>(n, path, "speed_mps", s.speed_mps);
  if (const YAML::Node a = n["anchor"]) {
    if (r.map(a, path + ".anchor", {"lon", "lat"})) {
      GeoAnchor g;
      r.get<double>(a, path + ".anchor", "lon", g.lon0);
      r.get<double>(a, path + ".anchor", "lat", g.lat0);
      s.anchor = g;
    }
  }
  for (const std::string& problem : check_spec(s)) r.fail(n, path, problem);
}

void read_seeding(Reader& r, const YAML::Node& n, SeedingConfig& s) {
  const std::string path = "seeding";
  if (!r.map(n, path, {"count", "ids", "vaccinated_fraction"})) return;
  r.get<std::size_t>(n, path, "count", s.count);
  if (const YAML::Node ids = n["ids"]) {
    if (!ids.IsSequence()) r.fail(ids, path + ".ids", "expected a list of person ids");
    for (std::size_t i = 0; ids.IsSequence() && i < ids.size(); ++i) {
      std::uint32_t id = 0;
      if (r.scalar(ids[i], path + ".ids[" + std::to_string(i) + "]", id)) s.ids.push_back(PersonId(id));
    }
  }
  r.get<double>(n, path, "vaccinated_fraction", s.vaccinated_fraction, unit, "must be in [0,1]");
}

void read_output(Reader& r, const YAML::Node& n, OutputConfig& o) {
  const std::string path = "output";
  if (!r.map(n, path, {"dir", "report_every_s", "snapshot_every_s"})) return;
  r.get<std::string>(n, path, "dir", o.dir);
  r.get<double>(n, path, "report_every_s", o.report_every_s, positive, "must be positive");
  r.get<double>(n, path, "snapshot_every_s", o.snapshot_every_s, non_negative, "must be >= 0");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("invalid YAML: " + e.msg, e.mark.line + 1);
  }
  Reader r;
  ScenarioConfig cfg;
  if (!r.map(doc, "", {"version", "city", "synthetic_city", "seed", "days", "dt_s", "population", "agenda", "behavior",
                        "epidemic", "travel", "seeding", "output"}))
    throw ValidationError(r.problems);

  int version = kScenarioVersion;
  r.get<int>(doc, "", "version", version);
  if (version != kScenarioVersion) r.fail(doc["version"], "version", "unsupported scenario version");

  if (!doc["seed"]) r.fail(doc, "seed", "required");
  r.get<std::uint64_t>(doc, "", "seed", cfg.seed);
  r.get<int>(doc, "", "days", cfg.days, [](const int& v) { return v >= 1; }, "must be >= 1");
  r.get<double>(doc, "", "dt_s", cfg.dt_s, positive, "must be positive");

  const bool has_city = static_cast<bool>(doc["city"]);
  const bool has_synth = static_cast<bool>(doc["synthetic_city"]);
  if (has_city == has_synth) r.fail(doc, "city", "give exactly one of 'city' and 'synthetic_city'");
  if (has_city) {
    std::string file;
    if (r.scalar(doc["city"], "city", file)) {
      std::filesystem::path p(file);
      if (p.is_relative()) p = base_dir / p;
      p = p.lexically_normal();
      if (!std::filesystem::exists(p)) r.fail(doc["city"], "city", "file not found: " + p.string());
      cfg.city_file = std::filesystem::absolute(p).lexically_normal().string();
    }
  }
  if (has_synth) {
    SyntheticCitySpec spec;
    read_synthetic(r, doc["synthetic_city"], spec);
    cfg.synthetic_city = spec;
  }

  if (doc["population"]) read_population(r, doc["population"], cfg.demographics);
  if (doc["agenda"]) read_agenda(r, doc["agenda"], cfg.agenda);
  if (doc["behavior"]) read_behavior(r, doc["behavior"], cfg.behavior);
  if (doc["epidemic"])
    read_epidemic(r, doc["epidemic"], cfg.epidemic);
  else
    r.fail(doc, "epidemic.sigma_per_h", "required");
  if (doc["travel"]) read_travel(r, doc["travel"], cfg.travel);
  if (doc["seeding"]) read_seeding(r, doc["seeding"], cfg.seeding);
  if (doc["output"]) read_output(r, doc["output"], cfg.output);

  if (cfg.seeding.ids.empty() && cfg.seeding.count > cfg.demographics.population)
    r.fail(doc["seeding"] ? doc["seeding"] : doc, "seeding.count", "exceeds the population size");
  if (!r.problems.empty()) throw ValidationError(r.problems);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

namespace {

void emit_pair(YAML::Emitter& e, double a, double b) { e << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq; }

void emit_bins(YAML::Emitter& e, const std::vector<Bin>& bins) {
  e << YAML::BeginSeq;
  for (const Bin& b : bins) e << YAML::Flow << YAML::BeginSeq << b.lo << b.hi << b.weight << YAML::EndSeq;
  e << YAML::EndSeq;
}

void emit_adjustment(YAML::Emitter& e, const BehaviorAdjustment& a) {
  e << YAML::BeginMap << YAML::Key << "home_stay_factor" << YAML::Value << a.home_stay_factor << YAML::Key
    << "recreation_avoidance" << YAML::Value << a.recreation_avoidance << YAML::Key << "work_time_factor"
    << YAML::Value << a.work_time_factor << YAML::EndMap;
}

void emit_duration(YAML::Emitter& e, const char* key, const DurationStats& d) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "mean_s" << YAML::Value
    << d.mean_s << YAML::Key << "sd_s" << YAML::Value << d.sd_s << YAML::EndMap;
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "version" << YAML::Value << kScenarioVersion;
  if (cfg.synthetic_city) {
    const SyntheticCitySpec& s = *cfg.synthetic_city;
    e << YAML::Key << "synthetic_city" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "cols" << YAML::Value << s.cols << YAML::Key << "rows" << YAML::Value << s.rows;
    e << YAML::Key << "block_m" << YAML::Value << s.block_m;
    e << YAML::Key << "regions" << YAML::Value << YAML::BeginMap;
    for (const auto& [t, n] : s.regions) e << YAML::Key << std::string(to_string(t)) << YAML::Value << n;
    e << YAML::EndMap;
    e << YAML::Key << "sublocations_per_region" << YAML::Value << s.sublocations_per_region;
    if (!s.sublocations_by_type.empty()) {
      e << YAML::Key << "sublocations_by_type" << YAML::Value << YAML::BeginMap;
      for (const auto& [t, n] : s.sublocations_by_type) e << YAML::Key << std::string(to_string(t)) << YAML::Value << n;
      e << YAML::EndMap;
    }
    e << YAML::Key << "sublocation_radius_m" << YAML::Value << s.sublocation_radius_m;
    e << YAML::Key << "lines" << YAML::Value << s.lines;
    e << YAML::Key << "stop_spacing_m" << YAML::Value << s.stop_spacing_m;
    e << YAML::Key << "headway_s" << YAML::Value << s.headway_s;
    e << YAML::Key << "speed_mps" << YAML::Value << s.speed_mps;
    if (s.anchor)
      e << YAML::Key << "anchor" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "lon" << YAML::Value
        << s.anchor->lon0 << YAML::Key << "lat" << YAML::Value << s.anchor->lat0 << YAML::EndMap;
    e << YAML::EndMap;
  } else {
    e << YAML::Key << "city" << YAML::Value << cfg.city_file;
  }
  e << YAML::Key << "seed" << YAML::Value << cfg.seed;
  e << YAML::Key << "days" << YAML::Value << cfg.days;
  e << YAML::Key << "dt_s" << YAML::Value << cfg.dt_s;

  const DemographicConfig& d = cfg.demographics;
  e << YAML::Key << "population" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "size" << YAML::Value << d.population;
  e << YAML::Key << "age_bins" << YAML::Value;
  emit_bins(e, d.age_bins);
  e << YAML::Key << "household_sizes" << YAML::Value << YAML::BeginSeq;
  for (const SizeWeight& s : d.household_size_pmf) e << YAML::Flow << YAML::BeginSeq << s.size << s.weight << YAML::EndSeq;
  e << YAML::EndSeq;
  e << YAML::Key << "commute_km_bins" << YAML::Value;
  emit_bins(e, d.commute_km_bins);
  e << YAML::Key << "college_fraction" << YAML::Value << d.college_fraction;
  e << YAML::Key << "male_fraction" << YAML::Value << d.male_fraction;
  e << YAML::Key << "susceptibility" << YAML::Value << d.susceptibility;
  e << YAML::Key << "immune_fraction" << YAML::Value << d.immune_fraction;
  e << YAML::Key << "workplace_mix" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "office"
    << YAML::Value << d.workplace_mix.office << YAML::Key << "recreational" << YAML::Value
    << d.workplace_mix.recreational << YAML::Key << "patient_room" << YAML::Value << d.workplace_mix.patient_room
    << YAML::EndMap;
  e << YAML::EndMap;

  const AgendaConfig& a = cfg.agenda;
  e << YAML::Key << "agenda" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "patterns" << YAML::Value << YAML::BeginMap;
  for (const PatternShare& p : a.patterns.patterns) e << YAML::Key << p.pattern << YAML::Value << p.percent;
  e << YAML::EndMap;
  emit_duration(e, "home", a.home);
  emit_duration(e, "work", a.work);
  emit_duration(e, "recreation", a.recreation);
  emit_duration(e, "medical", a.medical);
  e << YAML::Key << "min_duration_s" << YAML::Value << a.min_duration_s;
  e << YAML::Key << "max_duration_s" << YAML::Value << a.max_duration_s;
  e << YAML::Key << "work_start_window_s" << YAML::Value;
  emit_pair(e, a.work_start_earliest_s, a.work_start_latest_s);
  e << YAML::Key << "outing_start_window_s" << YAML::Value;
  emit_pair(e, a.outing_start_earliest_s, a.outing_start_latest_s);
  e << YAML::Key << "elder_recreation_probability" << YAML::Value << a.elder_recreation_probability;
  e << YAML::Key << "recreation_distance_floor_m" << YAML::Value << a.recreation_distance_floor_m;
  e << YAML::Key << "modal_split" << YAML::Value << YAML::BeginMap;
  for (PersonClass c : kAllPersonClasses) {
    const ModalSplit& m = a.modal_split[static_cast<int>(c)];
    e << YAML::Key << std::string(to_string(c)) << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "walk"
      << YAML::Value << m.walk << YAML::Key << "bike" << YAML::Value << m.bike << YAML::Key << "car" << YAML::Value
      << m.car << YAML::Key << "transit" << YAML::Value << m.transit << YAML::EndMap;
  }
  e << YAML::EndMap;
  e << YAML::EndMap;

  const BehaviorPolicy& b = cfg.behavior;
  e << YAML::Key << "behavior" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "alert_thresholds" << YAML::Value << YAML::Flow << b.alert_thresholds;
  e << YAML::Key << "by_alert_level" << YAML::Value << YAML::BeginSeq;
  for (const BehaviorAdjustment& adj : b.by_alert_level) emit_adjustment(e, adj);
  e << YAML::EndSeq;
  e << YAML::Key << "when_symptomatic" << YAML::Value;
  emit_adjustment(e, b.when_symptomatic);
  e << YAML::EndMap;

  const EpidemicParams& p = cfg.epidemic;
  e << YAML::Key << "epidemic" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "sigma_per_h" << YAML::Value << p.sigma_per_h;
  e << YAML::Key << "d_star_m" << YAML::Value << p.d_star_m;
  e << YAML::Key << "outdoor_factor" << YAML::Value << p.outdoor_factor;
  e << YAML::Key << "incubation_days" << YAML::Value;
  emit_pair(e, p.incubation.lo_days, p.incubation.hi_days);
  e << YAML::Key << "symptomatic_days" << YAML::Value;
  emit_pair(e, p.symptomatic.lo_days, p.symptomatic.hi_days);
  e << YAML::Key << "vaccination_days" << YAML::Value;
  emit_pair(e, p.vaccination.lo_days, p.vaccination.hi_days);
  e << YAML::Key << "mortality" << YAML::Value << p.mortality;
  e << YAML::EndMap;

  const TravelConfig& t = cfg.travel;
  e << YAML::Key << "travel" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "walk_threshold_m" << YAML::Value << t.road.walk_threshold_m;
  e << YAML::Key << "transit_radii_m" << YAML::Value << YAML::Flow << t.transit.radii_m;
  e << YAML::Key << "transit_max_levels" << YAML::Value << t.transit.max_levels;
  e << YAML::Key << "walk_mps" << YAML::Value << t.speeds.walk_mps;
  e << YAML::Key << "bike_mps" << YAML::Value << t.speeds.bike_mps;
  e << YAML::Key << "car_mps" << YAML::Value << t.speeds.car_mps;
  e << YAML::EndMap;

  e << YAML::Key << "seeding" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "count" << YAML::Value << cfg.seeding.count;
  std::vector<std::uint32_t> ids;
  for (PersonId id : cfg.seeding.ids) ids.push_back(raw(id));
  e << YAML::Key << "ids" << YAML::Value << YAML::Flow << ids;
  e << YAML::Key << "vaccinated_fraction" << YAML::Value << cfg.seeding.vaccinated_fraction;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dir" << YAML::Value << cfg.output.dir;
  e << YAML::Key << "report_every_s" << YAML::Value << cfg.output.report_every_s;
  e << YAML::Key << "snapshot_every_s" << YAML::Value << cfg.output.snapshot_every_s;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

SimConfig to_sim_config(const ScenarioConfig& cfg) {
  SimConfig s;
  s.agenda = cfg.agenda;
  s.policy = cfg.behavior;
  s.epidemic = cfg.epidemic;
  s.travel = cfg.travel;
  s.travel.transit.walk_speed_mps = cfg.travel.speeds.walk_mps;
  s.dt_s = cfg.dt_s;
  s.days = cfg.days;
  s.seed = cfg.seed;
  s.report_every_s = cfg.output.report_every_s;
  return s;
}

World build_world(const ScenarioConfig& cfg) {
  if (cfg.synthetic_city) return generate_synthetic_city(*cfg.synthetic_city, cfg.seed);
  return load_city(cfg.city_file);
}

}  // namespace citysim
