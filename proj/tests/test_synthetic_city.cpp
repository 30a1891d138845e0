#include <doctest.h>

#include "citysim/city_io.hpp"
#include "citysim/errors.hpp"
#include "citysim/synthetic_city.hpp"
#include "oracles.hpp"

using namespace citysim;

TEST_SUITE("synthetic_city") {
  TEST_CASE("a single block is a valid city") {
    const World w = generate_synthetic_city(SyntheticCitySpec{}, 1);
    CHECK(w.city.regions().size() == 1);
    CHECK(w.city.sublocations().size() == 1);
    CHECK(w.roads.nodes().size() == 4);
    CHECK(w.roads.edges().size() == 4);
    CHECK(w.transit.lines().empty());
    CHECK(validate_world(w).empty());
  }

  TEST_CASE("generation is deterministic in settings and seed") {
    SyntheticCitySpec s;
    s.cols = 4;
    s.rows = 4;
    s.regions = {{RegionType::Housing, 8}, {RegionType::Office, 4}, {RegionType::School, 2}, {RegionType::Medical, 2}};
    s.sublocations_per_region = 6;
    s.lines = 3;
    CHECK(city_to_json(generate_synthetic_city(s, 5)) == city_to_json(generate_synthetic_city(s, 5)));
    CHECK(city_to_json(generate_synthetic_city(s, 5)) != city_to_json(generate_synthetic_city(s, 6)));
  }

  TEST_CASE("random settings give valid connected cities") {
    Rng rng(31);
    for (int k = 0; k < 40; ++k) {
      SyntheticCitySpec s;
      s.cols = 1 + static_cast<int>(uniform_index(rng, 5));
      s.rows = 1 + static_cast<int>(uniform_index(rng, 5));
      s.block_m = uniform(rng, 300, 1500);
      s.regions.clear();
      int left = s.cols * s.rows;
      for (RegionType t : kAllRegionTypes) {
        const int n = t == RegionType::Recreational ? left : static_cast<int>(uniform_index(rng, left + 1));
        s.regions[t] = n;
        left -= n;
      }
      s.sublocations_per_region = 1 + static_cast<int>(uniform_index(rng, 12));
      s.sublocation_radius_m = uniform(rng, 1, 10);
      s.lines = static_cast<int>(uniform_index(rng, s.rows + s.cols + 3));
      s.stop_spacing_m = uniform(rng, 100, 600);
      const World w = generate_synthetic_city(s, k);
      INFO("case " << k);
      CHECK(validate_world(w).empty());
      CHECK(oracle::road_components(w.roads) == 1);
      CHECK(w.city.regions().size() == static_cast<std::size_t>(s.cols * s.rows));
      // Every sublocation lies strictly inside its region.
      for (const Sublocation& sl : w.city.sublocations())
        CHECK(point_in_polygon(w.city.find_region(sl.region)->boundary, sl.center));
      // Survives a trip through the file format.
      CHECK(city_to_json(parse_city(city_to_json(w))) == city_to_json(w));
    }
  }

  TEST_CASE("bad settings are rejected") {
    SyntheticCitySpec s;
    s.cols = 2;
    CHECK_FALSE(check_spec(s).empty());
    CHECK_THROWS_AS(generate_synthetic_city(s, 1), SpecError);
    s.regions = {{RegionType::Housing, 2}};
    CHECK(check_spec(s).empty());
    s.sublocation_radius_m = 400;
    CHECK_THROWS_AS(generate_synthetic_city(s, 1), SpecError);
    s.sublocation_radius_m = 5;
    s.lines = 50;
    CHECK_THROWS_AS(generate_synthetic_city(s, 1), SpecError);
  }
}
