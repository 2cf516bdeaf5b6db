#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "shipcast/error.hpp"
#include "shipcast/sea_area.hpp"
#include "test_support.hpp"

using namespace shipcast;
using testing::axis;
using testing::make_field;

namespace {

// Winding number of a closed ring around a point, summed from signed angles.
int winding(const std::vector<LatLon>& ring, double lat, double lon) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
    const double a = std::atan2(ring[k].lat - lat, ring[k].lon - lon);
    const double b = std::atan2(ring[k + 1].lat - lat, ring[k + 1].lon - lon);
    double d = b - a;
    while (d > M_PI) d -= 2 * M_PI;
    while (d < -M_PI) d += 2 * M_PI;
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

SeaArea box(std::string name, double lat0, double lat1, double lon0, double lon1) {
  return {std::move(name), {{lat0, lon0}, {lat0, lon1}, {lat1, lon1}, {lat1, lon0}, {lat0, lon0}}, 1};
}

}  // namespace

TEST_CASE("shipped registry holds 31 distinct, ordered, closed areas") {
  const auto& r = testing::registry();
  REQUIRE(r.size() == 31);
  std::set<std::string> names;
  int previous = 0;
  for (const auto& a : r.areas()) {
    CHECK(names.insert(a.name).second);
    CHECK(a.order_index > previous);
    previous = a.order_index;
    CHECK(a.polygon.front() == a.polygon.back());
    for (const auto& v : a.polygon) {
      CHECK(kForecastDomain.contains(v.lat, v.lon));
    }
  }
  CHECK(r.get("dover").name == "Dover");
  CHECK(r.find("Atlantis") == nullptr);
  CHECK_THROWS_AS((void)r.get("Atlantis"), Error);
  CHECK(r.max_name_words() >= 2);
}

TEST_CASE("registry rejects duplicates and open rings") {
  CHECK_THROWS_AS(AreaRegistry({box("A", 0, 1, 0, 1), box("a", 2, 3, 2, 3)}), Error);
  auto open = box("B", 0, 1, 0, 1);
  open.polygon.pop_back();
  CHECK_THROWS_AS(AreaRegistry({open}), Error);
}

TEST_CASE("point in polygon agrees with the winding-number oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(45, 65);
  std::uniform_real_distribution<double> lon(-16, 8);
  // A concave L-shape plus every shipped area.
  SeaArea ell{"L", {{50, 0}, {50, 4}, {51, 4}, {51, 1}, {54, 1}, {54, 0}, {50, 0}}, 1};
  std::vector<SeaArea> areas = testing::registry().areas();
  areas.push_back(ell);
  for (const auto& a : areas) {
    for (int k = 0; k < 2000; ++k) {
      const double y = lat(rng);
      const double x = lon(rng);
      CHECK(a.contains(y, x) == (winding(a.polygon, y, x) != 0));
    }
  }
}

TEST_CASE("mask covering the whole domain leaves the field unchanged") {
  auto f = make_field(Variable::WaveHeight, axis(50, 1, 5), axis(0, 1, 4), 2.0);
  f.values[7] = 3.0;
  const auto m = mask_sea_area(f, box("All", 40, 60, -10, 10));
  CHECK(m.values == f.values);
  CHECK(m.lats == f.lats);
}

TEST_CASE("polygon around one cell centre keeps exactly one cell per hour") {
  const auto f = make_field(Variable::WaveHeight, axis(50, 1, 5), axis(0, 1, 4), 2.0);
  const auto area = box("One", 51.5, 52.5, 1.5, 2.5);
  const auto m = mask_sea_area(f, area);
  for (std::size_t t = 0; t < 24; ++t) {
    int kept = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const bool inside = winding(area.polygon, f.lats[i], f.lons[j]) != 0;
        CHECK(std::isnan(m.at(t, i, j)) == !inside);
        kept += inside;
      }
    }
    CHECK(kept == 1);
  }
  CHECK(mask_sea_area(m, area).values.size() == m.values.size());
}

TEST_CASE("degenerate polygon is EmptyMask") {
  const auto f = make_field(Variable::WaveHeight, axis(50, 1, 5), axis(0, 1, 4), 2.0);
  SeaArea flat{"Flat", {{51, 0}, {51, 3}, {51, 0}, {51, 0}}, 1};
  try {
    (void)mask_sea_area(f, flat);
    FAIL("expected EmptyMask");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyMask);
  }
  try {
    (void)area_series(f, flat, Reducer::ArealMean);
    FAIL("expected EmptyMask");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyMask);
  }
}

TEST_CASE("mask is idempotent") {
  std::mt19937_64 rng(2);
  auto f = make_field(Variable::WindSpeed, axis(55, 0.5, 12), axis(-5, 0.5, 12));
  for (auto& v : f.values) {
    v = std::uniform_real_distribution<double>(0, 40)(rng);
  }
  const auto area = testing::registry().get("Forties");
  const auto once = mask_sea_area(f, area);
  const auto twice = mask_sea_area(once, area);
  for (std::size_t k = 0; k < once.values.size(); ++k) {
    CHECK((std::isnan(once.values[k]) ? std::isnan(twice.values[k]) : once.values[k] == twice.values[k]));
  }
}

TEST_CASE("area series reducers") {
  auto f = make_field(Variable::WindSpeed, axis(50, 1, 3), axis(0, 1, 3), 7.0);
  const auto all = box("All", 40, 60, -10, 10);
  SUBCASE("constant field") {
    for (auto r : {Reducer::ArealMean, Reducer::ArealMax}) {
      const auto s = area_series(f, all, r);
      CHECK(s.reducer == r);
      for (double v : s.values) {
        CHECK(v == 7.0);
      }
    }
  }
  SUBCASE("two cells") {
    const auto two = box("Two", 50.5, 51.5, -0.5, 1.5);
    for (std::size_t t = 0; t < 24; ++t) {
      f.at(t, 1, 0) = 4.0;
      f.at(t, 1, 1) = 8.0;
    }
    CHECK(area_series(f, two, Reducer::ArealMean).values[0] == 6.0);
    CHECK(area_series(f, two, Reducer::ArealMax).values[0] == 8.0);
  }
  SUBCASE("one hour entirely missing") {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        f.at(5, i, j) = std::nan("");
      }
    }
    f.at(6, 0, 0) = std::nan("");
    const auto s = area_series(f, all, Reducer::ArealMean);
    for (std::size_t t = 0; t < 24; ++t) {
      CHECK(std::isnan(s.values[t]) == (t == 5));
    }
    CHECK(s.values[6] == 7.0);
  }
}

TEST_CASE("areal max dominates areal mean") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 50);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = make_field(Variable::WindSpeed, axis(48, 0.5, 40), axis(-12, 0.5, 40));
    for (auto& v : f.values) {
      v = testing::coin(rng, 0.05) ? std::nan("") : u(rng);
    }
    const auto& area = testing::registry().areas()[static_cast<std::size_t>(trial) % 31];
    bool has_cell = false;
    for (double lat : f.lats) {
      for (double lon : f.lons) {
        has_cell |= area.contains(lat, lon);
      }
    }
    if (!has_cell) {
      continue;
    }
    const auto mean = area_series(f, area, Reducer::ArealMean);
    const auto mx = area_series(f, area, Reducer::ArealMax);
    for (std::size_t t = 0; t < 24; ++t) {
      if (!std::isnan(mean.values[t])) {
        CHECK(mx.values[t] >= mean.values[t]);
      }
    }
  }
}

TEST_CASE("circular mean wraps through north") {
  auto f = make_field(Variable::WindDirection, axis(50, 1, 1), axis(0, 1, 2));
  for (std::size_t t = 0; t < 24; ++t) {
    f.at(t, 0, 0) = 350.0;
    f.at(t, 0, 1) = 30.0;
  }
  const auto s = area_series(f, box("All", 40, 60, -10, 10), Reducer::ArealCircularMean);
  CHECK(s.values[0] == doctest::Approx(10.0));
  CHECK(s.values[0] < 360.0);
}
