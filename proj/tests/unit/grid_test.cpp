#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shipcast/error.hpp"
#include "shipcast/grid.hpp"
#include "test_support.hpp"

using namespace shipcast;
using testing::axis;
using testing::make_field;

namespace {

EnsembleField ensemble(std::size_t members, std::size_t nlat, std::size_t nlon, std::mt19937_64& rng) {
  EnsembleField e;
  e.variable = Variable::WaveHeight;
  e.units = "m";
  e.members = members;
  e.lats = axis(50.0, 0.5, nlat);
  e.lons = axis(-5.0, 0.5, nlon);
  const auto base = make_field(Variable::WaveHeight, e.lats, e.lons);
  e.times = base.times;
  std::normal_distribution<double> noise(2.0, 1.5);
  e.values.resize(members * e.ntime() * nlat * nlon);
  for (auto& v : e.values) {
    v = noise(rng);
  }
  return e;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("iso8601 round trip and rejects junk") {
  const auto t = parse_iso8601("2024-03-01T06:00:00Z");
  CHECK(format_iso8601(t) == "2024-03-01T06:00:00Z");
  CHECK(parse_iso8601("2024-03-01T06:00") == t);
  CHECK(kind_of([] { (void)parse_iso8601("yesterday"); }) == ErrorKind::TimeAxisInvalid);
}

TEST_CASE("bundle round trip preserves shape and NaN") {
  testing::TempDir dir;
  auto f = make_field(Variable::WindSpeed, axis(50, 1, 40), axis(-10, 1, 30), 12.5);
  f.at(3, 2, 1) = std::nan("");
  f.percentile = 50.0;
  write_grid_bundle(dir.path(), f);
  const auto loaded = load_grid_bundle(dir.path());
  REQUIRE(std::holds_alternative<GridField>(loaded));
  const auto& g = std::get<GridField>(loaded);
  CHECK(g.ntime() == 24);
  CHECK(g.nlat() == 40);
  CHECK(g.nlon() == 30);
  CHECK(std::isnan(g.at(3, 2, 1)));
  CHECK(g.at(3, 2, 2) == 12.5);
  CHECK(g.percentile == 50.0);
  CHECK(g.times == f.times);
}

TEST_CASE("ensemble bundle loads with its member count") {
  testing::TempDir dir;
  std::mt19937_64 rng(1);
  const auto e = ensemble(18, 4, 3, rng);
  write_grid_bundle(dir.path(), e);
  const auto loaded = load_grid_bundle(dir.path());
  REQUIRE(std::holds_alternative<EnsembleField>(loaded));
  CHECK(std::get<EnsembleField>(loaded).members == 18);
  CHECK(std::get<EnsembleField>(loaded).values == e.values);
}

TEST_CASE("bundle errors") {
  testing::TempDir dir;
  auto f = make_field(Variable::Visibility, axis(50, 1, 4), axis(0, 1, 3), 5000);

  SUBCASE("missing header") {
    CHECK(kind_of([&] { (void)load_grid_bundle(dir.path()); }) == ErrorKind::BundleMalformed);
  }
  SUBCASE("payload seven bytes short") {
    write_grid_bundle(dir.path(), f);
    const auto p = dir.path() / "values.f64le";
    std::filesystem::resize_file(p, std::filesystem::file_size(p) - 7);
    CHECK(kind_of([&] { (void)load_grid_bundle(dir.path()); }) == ErrorKind::PayloadSizeMismatch);
  }
  SUBCASE("23 timesteps") {
    f.times.pop_back();
    f.values.resize(f.ntime() * f.cells());
    CHECK(kind_of([&] { f.validate(); }) == ErrorKind::TimeAxisInvalid);
  }
  SUBCASE("non-hourly axis") {
    f.times[5] += std::chrono::minutes(30);
    CHECK(kind_of([&] { f.validate(); }) == ErrorKind::TimeAxisInvalid);
  }
  SUBCASE("descending latitudes") {
    std::reverse(f.lats.begin(), f.lats.end());
    CHECK(kind_of([&] { f.validate(); }) == ErrorKind::BundleMalformed);
  }
}

TEST_CASE("percentile_of examples") {
  CHECK(percentile_of({1, 2, 3}, 50) == 2.0);
  CHECK(percentile_of({1, 3}, 50) == 2.0);
  // Linear interpolation between the 3rd and 4th order statistics: rank 2.55.
  CHECK(percentile_of({10, 20, 30, 40}, 85) == doctest::Approx(35.5).epsilon(1e-15));
  CHECK(oracle::percentile({10, 20, 30, 40}, 85) == doctest::Approx(35.5).epsilon(1e-15));
  CHECK(percentile_of({10, 20, 30, 40}, 50) == 25.0);
  CHECK(percentile_of({4, std::nan(""), 8}, 50) == 6.0);
  CHECK(std::isnan(percentile_of({std::nan(""), std::nan("")}, 50)));
  CHECK(percentile_of({7}, 0) == 7.0);
  CHECK(percentile_of({7}, 100) == 7.0);
  CHECK(kind_of([] { (void)percentile_of({1, 2}, 101); }) == ErrorKind::ValueOutOfRange);
}

TEST_CASE("reduce_percentile agrees with the oracle and is monotone in p") {
  std::mt19937_64 rng(7);
  auto e = ensemble(9, 3, 4, rng);
  e.values[5] = std::nan("");
  for (double p : {0.0, 5.0, 50.0, 85.0, 100.0}) {
    const auto g = reduce_percentile(e, p);
    CHECK(g.percentile == p);
    for (std::size_t t = 0; t < g.ntime(); ++t) {
      for (std::size_t i = 0; i < g.nlat(); ++i) {
        for (std::size_t j = 0; j < g.nlon(); ++j) {
          std::vector<double> xs;
          for (std::size_t m = 0; m < e.members; ++m) {
            xs.push_back(e.at(m, t, i, j));
          }
          const double want = oracle::percentile(xs, p);
          CHECK(std::abs(g.at(t, i, j) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
        }
      }
    }
  }
  const auto lo = reduce_percentile(e, 20);
  const auto hi = reduce_percentile(e, 80);
  for (std::size_t k = 0; k < lo.values.size(); ++k) {
    CHECK(lo.values[k] <= hi.values[k]);
  }
}

TEST_CASE("single-member median is the member itself") {
  std::mt19937_64 rng(3);
  const auto e = ensemble(1, 5, 5, rng);
  CHECK(reduce_percentile(e, 50).values == e.values);
}

TEST_CASE("all-NaN members give NaN, not an error") {
  std::mt19937_64 rng(4);
  auto e = ensemble(3, 2, 2, rng);
  for (std::size_t m = 0; m < 3; ++m) {
    e.values[((m * 24 + 0) * 2 + 1) * 2 + 1] = std::nan("");
  }
  const auto g = reduce_percentile(e, 50);
  CHECK(std::isnan(g.at(0, 1, 1)));
  CHECK_FALSE(std::isnan(g.at(0, 0, 0)));
}

TEST_CASE("crop to the forecast domain") {
  const auto global = make_field(Variable::Pressure, axis(-90, 0.25, 721), axis(-180, 0.25, 1440), 1010);
  const auto c = crop_domain(global);
  CHECK(c.lats.front() == 30.0);
  CHECK(c.lats.back() == 70.0);
  CHECK(c.lons.front() == -20.0);
  CHECK(c.lons.back() == 10.0);
  CHECK(c.nlat() == 161);
  CHECK(c.nlon() == 121);
  CHECK(c.values.size() == 24 * 161 * 121);
  for (double lat : c.lats) {
    CHECK((lat >= 30 && lat <= 70));
  }

  const auto again = crop_domain(c);
  CHECK(again.lats == c.lats);
  CHECK(again.lons == c.lons);
  CHECK(again.values == c.values);
}

TEST_CASE("crop keeps the matching values") {
  auto f = make_field(Variable::WaveHeight, axis(28, 1, 5), axis(-22, 1, 5));
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    f.values[k] = static_cast<double>(k);
  }
  const auto c = crop_domain(f);
  REQUIRE(c.lats == std::vector<double>{30, 31, 32});
  REQUIRE(c.lons == std::vector<double>{-20, -19, -18});
  for (std::size_t t = 0; t < 24; ++t) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(c.at(t, i, j) == f.at(t, i + 2, j + 2));
      }
    }
  }
}

TEST_CASE("crop outside the grid is EmptyDomain") {
  const auto f = make_field(Variable::WaveHeight, axis(-40, 1, 5), axis(100, 1, 5));
  CHECK(kind_of([&] { (void)crop_domain(f); }) == ErrorKind::EmptyDomain);
}

TEST_CASE("load_deterministic collapses ensembles at the requested percentile") {
  testing::TempDir dir;
  std::mt19937_64 rng(11);
  const auto e = ensemble(5, 2, 2, rng);
  write_grid_bundle(dir.path(), e);
  const auto g = load_deterministic(dir.path(), 85);
  CHECK(g.values == reduce_percentile(e, 85).values);
}
