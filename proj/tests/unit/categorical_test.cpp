#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "oracles.hpp"
#include "shipcast/categorical.hpp"
#include "shipcast/error.hpp"
#include "test_support.hpp"

using namespace shipcast;

namespace {

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

TEST_CASE("beaufort examples and table") {
  CHECK(classify_beaufort(0) == 0);
  CHECK(classify_beaufort(35) == 8);
  CHECK(classify_beaufort(64) == 12);
  CHECK(classify_beaufort(200) == 12);
  for (const auto& row : oracle::kBeaufort) {
    CHECK(classify_beaufort(row.lower) == row.index);
    if (row.lower > 0) {
      CHECK(classify_beaufort(std::nextafter(row.lower, 0.0)) == row.index - 1);
    }
  }
  CHECK(kind_of([] { (void)classify_beaufort(-0.1); }) == ErrorKind::ValueOutOfRange);
  CHECK(kind_of([] { (void)classify_beaufort(std::nan("")); }) == ErrorKind::ValueOutOfRange);
}

TEST_CASE("douglas examples and table") {
  CHECK(classify_douglas(0.05) == SeaState::Smooth);
  CHECK(classify_douglas(3.0) == SeaState::Rough);
  CHECK(classify_douglas(15.0) == SeaState::Phenomenal);
  for (const auto& row : oracle::kDouglas) {
    CHECK(static_cast<int>(classify_douglas(row.lower)) == row.index);
  }
  CHECK(kind_of([] { (void)classify_douglas(-1); }) == ErrorKind::ValueOutOfRange);
}

TEST_CASE("visibility examples and table") {
  CHECK(classify_visibility(999) == VisibilityCategory::Fog);
  CHECK(classify_visibility(1000) == VisibilityCategory::Poor);
  CHECK(classify_visibility(12000) == VisibilityCategory::Good);
  CHECK(classify_visibility(3703.9) == VisibilityCategory::Poor);
  CHECK(classify_visibility(3704) == VisibilityCategory::Moderate);
  CHECK(classify_visibility(9260) == VisibilityCategory::Good);
  CHECK(kind_of([] { (void)classify_visibility(-5); }) == ErrorKind::ValueOutOfRange);
}

TEST_CASE("compass examples") {
  CHECK(compass_8(0) == Compass8::N);
  CHECK(compass_8(200) == Compass8::S);
  CHECK(compass_8(22.5) == Compass8::NE);
  CHECK(compass_8(337.5) == Compass8::N);
  CHECK(compass_8(360) == Compass8::N);
  CHECK(compass_8(337.49) == Compass8::NW);
  CHECK(compass_8(std::nextafter(22.5, 0.0)) == Compass8::N);
  CHECK(compass_8(std::nextafter(337.5, 0.0)) == Compass8::NW);
  CHECK(kind_of([] { (void)compass_8(360.5); }) == ErrorKind::ValueOutOfRange);
  CHECK(kind_of([] { (void)compass_8(-1); }) == ErrorKind::ValueOutOfRange);
  for (double d = 0; d < 360; d += 0.37) {
    CHECK(static_cast<int>(compass_8(d)) == oracle::compass(d));
  }
}

TEST_CASE("labels round trip") {
  for (std::size_t k = 0; k < kSeaStateCount; ++k) {
    const auto s = static_cast<SeaState>(k);
    CHECK(parse_sea_state(to_string(s)) == s);
  }
  for (int k = 0; k < 4; ++k) {
    const auto v = static_cast<VisibilityCategory>(k);
    CHECK(parse_visibility(to_string(v)) == v);
  }
  for (int k = 0; k < 8; ++k) {
    const auto c = static_cast<Compass8>(k);
    CHECK(parse_compass(to_string(c)) == c);
  }
  CHECK(to_string(SeaState::VeryRough) == "very rough");
  CHECK_FALSE(parse_sea_state("choppy"));
}

TEST_CASE("classifiers are monotone") {
  int last_b = 0, last_d = 0, last_v = 0;
  for (double x = 0; x < 25000; x += 0.5) {
    const int b = classify_beaufort(x);
    const int d = static_cast<int>(classify_douglas(x / 1000.0));
    const int v = static_cast<int>(classify_visibility(x));
    CHECK(b >= last_b);
    CHECK(d >= last_d);
    CHECK(v >= last_v);
    last_b = b;
    last_d = d;
    last_v = v;
  }
}

TEST_CASE("weather code map") {
  const auto& w = testing::weather_map();
  CHECK(classify_weather(12, w) == "rain");
  CHECK(classify_weather(28, w) == "thundery showers");
  CHECK(kind_of([&] { (void)classify_weather(255, w); }) == ErrorKind::UnknownWeatherCode);
  for (const auto& p : w.phrases()) {
    CHECK(count_words(p) <= kMaxWeatherWords);
  }
  CHECK(w.phrase_index(12) == 5);
  CHECK(kind_of([] {
          (void)WeatherCodeMap::from_json_text(
              R"({"phrases": ["fair", "a b c d e f"], "codes": [{"code": 1, "phrase": "a b c d e f"}]})");
        }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("weather code indices keep NaN") {
  auto f = testing::make_field(Variable::WeatherCode, {50}, {0, 1}, 12);
  f.values[1] = std::nan("");
  const auto g = testing::weather_map().to_phrase_indices(f);
  CHECK(g.values[0] == 5.0);
  CHECK(std::isnan(g.values[1]));
}

TEST_CASE("scale_for bin counts") {
  const auto& s = testing::scales();
  const auto vis = s.scale_for(Variable::Visibility, ScaleMode::Categorical);
  CHECK(vis.size() == 4);
  const auto pal = vis.palette();
  CHECK(std::set<Rgb>(pal.begin(), pal.end()).size() == 4);
  CHECK(s.scale_for(Variable::WindSpeed, ScaleMode::Categorical).size() == 13);
  CHECK(s.scale_for(Variable::WaveHeight, ScaleMode::Categorical).size() == 8);
  CHECK(s.scale_for(Variable::WindDirection, ScaleMode::Categorical).size() == 8);

  const auto p = s.scale_for(Variable::Pressure, ScaleMode::Categorical);
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    CHECK(p.bins()[k].upper - p.bins()[k].lower == 4.0);
  }
  CHECK(p.label_of(1000) == "1000");
  CHECK(p.label_of(1003.9) == "1000");
  CHECK(p.label_of(900) == "<944");
  CHECK(p.label_of(1080) == ">=1048");

  const auto cont = s.scale_for(Variable::WindSpeed, ScaleMode::Continuous);
  CHECK(cont.mode() == ScaleMode::Continuous);
  CHECK(cont.color_of(0) != cont.color_of(70));
  CHECK(cont.color_of(-5) == cont.color_of(0));
}

TEST_CASE("wind direction scale wraps at north") {
  const auto d = testing::scales().scale_for(Variable::WindDirection, ScaleMode::Categorical);
  CHECK(d.label_of(350) == "northerly");
  CHECK(d.label_of(10) == "northerly");
  CHECK(d.label_of(22.5) == "northeasterly");
  CHECK(d.label_of(360) == "northerly");
  CHECK(d.label_of(std::nextafter(22.5, 0.0)) == "northerly");
  CHECK(d.label_of(std::nextafter(337.5, 0.0)) == "northwesterly");
  CHECK(d.label_of(337.5) == "northerly");
}

TEST_CASE("palettes never contain the reserved colours") {
  const auto& s = testing::scales();
  for (auto v : {Variable::WindSpeed, Variable::WindDirection, Variable::WaveHeight, Variable::Visibility,
                 Variable::WeatherCode, Variable::Pressure}) {
    for (auto m : {ScaleMode::Categorical, ScaleMode::Continuous}) {
      const auto sc = s.scale_for(v, m);
      for (const auto& c : sc.palette()) {
        CHECK(c != kBackground);
        CHECK(c != kOverlayInk);
      }
      if (m == ScaleMode::Categorical) {
        const auto pal = sc.palette();
        CHECK(std::set<Rgb>(pal.begin(), pal.end()).size() == pal.size());
      }
      if (m == ScaleMode::Continuous) {
        for (double x = sc.bins().front().lower; x < sc.bins().back().lower; x += 0.5) {
          CHECK(sc.color_of(x) != kBackground);
        }
      }
    }
  }
}

TEST_CASE("scale construction rejects gaps and duplicate labels") {
  CHECK(kind_of([] {
          CategoricalScale(Variable::WaveHeight, ScaleMode::Categorical,
                           {{0, 1, "a", {1, 2, 3}}, {2, 3, "b", {4, 5, 6}}});
        }) == ErrorKind::ScaleInvalid);
  CHECK(kind_of([] {
          CategoricalScale(Variable::WaveHeight, ScaleMode::Categorical,
                           {{0, 1, "a", {1, 2, 3}}, {1, 3, "a", {4, 5, 6}}});
        }) == ErrorKind::ScaleInvalid);
}

TEST_CASE("unknown attribute") {
  const ScaleSet empty({}, testing::weather_map());
  CHECK(kind_of([&] { (void)empty.scale_for(Variable::WaveHeight, ScaleMode::Categorical); }) ==
        ErrorKind::UnknownAttribute);
  CHECK(kind_of([] { (void)parse_variable("humidity"); }) == ErrorKind::UnknownAttribute);
}

TEST_CASE("shipped scales.json equals the built-in tables") {
  const auto loaded = ScaleSet::load(testing::source_path("config/scales.json"), testing::weather_map());
  const auto builtin = builtin_numeric_scales();
  REQUIRE(loaded.numeric().size() == builtin.size());
  CHECK(scales_to_json(loaded.numeric()) == scales_to_json(builtin));
  const auto again = scales_from_json(scales_to_json(builtin));
  CHECK(scales_to_json(again) == scales_to_json(builtin));
}

TEST_CASE("hex colours") {
  CHECK(to_hex({255, 0, 16}) == "#ff0010");
  CHECK(parse_hex("#ff0010") == Rgb{255, 0, 16});
  CHECK_THROWS_AS((void)parse_hex("ff0010"), Error);
}
