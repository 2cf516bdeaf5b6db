#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "shipcast/bulletin.hpp"
#include "test_support.hpp"

using namespace shipcast;

namespace {

const AreaRegistry& reg() { return testing::registry(); }

Bulletin dover() {
  Bulletin b;
  b.areas = {"Dover"};
  b.wind = {{Compass8::SW, 5, 7, std::nullopt}};
  b.sea_state = {{"moderate", "rough", std::nullopt}};
  b.weather = {{"rain", std::nullopt}};
  b.visibility = {{"good", std::nullopt, std::nullopt}, {"moderate", std::nullopt, Timing::Becoming}};
  return b;
}

std::vector<RuleViolation> rules(const Bulletin& b) {
  std::vector<RuleViolation> out;
  for (const auto& v : validate(b, &reg())) {
    out.push_back(v.rule);
  }
  return out;
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

TEST_CASE("renderer examples") {
  CHECK(render_bulletin(dover(), &reg()) == "Dover. Southwesterly 5 to 7. Moderate or rough. Rain. Good, becoming moderate.");

  Bulletin minimal;
  minimal.areas = {"Wight"};
  minimal.wind = {{Compass8::W, 4, 4, std::nullopt}};
  minimal.sea_state = {{"slight", std::nullopt, std::nullopt}};
  minimal.weather = {{"showers", std::nullopt}};
  minimal.visibility = {{"good", std::nullopt, std::nullopt}};
  const auto text = render_bulletin(minimal);
  CHECK(text == "Wight. Westerly 4. Slight. Showers. Good.");
  CHECK(text.find(',') == std::string::npos);

  minimal.weather.clear();
  CHECK(render_bulletin(minimal) == "Wight. Westerly 4. Slight. Fair. Good.");

  auto gale = dover();
  gale.wind = {{Compass8::SW, 6, 8, Timing::Later}, {Compass8::W, 5, 7, Timing::AtFirst}};
  gale.gale = GaleWarning{GaleSeverity::Gale, GaleTiming::Later};
  CHECK(render_bulletin(gale) ==
        "Dover. Warning of gale later. Southwesterly 6 to 8 later, westerly 5 to 7 at first. Moderate or rough. Rain. "
        "Good, becoming moderate.");
}

TEST_CASE("render rejects invalid bulletins") {
  auto b = dover();
  b.wind[0].force_high = 9;
  CHECK(kind_of([&] { (void)render_bulletin(b); }) == ErrorKind::ValidationFailed);
}

TEST_CASE("parser examples") {
  const auto b = parse_bulletin("Dover. Southwesterly 5 to 7. Moderate or rough. Rain. Good.", reg());
  REQUIRE(b.wind.size() == 1);
  CHECK(b.wind[0].force_low == 5);
  CHECK(b.wind[0].force_high == 7);
  CHECK(b.wind[0].direction == Compass8::SW);
  CHECK(b.sea_state[0].label_high == "rough");

  CHECK(kind_of([] { (void)parse_bulletin("Atlantis. Northerly 4.", reg()); }) == ErrorKind::UnknownArea);
  CHECK(kind_of([] { (void)parse_bulletin("Dover. Southwesterly 5 to 13. Moderate. Rain. Good.", reg()); }) ==
        ErrorKind::ValueOutOfRange);
  CHECK(kind_of([] { (void)parse_bulletin("Dover. Windy. Moderate. Rain. Good.", reg()); }) ==
        ErrorKind::ClauseSyntaxError);

  const auto fair = parse_bulletin("  dover.   SOUTHWESTERLY 5 to 7. moderate. fair. good.  ", reg());
  CHECK(fair.areas == std::vector<std::string>{"Dover"});
  CHECK(fair.weather.empty());
}

TEST_CASE("parse errors carry the attribute and span") {
  const std::string text = "Dover. Southwesterly 5 to 7. Choppy. Rain. Good.";
  try {
    (void)parse_bulletin(text, reg());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ErrorKind::ClauseSyntaxError);
    CHECK(e.attribute() == "sea_state");
    CHECK(text.substr(e.span().first, e.span().second - e.span().first).find("Choppy") != std::string::npos);
  }
}

TEST_CASE("round trip over random valid bulletins") {
  std::mt19937_64 rng(20240301);
  for (int k = 0; k < 3000; ++k) {
    const auto b = testing::random_bulletin(rng);
    REQUIRE(validate(b, &reg()).empty());
    const auto text = render_bulletin(b, &reg());
    CHECK(render_bulletin(b, &reg()) == text);
    const auto back = parse_bulletin(text, reg());
    CHECK_MESSAGE(back == b, text);
    CHECK(bulletin_from_json(to_json(b)) == b);
  }
}

TEST_CASE("validator rules") {
  CHECK(rules(dover()).empty());

  auto b = dover();
  b.weather = {{"rain and sleet with heavy squalls", std::nullopt}};
  CHECK(rules(b) == std::vector{RuleViolation::WeatherTooLong});

  b = dover();
  b.wind[0].force_high = 9;
  b.wind[0].force_low = 7;
  CHECK(rules(b) == std::vector{RuleViolation::MissingGaleWarning});

  b.gale = GaleWarning{GaleSeverity::Gale, GaleTiming::Soon};
  CHECK(rules(b) == std::vector{RuleViolation::GaleSeverityMismatch});

  b = dover();
  b.gale = GaleWarning{GaleSeverity::Gale, GaleTiming::Soon};
  CHECK(rules(b) == std::vector{RuleViolation::UnexpectedGaleWarning});

  b = dover();
  b.wind[0].force_low = 3;
  CHECK(rules(b) == std::vector{RuleViolation::ForceSpanTooWide});

  b = dover();
  b.wind[0].force_low = 8;
  CHECK(rules(b) == std::vector{RuleViolation::ForceRangeInverted});

  b = dover();
  b.wind[0].force_high = 13;
  CHECK(rules(b) == std::vector{RuleViolation::ForceOutOfRange});

  b = dover();
  b.areas = {"Wight", "Dover"};
  CHECK(rules(b) == std::vector{RuleViolation::AreaOrder});

  b = dover();
  b.areas = {"Atlantis"};
  CHECK(rules(b) == std::vector{RuleViolation::UnknownArea});

  b = dover();
  b.areas.clear();
  CHECK(rules(b) == std::vector{RuleViolation::EmptyAreas});

  b = dover();
  b.wind.clear();
  b.sea_state.clear();
  b.visibility.clear();
  CHECK(rules(b) == std::vector{RuleViolation::EmptyWind, RuleViolation::EmptySeaState, RuleViolation::EmptyVisibility});

  b = dover();
  b.sea_state = {{"choppy", std::nullopt, std::nullopt}};
  b.visibility = {{"murky", std::nullopt, std::nullopt}};
  CHECK(rules(b) == std::vector{RuleViolation::UnknownSeaStateLabel, RuleViolation::UnknownVisibilityLabel});

  b = dover();
  b.sea_state = {{"slight", "high", std::nullopt}};
  CHECK(rules(b) == std::vector{RuleViolation::LabelRangeInvalid});

  b = dover();
  b.weather = {{"rain later", std::nullopt}};
  CHECK(rules(b) == std::vector{RuleViolation::WeatherPhraseInvalid});

  b = dover();
  b.weather = {{"fair", std::nullopt}};
  CHECK(rules(b) == std::vector{RuleViolation::FairNotOmitted});
}

TEST_CASE("validate is insensitive to clause order") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 500; ++k) {
    auto b = testing::random_bulletin(rng);
    if (testing::coin(rng)) {
      b.wind[0].force_low = b.wind[0].force_high + 1;
    }
    if (testing::coin(rng)) {
      b.weather.push_back({"one two three four five six", std::nullopt});
    }
    auto sorted_rules = [](const Bulletin& x) {
      auto r = rules(x);
      std::sort(r.begin(), r.end());
      return r;
    };
    auto shuffled = b;
    std::shuffle(shuffled.wind.begin(), shuffled.wind.end(), rng);
    std::shuffle(shuffled.sea_state.begin(), shuffled.sea_state.end(), rng);
    std::shuffle(shuffled.weather.begin(), shuffled.weather.end(), rng);
    std::shuffle(shuffled.visibility.begin(), shuffled.visibility.end(), rng);
    CHECK(sorted_rules(shuffled) == sorted_rules(b));
  }
}

TEST_CASE("parser fuzz: mutated bulletins fail with a declared kind or parse") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz ABC.,0123456789-";
  std::size_t rejected = 0;
  for (int k = 0; k < 3000; ++k) {
    std::string text = render_bulletin(testing::random_bulletin(rng), &reg());
    const int edits = testing::uniform_int(rng, 1, 4);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      const auto pos = static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(text.size()) - 1));
      switch (testing::uniform_int(rng, 0, 3)) {
        case 0: text.erase(pos, 1); break;
        case 1: text.insert(pos, 1, alphabet[static_cast<std::size_t>(testing::uniform_int(rng, 0, 42))]); break;
        case 2: text[pos] = alphabet[static_cast<std::size_t>(testing::uniform_int(rng, 0, 42))]; break;
        default: text.erase(pos, static_cast<std::size_t>(testing::uniform_int(rng, 1, 12))); break;
      }
    }
    try {
      (void)parse_bulletin(text, reg());
    } catch (const ParseError& e) {
      ++rejected;
      const auto kind = e.kind();
      CHECK((kind == ErrorKind::UnknownArea || kind == ErrorKind::ClauseSyntaxError ||
             kind == ErrorKind::ValueOutOfRange));
    }
  }
  CHECK(rejected > 1000);
}

TEST_CASE("json round trip and schema errors") {
  auto b = dover();
  b.wind = {{Compass8::SW, 8, 9, std::nullopt}};
  b.gale = GaleWarning{GaleSeverity::SevereGale, GaleTiming::Imminent};
  const auto j = to_json(b);
  CHECK(j.at("areas") == nlohmann::json::array({"Dover"}));
  CHECK(bulletin_from_json(j) == b);
  CHECK_THROWS_AS((void)bulletin_from_json(nlohmann::json::parse(R"({"areas": 3})")), Error);
}

TEST_CASE("gale severity table") {
  CHECK(severity_for_force(8) == GaleSeverity::Gale);
  CHECK(severity_for_force(9) == GaleSeverity::SevereGale);
  CHECK(severity_for_force(10) == GaleSeverity::Storm);
  CHECK(severity_for_force(11) == GaleSeverity::ViolentStorm);
  CHECK(severity_for_force(12) == GaleSeverity::HurricaneForce);
  CHECK(to_string(GaleSeverity::HurricaneForce) == "hurricane force");
  CHECK(kind_of([] { (void)severity_for_force(7); }) == ErrorKind::ValueOutOfRange);
}

TEST_CASE("synopsis render and parse") {
  Synopsis s;
  s.systems.push_back({SystemKind::Low, 984, "C4", Tendency::Deepening, Motion{Compass8::E, MotionSpeed::Steadily}});
  s.systems.push_back({SystemKind::High, 1032, "F7", Tendency::Steady, std::nullopt});
  const auto text = render_synopsis(s);
  CHECK(text == "General synopsis. Low C4 984, deepening, moving easterly steadily. High F7 1032, steady.");
  CHECK(parse_synopsis(text) == s);
  CHECK(render_synopsis(Synopsis{}) == "General synopsis. Nothing significant.");
  CHECK(parse_synopsis("General synopsis. Nothing significant.") == Synopsis{});
  CHECK(kind_of([] { (void)parse_synopsis("General synopsis. Low C4 850, steady."); }) == ErrorKind::ValueOutOfRange);
  CHECK(kind_of([] { (void)parse_synopsis("Low C4 990, steady."); }) == ErrorKind::ClauseSyntaxError);
}

TEST_CASE("segment a forecast of 31 single-area bulletins") {
  std::string text = "General synopsis. Low C4 990, steady.\n";
  for (const auto& a : reg().areas()) {
    auto b = dover();
    b.areas = {a.name};
    text += render_bulletin(b, &reg()) + "\n";
  }
  const auto frags = segment_forecast(text, reg());
  REQUIRE(frags.size() == 1 + 31 * 4);
  CHECK(frags[0].kind == FragmentKind::Synopsis);
  std::map<FragmentKind, int> per_kind;
  for (std::size_t k = 1; k < frags.size(); ++k) {
    CHECK(frags[k].areas.size() == 1);
    CHECK_FALSE(frags[k].excluded);
    ++per_kind[frags[k].kind];
  }
  CHECK(per_kind[FragmentKind::Wind] == 31);
  CHECK(per_kind[FragmentKind::Visibility] == 31);
  CHECK(frags[1].text == "Southwesterly 5 to 7.");
  CHECK(frags[4].text == "Good, becoming moderate.");
}

TEST_CASE("grouped areas are flagged excluded and gales kept separate") {
  auto b = dover();
  b.areas = {"Dover", "Wight"};
  auto g = dover();
  g.areas = {"Plymouth"};
  g.wind = {{Compass8::S, 7, 8, std::nullopt}};
  g.gale = GaleWarning{GaleSeverity::Gale, GaleTiming::Soon};
  const auto text = render_bulletin(b, &reg()) + " " + render_bulletin(g, &reg());
  const auto frags = segment_forecast(text, reg());
  REQUIRE(frags.size() == 9);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(frags[k].excluded);
    CHECK(frags[k].areas == std::vector<std::string>{"Dover", "Wight"});
  }
  CHECK(frags[4].kind == FragmentKind::Gale);
  CHECK(frags[4].text == "Warning of gale soon.");
  CHECK_FALSE(frags[5].excluded);
}

TEST_CASE("segmentation errors") {
  CHECK(kind_of([] { (void)segment_forecast("", reg()); }) == ErrorKind::ForecastStructureError);
  CHECK(kind_of([] { (void)segment_forecast("Nothing to see here.", reg()); }) == ErrorKind::ForecastStructureError);
  CHECK(kind_of([] { (void)segment_forecast("Dover. Westerly 4. Slight.", reg()); }) ==
        ErrorKind::ForecastStructureError);
}

TEST_CASE("timing vocabulary is closed") {
  for (auto t : {Timing::AtFirst, Timing::Later, Timing::Soon, Timing::Occasionally, Timing::Becoming}) {
    CHECK(parse_timing(to_string(t)) == t);
  }
  CHECK_FALSE(parse_timing("eventually"));
}
