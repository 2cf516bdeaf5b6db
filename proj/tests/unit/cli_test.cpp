#include <doctest.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shipcast/bulletin.hpp"
#include "shipcast/cli.hpp"
#include "shipcast/eval.hpp"
#include "shipcast/synthetic.hpp"
#include "test_support.hpp"

using namespace shipcast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin() + 1, {"--set", "areas=" + testing::source_path("config/areas.json").string(), "--set",
                                 "weather_codes=" + testing::source_path("config/weather_codes.json").string(),
                                 "--set", "scales=" + testing::source_path("config/scales.json").string()});
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

FieldSet case_fields(std::uint64_t seed, bool benign = false) {
  SyntheticOptions o;
  o.seed = seed;
  o.spacing_deg = 1.0;
  o.benign = benign;
  o.start += std::chrono::days(seed);
  return synthetic_fields(o);
}

std::string pinned(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::from_text(
      "# comment\nseed = 7\nmode = \"continuous\"  # trailing\nareas = areas.json\n[percentile]\nwind_speed = 85\n",
      "/etc/shipcast");
  CHECK(c.get("seed") == "7");
  CHECK(c.get("mode") == "continuous");
  CHECK(c.get("areas") == "/etc/shipcast/areas.json");
  CHECK(c.number("percentile.wind_speed", 0) == 85);
  CHECK(c.number("missing", 3.5) == 3.5);
  CHECK_FALSE(c.get("nope"));
  CHECK_THROWS_AS((void)Config::from_text("no equals here"), Error);
  CHECK_THROWS_AS((void)Config::from_text("[open\n"), Error);
  CHECK_THROWS_AS((void)Config::from_text("seed = x").number("seed", 0), Error);
  CHECK(Config::is_path_key("bundles_dir"));
  CHECK_FALSE(Config::is_path_key("seed"));
  const auto shipped = Config::load(testing::source_path("config/shipcast.toml"));
  CHECK(shipped.get("seed"));
}

TEST_CASE("config precedence: file < environment < flags") {
  testing::TempDir dir;
  write_case(dir / "bundles", case_fields(1));
  testing::spit(dir / "shipcast.toml", "mode = bogus\nbundles_dir = bundles\n");
  const std::string cfg = pinned(dir / "shipcast.toml");
  const std::string out = pinned(dir / "out");

  CHECK(run({"generate", "--config", cfg, "--out", out}).code == kExitInput);
  ::setenv("FF_MODE", "continuous", 1);
  CHECK(run({"generate", "--config", cfg, "--out", out}).code == kExitOk);
  CHECK(run({"generate", "--config", cfg, "--out", out, "--mode", "bogus"}).code == kExitInput);
  ::unsetenv("FF_MODE");
  CHECK(run({"generate", "--config", cfg, "--out", out, "--mode", "categorical"}).code == kExitOk);

  auto c = Config::from_text("percentile = 30\n");
  ::setenv("FF_PERCENTILE", "40", 1);
  c.apply_env();
  CHECK(c.number("percentile", 0) == 40);
  c.set("percentile", "60");
  CHECK(c.number("percentile", 0) == 60);
  ::unsetenv("FF_PERCENTILE");
}

TEST_CASE("generate writes text and JSON, deterministically") {
  testing::TempDir dir;
  write_case(dir / "bundles" / "day1", case_fields(1));
  write_case(dir / "bundles" / "day2", case_fields(2, true));
  const auto a = run({"generate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--out", pinned(dir / "a")});
  REQUIRE(a.code == kExitOk);
  const auto b = run({"generate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--out", pinned(dir / "b")});
  REQUIRE(b.code == kExitOk);
  CHECK(testing::hash_tree(dir / "a") == testing::hash_tree(dir / "b"));

  const auto text = testing::slurp(dir / "a" / "day2" / "forecast.txt");
  const auto parsed = parse_forecast(text, testing::registry());
  CHECK(parsed.groups.size() <= 31);
  CHECK(parsed.groups.size() == 1);
  std::istringstream lines(testing::slurp(dir / "a" / "day1" / "bulletins.jsonl"));
  std::string line;
  std::size_t n = 0;
  for (; std::getline(lines, line); ++n) {
    CHECK(validate(bulletin_from_json(nlohmann::json::parse(line)), &testing::registry()).empty());
  }
  CHECK(n == 31);

  const auto one = run({"generate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--case", "day1", "--out",
                        pinned(dir / "c")});
  CHECK(one.code == kExitOk);
  CHECK(testing::slurp(dir / "c" / "forecast.txt") == testing::slurp(dir / "a" / "day1" / "forecast.txt"));

  fs::remove_all(dir / "bundles" / "day1" / "wave_height");
  const auto missing = run({"generate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--case", "day1", "--out",
                            pinned(dir / "d")});
  CHECK(missing.code == kExitInput);
  CHECK(missing.err.find("wave_height") != std::string::npos);
  CHECK(run({"generate", "--set", "bundles_dir=" + pinned(dir / "nowhere"), "--out", pinned(dir / "e")}).code ==
        kExitInput);
}

TEST_CASE("validate exit codes") {
  testing::TempDir dir;
  testing::spit(dir / "ok.txt", "Dover. Westerly 4. Slight. Fair. Good.\nWight. Southerly 5 to 7. Moderate. Rain. Good.\n");
  const auto ok = run({"validate", pinned(dir / "ok.txt")});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("2 bulletin(s)") != std::string::npos);

  auto b = parse_bulletin("Dover. Westerly 4. Slight. Fair. Good.", testing::registry());
  b.weather = {{"rain and sleet with heavy squalls", std::nullopt}};
  testing::spit(dir / "long.json", to_json(b).dump());
  const auto long_weather = run({"validate", pinned(dir / "long.json")});
  CHECK(long_weather.code == kExitFindings);
  CHECK(long_weather.out.find(std::string(to_string(RuleViolation::WeatherTooLong))) != std::string::npos);

  testing::spit(dir / "junk.txt", "the sea was angry that day my friends\n");
  CHECK(run({"validate", pinned(dir / "junk.txt")}).code == kExitInput);
  CHECK(run({"validate", pinned(dir / "absent.txt")}).code == kExitInput);
  CHECK(run({"validate"}).code == kExitInput);
  CHECK(run({"frobnicate"}).code == kExitInput);
}

TEST_CASE("corpus splits and seeds") {
  testing::TempDir dir;
  for (int d = 1; d <= 20; ++d) {
    const std::string id = "day" + std::string(d < 10 ? "0" : "") + std::to_string(d);
    SyntheticOptions o;
    o.seed = static_cast<std::uint64_t>(d);
    o.spacing_deg = 1.0;
    o.bbox = {46, 56, -8, 6};
    write_case(dir / "bundles" / id, synthetic_fields(o));
    testing::spit(dir / "bulletins" / (id + ".txt"), "Dover. Westerly 4. Slight. Fair. Good.\n");
  }
  testing::spit(dir / "bulletins" / "stray.txt", "Dover. Westerly 4. Slight. Fair. Good.\n");
  auto corpus = [&](const std::string& seed, const fs::path& out) {
    return run({"corpus", "--seed", seed, "--set", "bundles_dir=" + pinned(dir / "bundles"), "--set",
                "bulletins_dir=" + pinned(dir / "bulletins"), "--set", "width=50", "--set", "height=30", "--out",
                pinned(out)});
  };
  REQUIRE(corpus("1", dir / "o1").code == kExitOk);
  REQUIRE(corpus("1", dir / "o1b").code == kExitOk);
  REQUIRE(corpus("2", dir / "o2").code == kExitOk);
  const auto j1 = nlohmann::json::parse(testing::slurp(dir / "o1" / "corpus.json"));
  const auto j2 = nlohmann::json::parse(testing::slurp(dir / "o2" / "corpus.json"));
  CHECK(testing::hash_tree(dir / "o1") == testing::hash_tree(dir / "o1b"));
  auto split_of = [](const nlohmann::json& j) {
    std::map<std::string, std::string> m;
    std::map<std::string, int> counts;
    for (const auto& e : j["entries"]) {
      m[e["id"]] = e["split"];
      ++counts[e["split"]];
    }
    return std::pair{m, counts};
  };
  const auto [m1, c1] = split_of(j1);
  const auto [m2, c2] = split_of(j2);
  CHECK(m1.size() == 20);
  CHECK(c1.at("train") == 14);
  CHECK(c1.at("validation") == 3);
  CHECK(c1.at("test") == 3);
  CHECK(c1 == c2);
  CHECK(m1 != m2);
  CHECK(j1["orphans"].size() == 1);
  for (const auto& e : j1["entries"]) {
    for (const auto& f : e["frame_sets"]) {
      CHECK(fs::exists(dir / "o1" / f.get<std::string>()));
    }
  }

  CHECK(run({"corpus", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--set",
             "bulletins_dir=" + pinned(dir / "bulletins"), "--out", pinned(dir / "x")})
            .code == kExitInput);
  fs::create_directories(dir / "empty");
  CHECK(run({"corpus", "--seed", "1", "--set", "bundles_dir=" + pinned(dir / "empty"), "--set",
             "bulletins_dir=" + pinned(dir / "empty"), "--out", pinned(dir / "x")})
            .code == kExitInput);
  CHECK(corpus("1", dir / "o3").code == kExitOk);
  CHECK(run({"corpus", "--seed", "1", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--set",
             "bulletins_dir=" + pinned(dir / "bulletins"), "--set", "width=50", "--set", "height=31", "--out",
             pinned(dir / "x")})
            .code == kExitInput);
}

TEST_CASE("evaluate end to end") {
  testing::TempDir dir;
  write_case(dir / "bundles" / "day1", case_fields(1));
  REQUIRE(run({"generate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--out", pinned(dir / "gen")}).code ==
          kExitOk);
  fs::create_directories(dir / "bulletins");
  fs::copy_file(dir / "gen" / "forecast.txt", dir / "bulletins" / "day1.txt");

  const auto self = run({"evaluate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--expected",
                         pinned(dir / "bulletins" / "day1.txt"), "--out", pinned(dir / "ev")});
  INFO(self.err);
  REQUIRE(self.code == kExitOk);
  const auto report = nlohmann::json::parse(testing::slurp(dir / "ev" / "report.json"));
  const auto txt = testing::slurp(dir / "ev" / "report.txt");
  CHECK(txt.find("Average") != std::string::npos);
  CHECK(txt.find("Difference") == std::string::npos);
  CHECK(report.dump().find("excluded") != std::string::npos);

  const auto expected = read_jsonl(dir / "ev" / "expected.jsonl");
  const auto local = read_jsonl(dir / "ev" / "outputs_local.jsonl");
  std::size_t excluded = 0;
  for (const auto& r : expected) {
    excluded += r.excluded ? 1 : 0;
  }
  CHECK(local.size() + excluded == expected.size());
  std::vector<std::pair<std::string, std::vector<TextRecord>>> outs{{"local", local}};
  CHECK(evaluate_systems(expected, outs).average_f1("local") == 1.0);

  auto worse = local;
  for (auto& r : worse) {
    if (r.key.attribute == "weather") {
      r.text = "Thundery showers.";
    }
  }
  write_jsonl(dir / "worse.jsonl", worse);
  const auto two = run({"evaluate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--expected",
                        pinned(dir / "bulletins" / "day1.txt"), "--system", "worse=" + pinned(dir / "worse.jsonl"),
                        "--out", pinned(dir / "ev2")});
  REQUIRE(two.code == kExitOk);
  CHECK(testing::slurp(dir / "ev2" / "report.txt").find("Difference") != std::string::npos);

  worse.pop_back();
  write_jsonl(dir / "short.jsonl", worse);
  const auto misaligned = run({"evaluate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--expected",
                               pinned(dir / "bulletins" / "day1.txt"), "--system",
                               "short=" + pinned(dir / "short.jsonl"), "--out", pinned(dir / "ev3")});
  CHECK(misaligned.code == kExitAlignment);
  CHECK(run({"evaluate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--expected",
             pinned(dir / "bulletins" / "day1.txt"), "--backend", "psychic", "--out", pinned(dir / "ev4")})
            .code == kExitInput);
}

TEST_CASE("grouped areas are excluded from scoring") {
  testing::TempDir dir;
  write_case(dir / "bundles" / "day1", case_fields(4, true));
  fs::create_directories(dir / "bulletins");
  testing::spit(dir / "bulletins" / "day1.txt",
                "Dover, Wight. Westerly 4. Slight. Fair. Good.\nPortland. Westerly 4. Slight. Fair. Good.\n");
  const auto r = run({"evaluate", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--set",
                      "bulletins_dir=" + pinned(dir / "bulletins"), "--out", pinned(dir / "ev")});
  REQUIRE(r.code == kExitOk);
  const auto report = nlohmann::json::parse(testing::slurp(dir / "ev" / "report.json"));
  CHECK(report["excluded_count"].get<int>() == 8);
}

TEST_CASE("render-frames writes manifests") {
  testing::TempDir dir;
  write_case(dir / "bundles", case_fields(2));
  const auto r = run({"render-frames", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--area", "Dover",
                      "--attribute", "wind", "--attribute", "pressure", "--set", "width=50", "--set", "height=30",
                      "--out", pinned(dir / "frames")});
  REQUIRE(r.code == kExitOk);
  const auto wind = nlohmann::json::parse(testing::slurp(dir / "frames" / "dover" / "wind" / "frameset.json"));
  CHECK(wind["frames"].size() == 48);
  CHECK(fs::exists(dir / "frames" / "pressure" / "frameset.json"));
  CHECK(run({"render-frames", "--set", "bundles_dir=" + pinned(dir / "bundles"), "--attribute", "humidity", "--out",
             pinned(dir / "f2")})
            .code == kExitInput);
}
