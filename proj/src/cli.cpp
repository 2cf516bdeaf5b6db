#include "shipcast/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shipcast/bulletin.hpp"
#include "shipcast/corpus.hpp"
#include "shipcast/error.hpp"
#include "shipcast/eval.hpp"
#include "shipcast/gateway.hpp"
#include "shipcast/pipeline.hpp"

namespace shipcast {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* const kKnownKeys[] = {
    "areas",       "weather_codes", "scales",     "prompts_dir", "bundles_dir", "bulletins_dir",
    "percentile",  "mode",          "seed",       "backend",     "width",       "height",
    "pairing",     "parallelism",   "case",       "prompt_profile", "endpoint_url", "timeout_s",
    "max_retries",
};

const char* const kPathKeys[] = {"areas", "weather_codes", "scales", "prompts_dir", "bundles_dir", "bulletins_dir"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string env_name(const std::string& key) {
  std::string out = "FF_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot read " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + p.string());
  }
}

std::string slug(std::string_view name) {
  std::string out;
  for (char c : name) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                                       : '-';
  }
  return out;
}

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AlignmentError: return kExitAlignment;
    case ErrorKind::ValidationFailed: return kExitFindings;
    default: return kExitInput;
  }
}

// Shared state built from the resolved configuration.
struct Context {
  Config cfg;
  AreaRegistry registry;
  WeatherCodeMap weather;
  std::optional<ScaleSet> scales;
  PercentileTable percentiles;
  ScaleMode mode{ScaleMode::Categorical};
  fs::path out;
  std::ostream* log{nullptr};

  void load() {
    registry = AreaRegistry::load(cfg.path("areas", "config/areas.json"));
    weather = WeatherCodeMap::load(cfg.path("weather_codes", "config/weather_codes.json"));
    const auto scales_path = cfg.path("scales", "config/scales.json");
    if (cfg.get("scales") || fs::exists(scales_path)) {
      scales = ScaleSet::load(scales_path, weather);
    } else {
      scales = ScaleSet::builtin(weather);
    }
    percentiles.fallback = cfg.number("percentile", 50.0);
    for (const auto& [key, value] : cfg.values()) {
      if (key.starts_with("percentile.")) {
        percentiles.per_variable[parse_variable(key.substr(11))] = cfg.number(key, 50.0);
      }
    }
    auto check = [](double p) {
      if (!(p >= 0.0 && p <= 100.0)) {
        throw Error(ErrorKind::ConfigInvalid, "percentile must lie in [0, 100]");
      }
    };
    check(percentiles.fallback);
    for (const auto& [v, p] : percentiles.per_variable) {
      check(p);
    }
    try {
      mode = parse_scale_mode(cfg.get_or("mode", "categorical"));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigInvalid, e.what());
    }
  }

  [[nodiscard]] RasterSize raster() const {
    return {static_cast<int>(cfg.number("width", 1000)), static_cast<int>(cfg.number("height", 600))};
  }

  [[nodiscard]] std::uint64_t seed() const {
    const auto s = cfg.get("seed");
    if (!s) {
      throw Error(ErrorKind::ConfigInvalid, "a seed is required (--seed or seed = ...)");
    }
    try {
      std::size_t used = 0;
      const auto v = std::stoull(*s, &used);
      if (used != s->size()) {
        throw std::invalid_argument("trailing characters");
      }
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigInvalid, "seed must be a non-negative integer, got '" + *s + "'");
    }
  }
};

struct CaseRef {
  std::string id;
  fs::path dir;
};

bool is_case_dir(const fs::path& dir) {
  for (auto v : kRequiredVariables) {
    if (fs::exists(dir / std::string(to_string(v)))) {
      return true;
    }
  }
  return false;
}

/// A bundles directory is either one case or a directory of cases.
std::vector<CaseRef> list_cases(const fs::path& bundles, const std::optional<std::string>& only) {
  if (!fs::is_directory(bundles)) {
    throw Error(ErrorKind::IoError, "bundles directory not found: " + bundles.string());
  }
  if (is_case_dir(bundles)) {
    return {{bundles.filename().string(), bundles}};
  }
  std::vector<CaseRef> out;
  if (only) {
    out.push_back({*only, bundles / *only});
    if (!fs::is_directory(out.back().dir)) {
      throw Error(ErrorKind::IoError, "case not found: " + out.back().dir.string());
    }
    return out;
  }
  for (const auto& e : fs::directory_iterator(bundles)) {
    if (e.is_directory()) {
      out.push_back({e.path().filename().string(), e.path()});
    }
  }
  std::sort(out.begin(), out.end(), [](const CaseRef& a, const CaseRef& b) { return a.id < b.id; });
  if (out.empty()) {
    throw Error(ErrorKind::IoError, "no cases under " + bundles.string());
  }
  return out;
}

std::string issue_time_of(const FieldSet& fields) {
  return format_iso8601(fields.at(Variable::WindSpeed).times.front());
}

// -- generate ------------------------------------------------------------------

int cmd_generate(Context& ctx) {
  const auto cases = list_cases(ctx.cfg.path("bundles_dir", "bundles"), ctx.cfg.get("case"));
  for (const auto& c : cases) {
    const auto fields = load_case(c.dir, ctx.percentiles);
    const Forecast f = generate_forecast(fields, ctx.registry, *ctx.scales);
    const fs::path dir = cases.size() == 1 ? ctx.out : ctx.out / c.id;
    write_text(dir / "forecast.txt", render_forecast(f, ctx.registry));
    std::string lines;
    for (const auto& b : f.per_area) {
      lines += to_json(b).dump() + "\n";
    }
    write_text(dir / "bulletins.jsonl", lines);
    *ctx.log << "generate: " << c.id << ": " << f.groups.size() << " bulletin group(s) -> " << dir.string() << "\n";
  }
  return kExitOk;
}

// -- render-frames / corpus --------------------------------------------------------

const std::vector<std::string> kFrameAttributes{"wind", "wave_height", "visibility", "weather_code", "pressure"};

std::vector<std::string> write_area_frames(const Context& ctx, const FieldSet& fields, const SeaArea& area,
                                           const std::vector<std::string>& attributes, const fs::path& dir,
                                           const fs::path& root) {
  std::vector<std::string> manifests;
  const auto size = ctx.raster();
  for (const auto& attr : attributes) {
    if (attr == "pressure") {
      continue;
    }
    FrameSet fs_;
    if (attr == "wind") {
      fs_ = encode_combined_wind(fields.at(Variable::WindDirection), fields.at(Variable::WindSpeed), &area, ctx.mode,
                                 *ctx.scales, size);
    } else {
      fs_ = encode_attribute_video(fields.at(parse_variable(attr)), &area, ctx.mode, *ctx.scales, size);
    }
    write_frameset(dir / attr, fs_);
    manifests.push_back(fs::relative(dir / attr / "frameset.json", root).generic_string());
  }
  return manifests;
}

std::optional<std::string> write_pressure_frames(const Context& ctx, const FieldSet& fields, const fs::path& dir,
                                                 const fs::path& root) {
  const auto it = fields.find(Variable::Pressure);
  if (it == fields.end()) {
    return std::nullopt;
  }
  write_frameset(dir, render_pressure_frames(it->second, ctx.mode, *ctx.scales, ctx.raster()));
  return fs::relative(dir / "frameset.json", root).generic_string();
}

int cmd_render_frames(Context& ctx, const std::vector<std::string>& areas_opt, std::vector<std::string> attributes) {
  if (attributes.empty()) {
    attributes = kFrameAttributes;
  }
  for (const auto& a : attributes) {
    if (std::find(kFrameAttributes.begin(), kFrameAttributes.end(), a) == kFrameAttributes.end()) {
      throw Error(ErrorKind::UnknownAttribute, "cannot render '" + a + "'");
    }
  }
  check_raster_size(ctx.raster());
  std::vector<const SeaArea*> areas;
  if (areas_opt.empty()) {
    for (const auto& a : ctx.registry.areas()) {
      areas.push_back(&a);
    }
  } else {
    for (const auto& a : areas_opt) {
      areas.push_back(&ctx.registry.get(a));
    }
  }
  const auto cases = list_cases(ctx.cfg.path("bundles_dir", "bundles"), ctx.cfg.get("case"));
  for (const auto& c : cases) {
    const auto fields = load_case(c.dir, ctx.percentiles);
    const fs::path dir = cases.size() == 1 ? ctx.out : ctx.out / c.id;
    if (std::find(attributes.begin(), attributes.end(), "pressure") != attributes.end()) {
      write_pressure_frames(ctx, fields, dir / "pressure", ctx.out);
    }
    for (const auto* area : areas) {
      write_area_frames(ctx, fields, *area, attributes, dir / slug(area->name), ctx.out);
    }
    *ctx.log << "render-frames: " << c.id << " -> " << dir.string() << "\n";
  }
  return kExitOk;
}

int cmd_corpus(Context& ctx) {
  const std::uint64_t seed = ctx.seed();
  const std::string pairing = ctx.cfg.get_or("pairing", "single");
  if (pairing != "single" && pairing != "group") {
    throw Error(ErrorKind::ConfigInvalid, "pairing must be 'single' or 'group'");
  }
  check_raster_size(ctx.raster());
  const fs::path bundles = ctx.cfg.path("bundles_dir", "bundles");
  const fs::path archive = ctx.cfg.path("bulletins_dir", "bulletins");
  if (!fs::is_directory(archive)) {
    throw Error(ErrorKind::IoError, "bulletin archive not found: " + archive.string());
  }
  std::map<std::string, fs::path> texts;
  for (const auto& e : fs::directory_iterator(archive)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      texts[e.path().stem().string()] = e.path();
    }
  }
  std::map<std::string, fs::path> case_dirs;
  if (fs::is_directory(bundles)) {
    for (const auto& c : list_cases(bundles, std::nullopt)) {
      case_dirs[c.id] = c.dir;
    }
  }
  if (texts.empty() && case_dirs.empty()) {
    throw Error(ErrorKind::IoError, "no bulletins or bundles to pair");
  }

  std::vector<CorpusInput> inputs;
  std::vector<std::string> orphans;
  for (const auto& [id, dir] : case_dirs) {
    if (!texts.contains(id)) {
      orphans.push_back("case " + id + ": no archived bulletin");
    }
  }
  for (const auto& [id, text_path] : texts) {
    const auto cd = case_dirs.find(id);
    if (cd == case_dirs.end()) {
      orphans.push_back("bulletin " + id + ": no matching fields");
      continue;
    }
    ParsedForecast parsed;
    FieldSet fields;
    try {
      parsed = parse_forecast(read_text(text_path), ctx.registry);
      fields = load_case(cd->second, ctx.percentiles);
    } catch (const Error& e) {
      orphans.push_back("bulletin " + id + ": " + e.what());
      continue;
    }
    const std::string issue = issue_time_of(fields);
    const fs::path case_root = ctx.out / "frames" / id;
    const auto pressure = write_pressure_frames(ctx, fields, case_root / "pressure", ctx.out);
    std::map<std::string, std::vector<std::string>> area_frames;
    for (const auto& b : parsed.groups) {
      if (pairing == "single" && b.areas.size() > 1) {
        continue;
      }
      std::vector<std::string> frame_sets;
      for (const auto& name : b.areas) {
        const auto& area = ctx.registry.get(name);
        auto [it, fresh] = area_frames.try_emplace(area.name);
        if (fresh) {
          it->second = write_area_frames(ctx, fields, area, kFrameAttributes, case_root / slug(area.name), ctx.out);
        }
        frame_sets.insert(frame_sets.end(), it->second.begin(), it->second.end());
      }
      if (pressure) {
        frame_sets.push_back(*pressure);
      }
      std::string entry = id + "/";
      for (std::size_t k = 0; k < b.areas.size(); ++k) {
        entry += (k ? "+" : "") + slug(b.areas[k]);
      }
      const fs::path bulletin_rel = fs::path("bulletins") / id / (entry.substr(id.size() + 1) + ".json");
      write_text(ctx.out / bulletin_rel, to_json(b).dump(2) + "\n");
      inputs.push_back({entry, frame_sets, bulletin_rel.generic_string(), issue});
    }
  }
  if (inputs.empty()) {
    for (const auto& o : orphans) {
      *ctx.log << "corpus: orphan: " << o << "\n";
    }
    throw Error(ErrorKind::IoError, "no pairable bulletins");
  }
  CorpusManifest manifest = build_corpus(inputs, seed);
  manifest.orphans = orphans;
  json j = to_json(manifest);
  j["pairing"] = pairing;
  write_text(ctx.out / "corpus.json", j.dump(2) + "\n");
  for (const auto& o : orphans) {
    *ctx.log << "corpus: warning: orphan " << o << "\n";
  }
  *ctx.log << "corpus: " << manifest.entries.size() << " entries (" << manifest.counts[0] << "/" << manifest.counts[1]
           << "/" << manifest.counts[2] << ") -> " << (ctx.out / "corpus.json").string() << "\n";
  return kExitOk;
}

// -- evaluate ----------------------------------------------------------------------

std::shared_ptr<Backend> make_backend(const Context& ctx, const std::string& id) {
  if (id == "local") {
    return std::make_shared<LocalBackend>(*ctx.scales, id);
  }
  if (id == "remote") {
    RemoteConfig rc;
    rc.endpoint_url = ctx.cfg.get_or("endpoint_url", "");
    rc.timeout_s = ctx.cfg.number("timeout_s", 30.0);
    rc.max_retries = static_cast<int>(ctx.cfg.number("max_retries", 2));
    if (const char* t = std::getenv("FF_BEARER_TOKEN")) {
      rc.bearer_token = t;
    }
    if (rc.timeout_s <= 0.0 || rc.max_retries < 0) {
      throw Error(ErrorKind::ConfigInvalid, "timeout_s must be positive and max_retries non-negative");
    }
    return std::make_shared<RemoteBackend>(rc, PromptLibrary::load(ctx.cfg.path("prompts_dir", "config/prompts")),
                                           nullptr, id);
  }
  throw Error(ErrorKind::UnknownBackend, "no backend named '" + id + "' (known: local, remote)");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) {
      out.push_back(part);
    }
  }
  return out;
}

int cmd_evaluate(Context& ctx, std::vector<std::string> expected_files, const std::vector<std::string>& system_files) {
  if (expected_files.empty()) {
    const fs::path archive = ctx.cfg.path("bulletins_dir", "bulletins");
    if (!fs::is_directory(archive)) {
      throw Error(ErrorKind::IoError, "no expected forecasts given and no bulletin archive at " + archive.string());
    }
    for (const auto& e : fs::directory_iterator(archive)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") {
        expected_files.push_back(e.path().string());
      }
    }
    std::sort(expected_files.begin(), expected_files.end());
  }
  if (expected_files.empty()) {
    throw Error(ErrorKind::IoError, "no expected forecasts to evaluate");
  }
  const fs::path bundles = ctx.cfg.path("bundles_dir", "bundles");
  const bool single_case = fs::is_directory(bundles) && is_case_dir(bundles);

  std::vector<TextRecord> expected;
  std::vector<GenerationRequest> requests;
  const std::string profile = ctx.cfg.get_or("prompt_profile", "default");
  for (const auto& file : expected_files) {
    const fs::path path(file);
    const std::string id = path.stem().string();
    const auto fragments = segment_forecast(read_text(path), ctx.registry);
    const fs::path case_dir = single_case ? bundles : bundles / id;
    const auto fields = load_case(case_dir, ctx.percentiles);
    const auto records = expected_records(fragments, issue_time_of(fields));
    std::map<std::string, std::string> summaries;
    for (const auto& r : records) {
      expected.push_back(r);
      if (r.excluded) {
        continue;
      }
      auto [it, fresh] = summaries.try_emplace(r.key.area);
      if (fresh) {
        const auto& area = ctx.registry.get(r.key.area);
        it->second = data_summary(area_inputs(fields, area, ctx.weather), area.name);
      }
      GenerationRequest req;
      req.area = r.key.area;
      req.attribute = parse_fragment_kind(r.key.attribute);
      req.text_input = it->second;
      req.prompt_profile = profile;
      requests.push_back(std::move(req));
    }
  }

  std::vector<std::pair<std::string, std::vector<TextRecord>>> outputs;
  const auto parallelism = static_cast<std::size_t>(std::max(1.0, ctx.cfg.number("parallelism", 4)));
  for (const auto& id : split_commas(ctx.cfg.get_or("backend", "local"))) {
    auto backend = make_backend(ctx, id);
    const auto results = batch_generate(requests, *backend, parallelism);
    std::vector<TextRecord> records;
    std::size_t failures = 0;
    std::size_t k = 0;
    for (const auto& e : expected) {
      if (e.excluded) {
        continue;
      }
      const auto& res = results[k++];
      if (!res.ok()) {
        ++failures;
        *ctx.log << "evaluate: " << id << ": " << e.key.area << "/" << e.key.attribute << ": " << res.error << "\n";
      }
      records.push_back({e.key, res.ok() ? res.response->text : std::string(), false});
    }
    if (failures > 0) {
      *ctx.log << "evaluate: warning: " << id << " failed on " << failures << " fragment(s); scored as empty\n";
    }
    write_jsonl(ctx.out / ("outputs_" + id + ".jsonl"), records);
    outputs.emplace_back(id, std::move(records));
  }
  for (const auto& entry : system_files) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::ConfigInvalid, "--system expects name=path.jsonl, got '" + entry + "'");
    }
    outputs.emplace_back(entry.substr(0, eq), read_jsonl(entry.substr(eq + 1)));
  }
  write_jsonl(ctx.out / "expected.jsonl", expected);
  const EvalReport report = evaluate_systems(expected, outputs);
  write_text(ctx.out / "report.txt", render_report(report));
  write_text(ctx.out / "report.json", to_json(report).dump(2) + "\n");
  *ctx.log << "evaluate: " << report.systems.size() << " system(s), " << report.excluded_count
           << " excluded fragment(s) -> " << (ctx.out / "report.txt").string() << "\n";
  return kExitOk;
}

// -- validate ----------------------------------------------------------------------

int cmd_validate(Context& ctx, const std::string& file, std::ostream& out) {
  const std::string text = read_text(file);
  std::vector<std::pair<std::string, Bulletin>> bulletins;
  const std::string body = trim(text);
  if (body.starts_with("{") || body.starts_with("[")) {
    std::stringstream lines(body);
    std::string line;
    std::size_t n = 0;
    auto add = [&](const json& j, const std::string& where) { bulletins.emplace_back(where, bulletin_from_json(j)); };
    try {
      const json whole = json::parse(body);
      if (whole.is_array()) {
        for (const auto& j : whole) {
          add(j, "item " + std::to_string(++n));
        }
      } else {
        add(whole, "bulletin");
      }
    } catch (const json::parse_error&) {
      while (std::getline(lines, line)) {
        ++n;
        if (!trim(line).empty()) {
          add(json::parse(line), "line " + std::to_string(n));
        }
      }
    }
  } else {
    std::stringstream lines(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      ++n;
      const auto t = trim(line);
      if (t.empty()) {
        continue;
      }
      if (t.starts_with("General synopsis")) {
        (void)parse_synopsis(t);
        continue;
      }
      try {
        bulletins.emplace_back("line " + std::to_string(n), parse_bulletin(t, ctx.registry));
      } catch (const ParseError& e) {
        throw ParseError(e.kind(), e.attribute(), e.span(), "line " + std::to_string(n) + ": " + e.what());
      }
    }
  }
  if (bulletins.empty()) {
    throw Error(ErrorKind::ClauseSyntaxError, "no bulletins in " + file);
  }
  std::size_t findings = 0;
  for (const auto& [where, b] : bulletins) {
    for (const auto& v : validate(b, &ctx.registry)) {
      ++findings;
      out << where << ": " << to_string(v.rule) << ": " << v.detail << "\n";
    }
  }
  if (findings == 0) {
    out << bulletins.size() << " bulletin(s), no rule violations\n";
    return kExitOk;
  }
  return kExitFindings;
}

}  // namespace

// -- Config ------------------------------------------------------------------------

Config Config::from_text(std::string_view text, const fs::path& base_dir) {
  Config c;
  c.base_dir_ = base_dir;
  std::stringstream lines{std::string(text)};
  std::string line;
  std::string section;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') {
        quoted = !quoted;
      } else if (line[k] == '#' && !quoted) {
        line.resize(k);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) {
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw Error(ErrorKind::ConfigInvalid, "line " + std::to_string(n) + ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigInvalid, "line " + std::to_string(n) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorKind::ConfigInvalid, "line " + std::to_string(n) + ": empty key");
    }
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!section.empty()) {
      key = section + "." + key;
    }
    if (is_path_key(key) && !base_dir.empty() && fs::path(value).is_relative()) {
      value = (base_dir / value).lexically_normal().string();
    }
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::ConfigInvalid, "cannot read config " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path.parent_path());
}

bool Config::is_path_key(std::string_view key) {
  return std::find(std::begin(kPathKeys), std::end(kPathKeys), key) != std::end(kPathKeys);
}

void Config::apply_env() {
  std::vector<std::string> keys(std::begin(kKnownKeys), std::end(kKnownKeys));
  for (auto v : {Variable::WindSpeed, Variable::WindDirection, Variable::WaveHeight, Variable::Visibility,
                 Variable::WeatherCode, Variable::Pressure}) {
    keys.push_back("percentile." + std::string(to_string(v)));
  }
  for (const auto& key : keys) {
    if (const char* v = std::getenv(env_name(key).c_str())) {
      values_[key] = v;
    }
  }
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double Config::number(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) {
    return fallback;
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used != v->size()) {
      throw std::invalid_argument("trailing characters");
    }
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigInvalid, key + " must be a number, got '" + *v + "'");
  }
}

fs::path Config::path(const std::string& key, const fs::path& fallback) const {
  return fs::path(get(key).value_or(fallback.string()));
}

// -- entry point -------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Marine bulletin generation, corpus building and evaluation", "shipcast"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::string> seed;
  std::optional<std::string> mode;
  std::vector<std::string> percentiles;
  std::optional<std::string> backend;
  std::optional<std::string> case_id;
  std::vector<std::string> overrides;

  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", config_path, "Key/value config file");
    if (with_out) {
      sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    }
    sub->add_option("--percentile", percentiles, "Percentile for every variable, or variable=p")->take_all();
    sub->add_option("--mode", mode, "categorical or continuous");
    sub->add_option("--seed", seed, "Seed for shuffles (required by corpus)");
    sub->add_option("--backend", backend, "Comma-separated backend ids (local, remote)");
    sub->add_option("--set", overrides, "Override any config key: key=value");
  };

  auto* gen = app.add_subcommand("generate", "Generate forecast text and bulletin JSON from grid bundles");
  common(gen, true);
  gen->add_option("--case", case_id, "Case id under bundles_dir");

  auto* corpus = app.add_subcommand("corpus", "Render frames and write a shuffled corpus manifest");
  common(corpus, true);

  auto* evaluate = app.add_subcommand("evaluate", "Score systems against expected forecasts");
  common(evaluate, true);
  std::vector<std::string> expected_files;
  std::vector<std::string> system_files;
  evaluate->add_option("--expected", expected_files, "Expected forecast text file(s); stem = case id");
  evaluate->add_option("--system", system_files, "Extra system outputs: name=path.jsonl");

  auto* validate_cmd = app.add_subcommand("validate", "Check bulletins against the format rules");
  common(validate_cmd, false);
  std::string validate_file;
  validate_cmd->add_option("file", validate_file, "Bulletin text or JSON file")->required();

  auto* render = app.add_subcommand("render-frames", "Render frame sets for areas and attributes");
  common(render, true);
  render->add_option("--case", case_id, "Case id under bundles_dir");
  std::vector<std::string> render_areas;
  std::vector<std::string> render_attrs;
  render->add_option("--area", render_areas, "Sea area (repeatable; default all)");
  render->add_option("--attribute", render_attrs, "wind, wave_height, visibility, weather_code or pressure");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitInput;
  }

  Context ctx;
  ctx.log = &err;
  const std::string which = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) {
      ctx.cfg = Config::load(config_path);
    } else if (fs::exists("shipcast.toml")) {
      ctx.cfg = Config::load("shipcast.toml");
    }
    ctx.cfg.apply_env();
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::ConfigInvalid, "--set expects key=value, got '" + o + "'");
      }
      ctx.cfg.set(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
    }
    for (const auto& p : percentiles) {
      const auto eq = p.find('=');
      if (eq == std::string::npos) {
        ctx.cfg.set("percentile", p);
      } else {
        ctx.cfg.set("percentile." + p.substr(0, eq), p.substr(eq + 1));
      }
    }
    if (seed) {
      ctx.cfg.set("seed", *seed);
    }
    if (mode) {
      ctx.cfg.set("mode", *mode);
    }
    if (backend) {
      ctx.cfg.set("backend", *backend);
    }
    if (case_id) {
      ctx.cfg.set("case", *case_id);
    }
    ctx.out = out_dir;
    ctx.load();

    if (which == "generate") {
      return cmd_generate(ctx);
    }
    if (which == "corpus") {
      return cmd_corpus(ctx);
    }
    if (which == "evaluate") {
      return cmd_evaluate(ctx, expected_files, system_files);
    }
    if (which == "validate") {
      return cmd_validate(ctx, validate_file, out);
    }
    return cmd_render_frames(ctx, render_areas, render_attrs);
  } catch (const ParseError& e) {
    err << "shipcast " << which << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "shipcast " << which << ": " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const json::exception& e) {
    err << "shipcast " << which << ": malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "shipcast " << which << ": " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace shipcast
