#include "shipcast/bulletin.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include <nlohmann/json.hpp>

namespace shipcast {
namespace {

using nlohmann::json;

struct Sentence {
  std::string text;  // trimmed, without the terminating period
  std::size_t begin;
  std::size_t end;  // one past the period
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && is_space(s[a])) {
    ++a;
  }
  while (b > a && is_space(s[b - 1])) {
    --b;
  }
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_space(c)) {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    out.push_back(std::move(cur));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) {
      out += sep;
    }
    out += parts[k];
  }
  return out;
}

/// Splits on `sep`, trimming each part.
std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

std::string normalize_spaces(std::string_view s) { return join(split_words(s), " "); }

std::string sentence_case(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::vector<Sentence> split_sentences(std::string_view text, bool require_final_period) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '.') {
      out.push_back({trim(text.substr(start, k - start)), start, k + 1});
      start = k + 1;
    }
  }
  const std::string tail = trim(text.substr(start));
  if (!tail.empty()) {
    if (require_final_period) {
      throw ParseError(ErrorKind::ClauseSyntaxError, "bulletin", {start, text.size()},
                       "sentence is not terminated by a period");
    }
    out.push_back({tail, start, text.size()});
  }
  return out;
}

[[noreturn]] void syntax_error(const std::string& attribute, const Sentence& s, const std::string& what) {
  throw ParseError(ErrorKind::ClauseSyntaxError, attribute, {s.begin, s.end}, what);
}

// -- clause rendering --------------------------------------------------------

std::string with_timing(std::string body, const std::optional<Timing>& timing) {
  if (!timing) {
    return body;
  }
  switch (*timing) {
    case Timing::Becoming:
    case Timing::Occasionally: return std::string(to_string(*timing)) + " " + body;
    case Timing::AtFirst:
    case Timing::Later:
    case Timing::Soon: return body + " " + std::string(to_string(*timing));
  }
  return body;
}

std::string force_text(const WindClause& c) {
  if (c.force_low == c.force_high) {
    return std::to_string(c.force_low);
  }
  return std::to_string(c.force_low) + " to " + std::to_string(c.force_high);
}

// -- clause parsing ----------------------------------------------------------

/// Removes a leading or trailing timing phrase from `words`.
std::optional<Timing> take_timing(std::vector<std::string>& words) {
  if (words.empty()) {
    return std::nullopt;
  }
  if (words.front() == "becoming" || words.front() == "occasionally") {
    const auto t = parse_timing(words.front());
    words.erase(words.begin());
    return t;
  }
  if (words.size() >= 2 && words[words.size() - 2] == "at" && words.back() == "first") {
    words.resize(words.size() - 2);
    return Timing::AtFirst;
  }
  if (words.back() == "later" || words.back() == "soon") {
    const auto t = parse_timing(words.back());
    words.pop_back();
    return t;
  }
  return std::nullopt;
}

int parse_force(const std::string& token, const Sentence& s) {
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const bool negative = !token.empty() && token.front() == '-';
  if (negative) {
    ++first;
  }
  if (first == last || !std::all_of(first, last, [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    syntax_error("wind", s, "expected a Beaufort force, found '" + token + "'");
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || negative || value > kMaxBeaufort) {
    throw ParseError(ErrorKind::ValueOutOfRange, "wind", {s.begin, s.end},
                     "force '" + token + "' outside 0-12");
  }
  return value;
}

WindClause parse_wind_clause(const std::string& clause, const Sentence& s) {
  auto words = split_words(lower(clause));
  WindClause c;
  c.timing = take_timing(words);
  if (words.size() != 2 && words.size() != 4) {
    syntax_error("wind", s, "expected '<direction> <force> [to <force>]' in '" + clause + "'");
  }
  const auto dir = parse_compass(words[0]);
  if (!dir) {
    syntax_error("wind", s, "unknown wind direction '" + words[0] + "'");
  }
  c.direction = *dir;
  c.force_low = parse_force(words[1], s);
  c.force_high = c.force_low;
  if (words.size() == 4) {
    if (words[2] != "to") {
      syntax_error("wind", s, "expected 'to' in force range, found '" + words[2] + "'");
    }
    c.force_high = parse_force(words[3], s);
  }
  return c;
}

template <typename IsLabel>
StateClause parse_state_clause(const std::string& clause, const Sentence& s, const std::string& attribute,
                               IsLabel is_label) {
  auto words = split_words(lower(clause));
  StateClause c;
  c.timing = take_timing(words);
  const std::string body = join(words, " ");
  std::vector<std::string> labels;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = body.find(" or ", start);
    labels.push_back(body.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) {
      break;
    }
    start = at + 4;
  }
  if (labels.size() > 2) {
    syntax_error(attribute, s, "at most two labels may form a range in '" + clause + "'");
  }
  for (const auto& l : labels) {
    if (!is_label(l)) {
      syntax_error(attribute, s, "unknown " + attribute + " label '" + l + "'");
    }
  }
  c.label = labels[0];
  if (labels.size() == 2) {
    c.label_high = labels[1];
  }
  return c;
}

WeatherClause parse_weather_clause(const std::string& clause, const Sentence& s) {
  auto words = split_words(lower(clause));
  WeatherClause c;
  c.timing = take_timing(words);
  if (words.empty()) {
    syntax_error("weather", s, "empty weather clause");
  }
  c.phrase = join(words, " ");
  return c;
}

GaleWarning parse_gale_sentence(const Sentence& s) {
  auto words = split_words(lower(s.text));
  if (words.size() < 4 || words[0] != "warning" || words[1] != "of") {
    syntax_error("gale", s, "expected 'Warning of <severity> <timing>'");
  }
  GaleWarning g;
  const std::string& timing = words.back();
  if (timing == "imminent") {
    g.timing = GaleTiming::Imminent;
  } else if (timing == "soon") {
    g.timing = GaleTiming::Soon;
  } else if (timing == "later") {
    g.timing = GaleTiming::Later;
  } else {
    syntax_error("gale", s, "unknown warning timing '" + timing + "'");
  }
  const std::string severity = join(std::vector<std::string>(words.begin() + 2, words.end() - 1), " ");
  for (int f = 8; f <= kMaxBeaufort; ++f) {
    if (to_string(static_cast<GaleSeverity>(f)) == severity) {
      g.severity = static_cast<GaleSeverity>(f);
      return g;
    }
  }
  syntax_error("gale", s, "unknown warning severity '" + severity + "'");
}

bool is_gale_sentence(const Sentence& s) { return lower(s.text).starts_with("warning of"); }

std::vector<std::string> match_area_list(const std::string& sentence, const AreaRegistry& registry) {
  std::vector<std::string> names;
  for (const auto& item : split_list(sentence, ',')) {
    const auto* area = registry.find(normalize_spaces(item));
    if (area == nullptr) {
      return {};
    }
    names.push_back(area->name);
  }
  return names;
}

bool weather_word_ok(const std::string& w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; });
}

std::optional<Timing> timing_from_json(const json& j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  const auto t = parse_timing(j.get<std::string>());
  if (!t) {
    throw Error(ErrorKind::ClauseSyntaxError, "unknown timing '" + j.get<std::string>() + "'");
  }
  return t;
}

json timing_to_json(const std::optional<Timing>& t) { return t ? json(std::string(to_string(*t))) : json(nullptr); }

json state_to_json(const StateClause& c) {
  return {{"label", c.label},
          {"label_high", c.label_high ? json(*c.label_high) : json(nullptr)},
          {"timing", timing_to_json(c.timing)}};
}

StateClause state_from_json(const json& j) {
  StateClause c;
  c.label = j.at("label").get<std::string>();
  if (j.contains("label_high") && !j.at("label_high").is_null()) {
    c.label_high = j.at("label_high").get<std::string>();
  }
  c.timing = timing_from_json(j.value("timing", json(nullptr)));
  return c;
}

}  // namespace

std::string_view to_string(Timing t) {
  switch (t) {
    case Timing::AtFirst: return "at first";
    case Timing::Later: return "later";
    case Timing::Soon: return "soon";
    case Timing::Occasionally: return "occasionally";
    case Timing::Becoming: return "becoming";
  }
  return "?";
}

std::optional<Timing> parse_timing(std::string_view text) {
  for (auto t : {Timing::AtFirst, Timing::Later, Timing::Soon, Timing::Occasionally, Timing::Becoming}) {
    if (to_string(t) == text) {
      return t;
    }
  }
  return std::nullopt;
}

std::string_view to_string(GaleSeverity s) {
  switch (s) {
    case GaleSeverity::Gale: return "gale";
    case GaleSeverity::SevereGale: return "severe gale";
    case GaleSeverity::Storm: return "storm";
    case GaleSeverity::ViolentStorm: return "violent storm";
    case GaleSeverity::HurricaneForce: return "hurricane force";
  }
  return "?";
}

std::string_view to_string(GaleTiming t) {
  switch (t) {
    case GaleTiming::Imminent: return "imminent";
    case GaleTiming::Soon: return "soon";
    case GaleTiming::Later: return "later";
  }
  return "?";
}

GaleSeverity severity_for_force(int force) {
  if (force < 8 || force > kMaxBeaufort) {
    throw Error(ErrorKind::ValueOutOfRange, "no gale severity for force " + std::to_string(force));
  }
  return static_cast<GaleSeverity>(force);
}

std::string_view to_string(RuleViolation v) {
  switch (v) {
    case RuleViolation::EmptyAreas: return "EmptyAreas";
    case RuleViolation::UnknownArea: return "UnknownArea";
    case RuleViolation::AreaOrder: return "AreaOrder";
    case RuleViolation::EmptyWind: return "EmptyWind";
    case RuleViolation::EmptySeaState: return "EmptySeaState";
    case RuleViolation::EmptyVisibility: return "EmptyVisibility";
    case RuleViolation::ForceOutOfRange: return "ForceOutOfRange";
    case RuleViolation::ForceRangeInverted: return "ForceRangeInverted";
    case RuleViolation::ForceSpanTooWide: return "ForceSpanTooWide";
    case RuleViolation::UnknownSeaStateLabel: return "UnknownSeaStateLabel";
    case RuleViolation::UnknownVisibilityLabel: return "UnknownVisibilityLabel";
    case RuleViolation::LabelRangeInvalid: return "LabelRangeInvalid";
    case RuleViolation::WeatherTooLong: return "WeatherTooLong";
    case RuleViolation::WeatherPhraseInvalid: return "WeatherPhraseInvalid";
    case RuleViolation::FairNotOmitted: return "FairNotOmitted";
    case RuleViolation::MissingGaleWarning: return "MissingGaleWarning";
    case RuleViolation::UnexpectedGaleWarning: return "UnexpectedGaleWarning";
    case RuleViolation::GaleSeverityMismatch: return "GaleSeverityMismatch";
  }
  return "?";
}

std::vector<Violation> validate(const Bulletin& b, const AreaRegistry* registry) {
  std::vector<Violation> out;
  auto flag = [&out](RuleViolation r, std::string detail) { out.push_back({r, std::move(detail)}); };

  if (b.areas.empty()) {
    flag(RuleViolation::EmptyAreas, "bulletin names no sea area");
  }
  if (registry != nullptr) {
    int previous = 0;
    bool first = true;
    for (const auto& name : b.areas) {
      const auto* area = registry->find(name);
      if (area == nullptr) {
        flag(RuleViolation::UnknownArea, name);
        continue;
      }
      if (!first && area->order_index <= previous) {
        flag(RuleViolation::AreaOrder, name + " is out of canonical order");
      }
      previous = area->order_index;
      first = false;
    }
  }

  if (b.wind.empty()) {
    flag(RuleViolation::EmptyWind, "no wind clause");
  }
  int max_force = -1;
  for (const auto& w : b.wind) {
    const std::string text = force_text(w);
    if (w.force_low < 0 || w.force_low > kMaxBeaufort || w.force_high < 0 || w.force_high > kMaxBeaufort) {
      flag(RuleViolation::ForceOutOfRange, text);
      continue;
    }
    if (w.force_low > w.force_high) {
      flag(RuleViolation::ForceRangeInverted, text);
    } else if (w.force_high - w.force_low > kMaxForceSpan) {
      flag(RuleViolation::ForceSpanTooWide, text);
    }
    max_force = std::max(max_force, w.force_high);
  }

  auto check_states = [&](const std::vector<StateClause>& clauses, RuleViolation empty, RuleViolation unknown,
                          auto parse) {
    if (clauses.empty()) {
      flag(empty, "no clause");
    }
    for (const auto& c : clauses) {
      const auto lo = parse(c.label);
      if (!lo) {
        flag(unknown, c.label);
        continue;
      }
      if (c.label_high) {
        const auto hi = parse(*c.label_high);
        if (!hi) {
          flag(unknown, *c.label_high);
          continue;
        }
        const int step = static_cast<int>(*hi) - static_cast<int>(*lo);
        if (step < 1 || step > 2) {
          flag(RuleViolation::LabelRangeInvalid, c.label + " or " + *c.label_high);
        }
      }
    }
  };
  check_states(b.sea_state, RuleViolation::EmptySeaState, RuleViolation::UnknownSeaStateLabel, parse_sea_state);
  check_states(b.visibility, RuleViolation::EmptyVisibility, RuleViolation::UnknownVisibilityLabel,
               parse_visibility);

  for (const auto& w : b.weather) {
    const auto words = split_words(w.phrase);
    if (words.size() > kMaxWeatherWords) {
      flag(RuleViolation::WeatherTooLong, w.phrase);
    }
    const bool bad_word = std::any_of(words.begin(), words.end(), [](const auto& x) { return !weather_word_ok(x); });
    const bool timing_edge =
        !words.empty() && (words.front() == "becoming" || words.front() == "occasionally" ||
                           words.back() == "later" || words.back() == "soon" ||
                           (words.size() >= 2 && words[words.size() - 2] == "at" && words.back() == "first"));
    if (words.empty() || bad_word || timing_edge || w.phrase != join(words, " ")) {
      flag(RuleViolation::WeatherPhraseInvalid, w.phrase);
    }
  }
  if (b.weather.size() == 1 && b.weather[0].phrase == "fair" && !b.weather[0].timing) {
    flag(RuleViolation::FairNotOmitted, "fair weather is expressed by omitting the clause");
  }

  if (max_force >= 8 && !b.gale) {
    flag(RuleViolation::MissingGaleWarning, "force " + std::to_string(max_force) + " without a warning");
  }
  if (b.gale && max_force < 8) {
    flag(RuleViolation::UnexpectedGaleWarning, "warning without a force 8+ clause");
  }
  if (b.gale && max_force >= 8 && force_of(b.gale->severity) != max_force) {
    flag(RuleViolation::GaleSeverityMismatch, std::string(to_string(b.gale->severity)) + " vs peak force " +
                                                  std::to_string(max_force));
  }
  return out;
}

std::string render_area_list(const Bulletin& b) { return join(b.areas, ", ") + "."; }

std::string render_gale(const GaleWarning& g) {
  return "Warning of " + std::string(to_string(g.severity)) + " " + std::string(to_string(g.timing)) + ".";
}

std::string render_wind(const std::vector<WindClause>& clauses) {
  std::vector<std::string> parts;
  for (const auto& c : clauses) {
    parts.push_back(with_timing(std::string(to_string(c.direction)) + " " + force_text(c), c.timing));
  }
  return sentence_case(join(parts, ", ")) + ".";
}

std::string render_states(const std::vector<StateClause>& clauses) {
  std::vector<std::string> parts;
  for (const auto& c : clauses) {
    parts.push_back(with_timing(c.label_high ? c.label + " or " + *c.label_high : c.label, c.timing));
  }
  return sentence_case(join(parts, ", ")) + ".";
}

std::string render_weather(const std::vector<WeatherClause>& clauses) {
  if (clauses.empty()) {
    return "Fair.";
  }
  std::vector<std::string> parts;
  for (const auto& c : clauses) {
    parts.push_back(with_timing(c.phrase, c.timing));
  }
  return sentence_case(join(parts, ", ")) + ".";
}

std::string render_body(const Bulletin& b) {
  std::string out;
  if (b.gale) {
    out += render_gale(*b.gale) + " ";
  }
  out += render_wind(b.wind) + " " + render_states(b.sea_state) + " " + render_weather(b.weather) + " " +
         render_states(b.visibility);
  return out;
}

std::string render_bulletin(const Bulletin& b, const AreaRegistry* registry) {
  const auto violations = validate(b, registry);
  if (!violations.empty()) {
    std::string msg = "bulletin breaks " + std::to_string(violations.size()) + " rule(s):";
    for (const auto& v : violations) {
      msg += " " + std::string(to_string(v.rule)) + " (" + v.detail + ")";
    }
    throw Error(ErrorKind::ValidationFailed, msg);
  }
  return render_area_list(b) + " " + render_body(b);
}

Bulletin parse_bulletin(std::string_view text, const AreaRegistry& registry) {
  const auto sentences = split_sentences(text, true);
  if (sentences.empty()) {
    throw ParseError(ErrorKind::ClauseSyntaxError, "bulletin", {0, text.size()}, "empty bulletin");
  }
  for (const auto& s : sentences) {
    if (s.text.empty()) {
      syntax_error("bulletin", s, "empty sentence");
    }
  }

  Bulletin b;
  const Sentence& head = sentences[0];
  for (const auto& item : split_list(head.text, ',')) {
    const std::string name = normalize_spaces(item);
    if (name.empty()) {
      syntax_error("areas", head, "empty area name");
    }
    const auto* area = registry.find(name);
    if (area == nullptr) {
      throw ParseError(ErrorKind::UnknownArea, "areas", {head.begin, head.end}, "unknown sea area '" + name + "'");
    }
    b.areas.push_back(area->name);
  }

  std::size_t next = 1;
  if (next < sentences.size() && is_gale_sentence(sentences[next])) {
    b.gale = parse_gale_sentence(sentences[next]);
    ++next;
  }
  if (sentences.size() - next != 4) {
    throw ParseError(ErrorKind::ClauseSyntaxError, "bulletin", {0, text.size()},
                     "expected wind, sea state, weather and visibility sentences after the area list");
  }
  const Sentence& wind = sentences[next];
  const Sentence& sea = sentences[next + 1];
  const Sentence& weather = sentences[next + 2];
  const Sentence& vis = sentences[next + 3];

  for (const auto& clause : split_list(wind.text, ',')) {
    b.wind.push_back(parse_wind_clause(clause, wind));
  }
  for (const auto& clause : split_list(sea.text, ',')) {
    b.sea_state.push_back(parse_state_clause(clause, sea, "sea_state",
                                             [](const std::string& l) { return parse_sea_state(l).has_value(); }));
  }
  if (lower(normalize_spaces(weather.text)) != "fair") {
    for (const auto& clause : split_list(weather.text, ',')) {
      b.weather.push_back(parse_weather_clause(clause, weather));
    }
  }
  for (const auto& clause : split_list(vis.text, ',')) {
    b.visibility.push_back(parse_state_clause(
        clause, vis, "visibility", [](const std::string& l) { return parse_visibility(l).has_value(); }));
  }
  return b;
}

json to_json(const Bulletin& b) {
  json wind = json::array();
  for (const auto& w : b.wind) {
    wind.push_back({{"direction", std::string(to_string(w.direction))},
                    {"force_low", w.force_low},
                    {"force_high", w.force_high},
                    {"timing", timing_to_json(w.timing)}});
  }
  json sea = json::array();
  for (const auto& s : b.sea_state) {
    sea.push_back(state_to_json(s));
  }
  json weather = json::array();
  for (const auto& w : b.weather) {
    weather.push_back({{"phrase", w.phrase}, {"timing", timing_to_json(w.timing)}});
  }
  json vis = json::array();
  for (const auto& s : b.visibility) {
    vis.push_back(state_to_json(s));
  }
  json gale = nullptr;
  if (b.gale) {
    gale = {{"severity", std::string(to_string(b.gale->severity))},
            {"timing", std::string(to_string(b.gale->timing))}};
  }
  return {{"areas", b.areas}, {"gale", gale},          {"wind", wind},
          {"sea_state", sea}, {"weather", weather},    {"visibility", vis}};
}

Bulletin bulletin_from_json(const json& j) {
  Bulletin b;
  try {
    b.areas = j.at("areas").get<std::vector<std::string>>();
    for (const auto& w : j.at("wind")) {
      WindClause c;
      const auto dir = parse_compass(w.at("direction").get<std::string>());
      if (!dir) {
        throw Error(ErrorKind::ClauseSyntaxError, "unknown direction " + w.at("direction").dump());
      }
      c.direction = *dir;
      c.force_low = w.at("force_low").get<int>();
      c.force_high = w.at("force_high").get<int>();
      c.timing = timing_from_json(w.value("timing", json(nullptr)));
      b.wind.push_back(c);
    }
    for (const auto& s : j.at("sea_state")) {
      b.sea_state.push_back(state_from_json(s));
    }
    for (const auto& w : j.at("weather")) {
      b.weather.push_back({w.at("phrase").get<std::string>(), timing_from_json(w.value("timing", json(nullptr)))});
    }
    for (const auto& s : j.at("visibility")) {
      b.visibility.push_back(state_from_json(s));
    }
    if (j.contains("gale") && !j.at("gale").is_null()) {
      const auto& g = j.at("gale");
      const std::string sev = g.at("severity").get<std::string>();
      const std::string tim = g.at("timing").get<std::string>();
      const Sentence pseudo{"warning of " + sev + " " + tim, 0, 0};
      b.gale = parse_gale_sentence(pseudo);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ClauseSyntaxError, std::string("bulletin json: ") + e.what());
  }
  return b;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SystemKind k) { return k == SystemKind::Low ? "low" : "high"; }

std::string_view to_string(Tendency t) {
  switch (t) {
    case Tendency::Deepening: return "deepening";
    case Tendency::Filling: return "filling";
    case Tendency::Steady: return "steady";
  }
  return "?";
}

std::string_view to_string(MotionSpeed s) {
  switch (s) {
    case MotionSpeed::Slowly: return "slowly";
    case MotionSpeed::Steadily: return "steadily";
    case MotionSpeed::RatherQuickly: return "rather quickly";
    case MotionSpeed::Quickly: return "quickly";
    case MotionSpeed::VeryQuickly: return "very quickly";
  }
  return "?";
}

MotionSpeed motion_speed_for_knots(double knots) {
  if (knots < 15.0) {
    return MotionSpeed::Slowly;
  }
  if (knots < 25.0) {
    return MotionSpeed::Steadily;
  }
  if (knots < 35.0) {
    return MotionSpeed::RatherQuickly;
  }
  if (knots < 45.0) {
    return MotionSpeed::Quickly;
  }
  return MotionSpeed::VeryQuickly;
}

std::string render_synopsis(const Synopsis& s) {
  std::string out = "General synopsis.";
  if (s.systems.empty()) {
    return out + " Nothing significant.";
  }
  for (const auto& sys : s.systems) {
    std::string sentence = sentence_case(std::string(to_string(sys.kind))) + " " + sys.position + " " +
                           std::to_string(sys.pressure_hpa) + ", " + std::string(to_string(sys.tendency));
    if (sys.motion) {
      sentence += ", moving " + std::string(to_string(sys.motion->direction)) + " " +
                  std::string(to_string(sys.motion->speed));
    }
    out += " " + sentence + ".";
  }
  return out;
}

Synopsis parse_synopsis(std::string_view text) {
  const auto sentences = split_sentences(text, true);
  if (sentences.empty() || lower(normalize_spaces(sentences[0].text)) != "general synopsis") {
    throw ParseError(ErrorKind::ClauseSyntaxError, "synopsis", {0, text.size()},
                     "expected 'General synopsis.' heading");
  }
  Synopsis out;
  if (sentences.size() == 2 && lower(normalize_spaces(sentences[1].text)) == "nothing significant") {
    return out;
  }
  for (std::size_t k = 1; k < sentences.size(); ++k) {
    const Sentence& s = sentences[k];
    const auto parts = split_list(lower(s.text), ',');
    if (parts.size() < 2 || parts.size() > 3) {
      syntax_error("synopsis", s, "expected '<kind> <position> <hPa>, <tendency>[, moving ...]'");
    }
    const auto head = split_words(parts[0]);
    if (head.size() != 3 || (head[0] != "low" && head[0] != "high")) {
      syntax_error("synopsis", s, "bad system head '" + parts[0] + "'");
    }
    PressureSystem sys;
    sys.kind = head[0] == "low" ? SystemKind::Low : SystemKind::High;
    sys.position = head[1];
    std::transform(sys.position.begin(), sys.position.end(), sys.position.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    int hpa = 0;
    const auto [ptr, ec] = std::from_chars(head[2].data(), head[2].data() + head[2].size(), hpa);
    if (ec != std::errc() || ptr != head[2].data() + head[2].size()) {
      syntax_error("synopsis", s, "bad pressure '" + head[2] + "'");
    }
    if (hpa < 900 || hpa > 1070) {
      throw ParseError(ErrorKind::ValueOutOfRange, "synopsis", {s.begin, s.end}, "pressure outside 900-1070 hPa");
    }
    sys.pressure_hpa = hpa;
    bool tendency_ok = false;
    for (auto t : {Tendency::Deepening, Tendency::Filling, Tendency::Steady}) {
      if (to_string(t) == parts[1]) {
        sys.tendency = t;
        tendency_ok = true;
      }
    }
    if (!tendency_ok) {
      syntax_error("synopsis", s, "unknown tendency '" + parts[1] + "'");
    }
    if (parts.size() == 3) {
      auto words = split_words(parts[2]);
      if (words.size() < 3 || words[0] != "moving") {
        syntax_error("synopsis", s, "expected 'moving <direction> <speed>'");
      }
      const auto dir = parse_compass(words[1]);
      if (!dir) {
        syntax_error("synopsis", s, "unknown motion direction '" + words[1] + "'");
      }
      const std::string speed = join(std::vector<std::string>(words.begin() + 2, words.end()), " ");
      std::optional<MotionSpeed> ms;
      for (auto m : {MotionSpeed::Slowly, MotionSpeed::Steadily, MotionSpeed::RatherQuickly, MotionSpeed::Quickly,
                     MotionSpeed::VeryQuickly}) {
        if (to_string(m) == speed) {
          ms = m;
        }
      }
      if (!ms) {
        syntax_error("synopsis", s, "unknown motion speed '" + speed + "'");
      }
      sys.motion = Motion{*dir, *ms};
    }
    out.systems.push_back(std::move(sys));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FragmentKind k) {
  switch (k) {
    case FragmentKind::Synopsis: return "synopsis";
    case FragmentKind::Gale: return "gale";
    case FragmentKind::Wind: return "wind";
    case FragmentKind::SeaState: return "sea_state";
    case FragmentKind::Weather: return "weather";
    case FragmentKind::Visibility: return "visibility";
  }
  return "?";
}

std::optional<FragmentKind> parse_fragment_kind(std::string_view text) {
  for (auto k : {FragmentKind::Synopsis, FragmentKind::Gale, FragmentKind::Wind, FragmentKind::SeaState,
                 FragmentKind::Weather, FragmentKind::Visibility}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

std::vector<Fragment> segment_forecast(std::string_view full_text, const AreaRegistry& registry) {
  const auto sentences = split_sentences(full_text, false);
  std::vector<Fragment> out;
  auto original = [&](std::size_t first, std::size_t last) {
    return trim(full_text.substr(sentences[first].begin, sentences[last].end - sentences[first].begin));
  };

  std::size_t k = 0;
  while (k < sentences.size() && sentences[k].text.empty()) {
    ++k;
  }
  if (k < sentences.size() && lower(normalize_spaces(sentences[k].text)) == "general synopsis") {
    const std::size_t first = k;
    ++k;
    while (k < sentences.size() && match_area_list(sentences[k].text, registry).empty()) {
      ++k;
    }
    out.push_back({{}, FragmentKind::Synopsis, original(first, k - 1), false});
  }

  bool any_area = false;
  while (k < sentences.size()) {
    if (sentences[k].text.empty()) {
      ++k;
      continue;
    }
    const auto areas = match_area_list(sentences[k].text, registry);
    if (areas.empty()) {
      throw Error(ErrorKind::ForecastStructureError, "expected a sea-area heading, found '" + sentences[k].text + "'");
    }
    any_area = true;
    const bool excluded = areas.size() > 1;
    ++k;
    if (k < sentences.size() && is_gale_sentence(sentences[k])) {
      out.push_back({areas, FragmentKind::Gale, original(k, k), excluded});
      ++k;
    }
    for (auto kind : {FragmentKind::Wind, FragmentKind::SeaState, FragmentKind::Weather, FragmentKind::Visibility}) {
      if (k >= sentences.size() || sentences[k].text.empty() || !match_area_list(sentences[k].text, registry).empty()) {
        throw Error(ErrorKind::ForecastStructureError,
                    "bulletin for " + join(areas, ", ") + " lacks a " + std::string(to_string(kind)) + " sentence");
      }
      out.push_back({areas, kind, original(k, k), excluded});
      ++k;
    }
  }
  if (!any_area) {
    throw Error(ErrorKind::ForecastStructureError, "no sea-area headings found");
  }
  return out;
}

}  // namespace shipcast
