#include "shipcast/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shipcast/error.hpp"

namespace shipcast {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0)) {
    throw Error(ErrorKind::ValueOutOfRange, std::string(what) + " must be non-negative");
  }
}

template <std::size_t N>
std::size_t count_lower_bounds_reached(const std::array<double, N>& lowers, double v) {
  return static_cast<std::size_t>(std::upper_bound(lowers.begin(), lowers.end(), v) - lowers.begin());
}

// Kelly's colours of maximum contrast, minus the grey and near-black entries.
constexpr std::array<Rgb, 20> kDistinct{{
    {0xF3, 0xC3, 0x00}, {0x87, 0x56, 0x92}, {0xF3, 0x84, 0x00}, {0xA1, 0xCA, 0xF1}, {0xBE, 0x00, 0x32},
    {0xC2, 0xB2, 0x80}, {0x00, 0x88, 0x56}, {0xE6, 0x8F, 0xAC}, {0x00, 0x67, 0xA5}, {0xF9, 0x93, 0x79},
    {0x60, 0x4E, 0x97}, {0xF6, 0xA6, 0x00}, {0xB3, 0x44, 0x6C}, {0xDC, 0xD3, 0x00}, {0x88, 0x2D, 0x17},
    {0x8D, 0xB6, 0x00}, {0x65, 0x45, 0x22}, {0xE2, 0x58, 0x22}, {0x2B, 0x3D, 0x26}, {0xF2, 0xF3, 0xF4},
}};

// Viridis at five evenly spaced stops.
constexpr std::array<Rgb, 5> kRamp{{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
}};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<ScaleBin> ramp_bins(double lo, double hi) {
  std::vector<ScaleBin> bins;
  const std::size_t stops = kRamp.size();
  for (std::size_t k = 0; k < stops; ++k) {
    const double lower = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(stops - 1);
    const double upper =
        k + 1 < stops ? lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(stops - 1) : kInf;
    bins.push_back({lower, upper, format_number(lower), kRamp[k]});
  }
  return bins;
}

std::vector<ScaleBin> categorical_bins(const std::vector<double>& interior_bounds,
                                       const std::vector<std::string>& labels, double first_lower) {
  std::vector<ScaleBin> bins;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double lower = k == 0 ? first_lower : interior_bounds[k - 1];
    const double upper = k < interior_bounds.size() ? interior_bounds[k] : kInf;
    bins.push_back({lower, upper, labels[k], kDistinct[k % kDistinct.size()]});
  }
  return bins;
}

double json_bound(const json& j, double if_null) { return j.is_null() ? if_null : j.get<double>(); }

json bound_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

std::uint8_t lerp_channel(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
}

}  // namespace

int classify_beaufort(double speed_knots) {
  require_non_negative(speed_knots, "wind speed");
  return static_cast<int>(count_lower_bounds_reached(kBeaufortLowerKnots, speed_knots));
}

SeaState classify_douglas(double height_metres) {
  require_non_negative(height_metres, "wave height");
  return static_cast<SeaState>(count_lower_bounds_reached(kDouglasLowerMetres, height_metres));
}

VisibilityCategory classify_visibility(double visibility_metres) {
  require_non_negative(visibility_metres, "visibility");
  return static_cast<VisibilityCategory>(count_lower_bounds_reached(kVisibilityLowerMetres, visibility_metres));
}

Compass8 compass_8(double direction_degrees) {
  if (!(direction_degrees >= 0.0 && direction_degrees <= 360.0)) {
    throw Error(ErrorKind::ValueOutOfRange, "direction must lie in [0, 360]");
  }
  // Sector edges 22.5 + 45k are exact doubles; compare against them directly.
  int sector = 0;
  while (sector < 8 && direction_degrees >= 22.5 + 45.0 * sector) {
    ++sector;
  }
  return static_cast<Compass8>(sector % 8);
}

std::string_view to_string(SeaState s) {
  switch (s) {
    case SeaState::Smooth: return "smooth";
    case SeaState::Slight: return "slight";
    case SeaState::Moderate: return "moderate";
    case SeaState::Rough: return "rough";
    case SeaState::VeryRough: return "very rough";
    case SeaState::High: return "high";
    case SeaState::VeryHigh: return "very high";
    case SeaState::Phenomenal: return "phenomenal";
  }
  return "?";
}

std::string_view to_string(VisibilityCategory v) {
  switch (v) {
    case VisibilityCategory::Fog: return "fog";
    case VisibilityCategory::Poor: return "poor";
    case VisibilityCategory::Moderate: return "moderate";
    case VisibilityCategory::Good: return "good";
  }
  return "?";
}

std::string_view to_string(Compass8 c) {
  switch (c) {
    case Compass8::N: return "northerly";
    case Compass8::NE: return "northeasterly";
    case Compass8::E: return "easterly";
    case Compass8::SE: return "southeasterly";
    case Compass8::S: return "southerly";
    case Compass8::SW: return "southwesterly";
    case Compass8::W: return "westerly";
    case Compass8::NW: return "northwesterly";
  }
  return "?";
}

std::optional<SeaState> parse_sea_state(std::string_view label) {
  for (std::size_t k = 0; k < kSeaStateCount; ++k) {
    if (to_string(static_cast<SeaState>(k)) == label) {
      return static_cast<SeaState>(k);
    }
  }
  return std::nullopt;
}

std::optional<VisibilityCategory> parse_visibility(std::string_view label) {
  for (int k = 0; k < 4; ++k) {
    if (to_string(static_cast<VisibilityCategory>(k)) == label) {
      return static_cast<VisibilityCategory>(k);
    }
  }
  return std::nullopt;
}

std::optional<Compass8> parse_compass(std::string_view label) {
  for (int k = 0; k < 8; ++k) {
    if (to_string(static_cast<Compass8>(k)) == label) {
      return static_cast<Compass8>(k);
    }
  }
  return std::nullopt;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) {
      ++n;
    }
    in_word = !space;
  }
  return n;
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb parse_hex(std::string_view text) {
  unsigned r = 0;
  unsigned g = 0;
  unsigned b = 0;
  const std::string s(text);
  if (s.size() != 7 || std::sscanf(s.c_str(), "#%2x%2x%2x", &r, &g, &b) != 3) {
    throw Error(ErrorKind::ScaleInvalid, "bad colour '" + s + "'");
  }
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

std::string_view to_string(ScaleMode m) { return m == ScaleMode::Categorical ? "categorical" : "continuous"; }

ScaleMode parse_scale_mode(std::string_view text) {
  if (text == "categorical") {
    return ScaleMode::Categorical;
  }
  if (text == "continuous") {
    return ScaleMode::Continuous;
  }
  throw Error(ErrorKind::ConfigInvalid, "mode must be categorical or continuous, got '" + std::string(text) + "'");
}

CategoricalScale::CategoricalScale(Variable attribute, ScaleMode mode, std::vector<ScaleBin> bins,
                                   std::optional<double> circular_offset)
    : attribute_(attribute), mode_(mode), bins_(std::move(bins)), circular_offset_(circular_offset) {
  const std::string name(to_string(attribute_));
  if (bins_.empty()) {
    throw Error(ErrorKind::ScaleInvalid, name + ": scale has no bins");
  }
  std::set<std::string> labels;
  for (std::size_t k = 0; k < bins_.size(); ++k) {
    const auto& b = bins_[k];
    if (!(b.lower < b.upper)) {
      throw Error(ErrorKind::ScaleInvalid, name + ": bounds not strictly ascending at bin " + b.label);
    }
    if (k > 0 && bins_[k - 1].upper != b.lower) {
      throw Error(ErrorKind::ScaleInvalid, name + ": bins not contiguous at " + b.label);
    }
    if (std::isinf(b.lower) && k != 0) {
      throw Error(ErrorKind::ScaleInvalid, name + ": only the first lower bound may be infinite");
    }
    if (std::isinf(b.upper) && k + 1 != bins_.size()) {
      throw Error(ErrorKind::ScaleInvalid, name + ": only the last upper bound may be infinite");
    }
    if (!labels.insert(b.label).second) {
      throw Error(ErrorKind::ScaleInvalid, name + ": duplicate label " + b.label);
    }
    if (b.color == kBackground || b.color == kOverlayInk) {
      throw Error(ErrorKind::ScaleInvalid, name + ": palette uses a reserved colour");
    }
  }
  if (mode_ == ScaleMode::Continuous && std::isinf(bins_.front().lower)) {
    throw Error(ErrorKind::ScaleInvalid, name + ": a continuous ramp needs a finite start");
  }
}

std::size_t CategoricalScale::index_of(double value) const {
  if (std::isnan(value)) {
    throw Error(ErrorKind::ValueOutOfRange, std::string(to_string(attribute_)) + ": NaN has no category");
  }
  double v = value;
  double shift = 0.0;
  if (circular_offset_) {
    if (value < 0.0 || value > 360.0) {
      throw Error(ErrorKind::ValueOutOfRange, "direction must lie in [0, 360]");
    }
    // Shift the edges rather than the value so that no rounding crosses an edge.
    shift = *circular_offset_;
    if (v >= 360.0 - shift) {
      v -= 360.0;
    }
  }
  if (v < bins_.front().lower - shift || v >= bins_.back().upper - shift) {
    throw Error(ErrorKind::ValueOutOfRange,
                std::string(to_string(attribute_)) + ": value " + format_number(value) + " outside scale");
  }
  const auto it = std::upper_bound(bins_.begin(), bins_.end(), v,
                                   [shift](double x, const ScaleBin& b) { return x < b.lower - shift; });
  return static_cast<std::size_t>(it - bins_.begin()) - 1;
}

Rgb CategoricalScale::color_of(double value) const {
  if (mode_ == ScaleMode::Categorical) {
    return bins_[index_of(value)].color;
  }
  const double lo = bins_.front().lower;
  if (value <= lo) {
    return bins_.front().color;
  }
  const auto it = std::upper_bound(bins_.begin(), bins_.end(), value,
                                   [](double x, const ScaleBin& b) { return x < b.lower; });
  const std::size_t k = static_cast<std::size_t>(it - bins_.begin()) - 1;
  if (k + 1 >= bins_.size()) {
    return bins_.back().color;
  }
  const auto& b = bins_[k];
  const double t = (value - b.lower) / (b.upper - b.lower);
  const Rgb a = b.color;
  const Rgb c = bins_[k + 1].color;
  return {lerp_channel(a.r, c.r, t), lerp_channel(a.g, c.g, t), lerp_channel(a.b, c.b, t)};
}

std::vector<Rgb> CategoricalScale::palette() const {
  std::vector<Rgb> out;
  out.reserve(bins_.size());
  for (const auto& b : bins_) {
    out.push_back(b.color);
  }
  return out;
}

std::optional<std::size_t> CategoricalScale::index_of_label(std::string_view label) const {
  for (std::size_t k = 0; k < bins_.size(); ++k) {
    if (bins_[k].label == label) {
      return k;
    }
  }
  return std::nullopt;
}

WeatherCodeMap::WeatherCodeMap(std::vector<std::string> phrases, std::map<int, std::string> codes)
    : phrases_(std::move(phrases)), codes_(std::move(codes)) {
  std::set<std::string> seen;
  for (const auto& p : phrases_) {
    const std::size_t words = count_words(p);
    if (words == 0 || words > kMaxWeatherWords) {
      throw Error(ErrorKind::ConfigInvalid, "weather phrase '" + p + "' must have 1 to 5 words");
    }
    if (!seen.insert(p).second) {
      throw Error(ErrorKind::ConfigInvalid, "duplicate weather phrase '" + p + "'");
    }
  }
  for (const auto& [code, phrase] : codes_) {
    if (!seen.contains(phrase)) {
      throw Error(ErrorKind::ConfigInvalid,
                  "code " + std::to_string(code) + " maps to unlisted phrase '" + phrase + "'");
    }
  }
  if (codes_.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "weather code map is empty");
  }
}

WeatherCodeMap WeatherCodeMap::from_json_text(std::string_view text) {
  try {
    const json j = json::parse(text);
    auto phrases = j.at("phrases").get<std::vector<std::string>>();
    std::map<int, std::string> codes;
    for (const auto& e : j.at("codes")) {
      const int code = e.at("code").get<int>();
      if (!codes.emplace(code, e.at("phrase").get<std::string>()).second) {
        throw Error(ErrorKind::ConfigInvalid, "duplicate weather code " + std::to_string(code));
      }
    }
    return WeatherCodeMap(std::move(phrases), std::move(codes));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("weather_codes.json: ") + e.what());
  }
}

WeatherCodeMap WeatherCodeMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

const std::string& WeatherCodeMap::phrase(int code) const {
  const auto it = codes_.find(code);
  if (it == codes_.end()) {
    throw Error(ErrorKind::UnknownWeatherCode, "weather code " + std::to_string(code) + " is not mapped");
  }
  return it->second;
}

std::size_t WeatherCodeMap::phrase_index(int code) const {
  const auto& p = phrase(code);
  return static_cast<std::size_t>(std::find(phrases_.begin(), phrases_.end(), p) - phrases_.begin());
}

CategoricalScale WeatherCodeMap::scale(ScaleMode mode) const {
  if (mode == ScaleMode::Continuous) {
    const double lo = static_cast<double>(codes_.begin()->first);
    double hi = static_cast<double>(codes_.rbegin()->first);
    if (hi <= lo) {
      hi = lo + 1.0;
    }
    return CategoricalScale(Variable::WeatherCode, mode, ramp_bins(lo, hi));
  }
  std::vector<ScaleBin> bins;
  for (std::size_t k = 0; k < phrases_.size(); ++k) {
    if (k >= kDistinct.size()) {
      throw Error(ErrorKind::ScaleInvalid, "more weather phrases than distinct palette colours");
    }
    bins.push_back({static_cast<double>(k), static_cast<double>(k + 1), phrases_[k], kDistinct[k]});
  }
  return CategoricalScale(Variable::WeatherCode, mode, std::move(bins));
}

GridField WeatherCodeMap::to_phrase_indices(const GridField& codes) const {
  GridField out = codes;
  for (double& v : out.values) {
    if (!std::isnan(v)) {
      v = static_cast<double>(phrase_index(static_cast<int>(std::lround(v))));
    }
  }
  return out;
}

const std::string& classify_weather(int code, const WeatherCodeMap& map) { return map.phrase(code); }

std::vector<CategoricalScale> builtin_numeric_scales() {
  std::vector<CategoricalScale> out;

  std::vector<std::string> forces;
  for (int f = 0; f <= kMaxBeaufort; ++f) {
    forces.push_back(std::to_string(f));
  }
  out.emplace_back(Variable::WindSpeed, ScaleMode::Categorical,
                   categorical_bins({kBeaufortLowerKnots.begin(), kBeaufortLowerKnots.end()}, forces, 0.0));

  std::vector<ScaleBin> compass;
  for (int k = 0; k < 8; ++k) {
    compass.push_back({45.0 * k, 45.0 * (k + 1), std::string(to_string(static_cast<Compass8>(k))),
                       kDistinct[static_cast<std::size_t>(k)]});
  }
  out.emplace_back(Variable::WindDirection, ScaleMode::Categorical, std::move(compass), 22.5);

  std::vector<std::string> states;
  for (std::size_t k = 0; k < kSeaStateCount; ++k) {
    states.emplace_back(to_string(static_cast<SeaState>(k)));
  }
  out.emplace_back(Variable::WaveHeight, ScaleMode::Categorical,
                   categorical_bins({kDouglasLowerMetres.begin(), kDouglasLowerMetres.end()}, states, 0.0));

  out.emplace_back(Variable::Visibility, ScaleMode::Categorical,
                   categorical_bins({kVisibilityLowerMetres.begin(), kVisibilityLowerMetres.end()},
                                    {"fog", "poor", "moderate", "good"}, 0.0));

  // 4 hPa isobar spacing; open-ended bins either side of 944 and 1048 hPa.
  std::vector<ScaleBin> pressure;
  constexpr int kFirst = 944;
  constexpr int kLast = 1048;
  constexpr int kStep = 4;
  constexpr int kBins = (kLast - kFirst) / kStep + 2;
  for (int k = 0; k < kBins; ++k) {
    const double lower = k == 0 ? -kInf : kFirst + kStep * (k - 1);
    const double upper = k == kBins - 1 ? kInf : kFirst + kStep * k;
    std::string label = k == 0 ? "<" + std::to_string(kFirst)
                               : (k == kBins - 1 ? ">=" + std::to_string(kLast)
                                                 : std::to_string(kFirst + kStep * (k - 1)));
    const double t = static_cast<double>(k) / (kBins - 1);
    const Rgb color{static_cast<std::uint8_t>(std::lround(20 + 215 * t)),
                    static_cast<std::uint8_t>(std::lround(30 + 215 * t)),
                    static_cast<std::uint8_t>(std::lround(90 + 165 * t))};
    pressure.push_back({lower, upper, std::move(label), color});
  }
  out.emplace_back(Variable::Pressure, ScaleMode::Categorical, std::move(pressure));

  out.emplace_back(Variable::WindSpeed, ScaleMode::Continuous, ramp_bins(0.0, 70.0));
  out.emplace_back(Variable::WindDirection, ScaleMode::Continuous, ramp_bins(0.0, 360.0));
  out.emplace_back(Variable::WaveHeight, ScaleMode::Continuous, ramp_bins(0.0, 15.0));
  out.emplace_back(Variable::Visibility, ScaleMode::Continuous, ramp_bins(0.0, 20000.0));
  out.emplace_back(Variable::Pressure, ScaleMode::Continuous, ramp_bins(940.0, 1050.0));
  return out;
}

std::string scales_to_json(const std::vector<CategoricalScale>& scales) {
  json list = json::array();
  for (const auto& s : scales) {
    json bins = json::array();
    for (const auto& b : s.bins()) {
      bins.push_back({{"lower", bound_json(b.lower)},
                      {"upper", bound_json(b.upper)},
                      {"label", b.label},
                      {"color", to_hex(b.color)}});
    }
    json item{{"attribute", std::string(to_string(s.attribute()))},
              {"mode", std::string(to_string(s.mode()))},
              {"circular_offset", s.circular_offset() ? json(*s.circular_offset()) : json(nullptr)},
              {"bins", bins}};
    list.push_back(std::move(item));
  }
  return json{{"scales", list}}.dump(2) + "\n";
}

std::vector<CategoricalScale> scales_from_json(std::string_view text) {
  std::vector<CategoricalScale> out;
  try {
    const json j = json::parse(text);
    for (const auto& item : j.at("scales")) {
      std::vector<ScaleBin> bins;
      for (const auto& b : item.at("bins")) {
        bins.push_back({json_bound(b.at("lower"), -kInf), json_bound(b.at("upper"), kInf),
                        b.at("label").get<std::string>(), parse_hex(b.at("color").get<std::string>())});
      }
      std::optional<double> offset;
      if (item.contains("circular_offset") && !item.at("circular_offset").is_null()) {
        offset = item.at("circular_offset").get<double>();
      }
      out.emplace_back(parse_variable(item.at("attribute").get<std::string>()),
                       parse_scale_mode(item.at("mode").get<std::string>()), std::move(bins), offset);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ScaleInvalid, std::string("scales.json: ") + e.what());
  }
  return out;
}

ScaleSet::ScaleSet(std::vector<CategoricalScale> numeric, WeatherCodeMap weather)
    : numeric_(std::move(numeric)), weather_(std::move(weather)) {}

ScaleSet ScaleSet::builtin(WeatherCodeMap weather) { return ScaleSet(builtin_numeric_scales(), std::move(weather)); }

ScaleSet ScaleSet::load(const std::filesystem::path& scales_json, WeatherCodeMap weather) {
  std::ifstream in(scales_json);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + scales_json.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ScaleSet(scales_from_json(ss.str()), std::move(weather));
}

CategoricalScale ScaleSet::scale_for(Variable attribute, ScaleMode mode) const {
  if (attribute == Variable::WeatherCode) {
    return weather_.scale(mode);
  }
  for (const auto& s : numeric_) {
    if (s.attribute() == attribute && s.mode() == mode) {
      return s;
    }
  }
  throw Error(ErrorKind::UnknownAttribute,
              "no " + std::string(to_string(mode)) + " scale for " + std::string(to_string(attribute)));
}

}  // namespace shipcast
