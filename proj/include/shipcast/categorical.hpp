#pragma once

// Shipping Forecast vocabularies: Beaufort force, Douglas sea state,
// visibility categories, 8-point compass, weather phrases, and the colour
// scales used when rendering frames.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shipcast/grid.hpp"

namespace shipcast {

/// Highest force on the Beaufort scale.
inline constexpr int kMaxBeaufort = 12;
/// Lower bound (knots) of forces 1..12. Force 0 is [0, 1).
inline constexpr std::array<double, 12> kBeaufortLowerKnots{1, 4, 7, 11, 17, 22, 28, 34, 41, 48, 56, 64};

enum class SeaState { Smooth, Slight, Moderate, Rough, VeryRough, High, VeryHigh, Phenomenal };
inline constexpr std::size_t kSeaStateCount = 8;
/// Lower bound (metres) of slight..phenomenal. Smooth is [0, 0.5).
inline constexpr std::array<double, 7> kDouglasLowerMetres{0.5, 1.25, 2.5, 4.0, 6.0, 9.0, 14.0};

enum class VisibilityCategory { Fog, Poor, Moderate, Good };
inline constexpr double kNauticalMileMetres = 1852.0;
/// Lower bound (metres) of poor, moderate, good.
inline constexpr std::array<double, 3> kVisibilityLowerMetres{1000.0, 2.0 * kNauticalMileMetres,
                                                              5.0 * kNauticalMileMetres};

enum class Compass8 { N, NE, E, SE, S, SW, W, NW };

/// Throws Error(ValueOutOfRange) for negative or NaN input.
int classify_beaufort(double speed_knots);
SeaState classify_douglas(double height_metres);
VisibilityCategory classify_visibility(double visibility_metres);
/// Input must lie in [0, 360]; 360 maps to north.
Compass8 compass_8(double direction_degrees);

/// "smooth", "very rough", ...
std::string_view to_string(SeaState s);
/// "fog", "poor", "moderate", "good"
std::string_view to_string(VisibilityCategory v);
/// "northerly", "southwesterly", ...
std::string_view to_string(Compass8 c);

std::optional<SeaState> parse_sea_state(std::string_view label);
std::optional<VisibilityCategory> parse_visibility(std::string_view label);
std::optional<Compass8> parse_compass(std::string_view label);

/// Every phrase is at most this many words.
inline constexpr std::size_t kMaxWeatherWords = 5;
std::size_t count_words(std::string_view text);

struct Rgb {
  std::uint8_t r{0};
  std::uint8_t g{0};
  std::uint8_t b{0};

  friend bool operator==(const Rgb&, const Rgb&) = default;
  friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

std::string to_hex(Rgb c);
/// Parses `#rrggbb`.
Rgb parse_hex(std::string_view text);

/// Reserved for NaN and masked-out cells; never part of a palette.
inline constexpr Rgb kBackground{128, 128, 128};
/// Graticule and label ink on pressure frames; never part of a palette.
inline constexpr Rgb kOverlayInk{0, 0, 0};

enum class ScaleMode { Categorical, Continuous };
std::string_view to_string(ScaleMode m);
ScaleMode parse_scale_mode(std::string_view text);

struct ScaleBin {
  double lower;  ///< inclusive, may be -inf
  double upper;  ///< exclusive, may be +inf
  std::string label;
  Rgb color;
};

/// Ordered, contiguous bins. In continuous mode each bin's colour is the
/// ramp colour at its lower bound and colours are interpolated within a bin.
class CategoricalScale {
 public:
  CategoricalScale() = default;
  CategoricalScale(Variable attribute, ScaleMode mode, std::vector<ScaleBin> bins,
                   std::optional<double> circular_offset = std::nullopt);

  [[nodiscard]] Variable attribute() const { return attribute_; }
  [[nodiscard]] ScaleMode mode() const { return mode_; }
  [[nodiscard]] const std::vector<ScaleBin>& bins() const { return bins_; }
  [[nodiscard]] std::size_t size() const { return bins_.size(); }
  /// For circular quantities (wind direction) values are shifted by this
  /// offset modulo 360 before the bin lookup.
  [[nodiscard]] std::optional<double> circular_offset() const { return circular_offset_; }

  /// Bin index of `value`. Throws Error(ValueOutOfRange) outside the scale.
  [[nodiscard]] std::size_t index_of(double value) const;
  [[nodiscard]] const std::string& label_of(double value) const { return bins_[index_of(value)].label; }
  /// Bin colour (categorical) or interpolated ramp colour (continuous).
  /// Continuous scales clamp values outside their range.
  [[nodiscard]] Rgb color_of(double value) const;
  [[nodiscard]] std::vector<Rgb> palette() const;
  [[nodiscard]] std::optional<std::size_t> index_of_label(std::string_view label) const;

 private:
  Variable attribute_{Variable::WindSpeed};
  ScaleMode mode_{ScaleMode::Categorical};
  std::vector<ScaleBin> bins_;
  std::optional<double> circular_offset_;
};

/// Integer weather code to Shipping Forecast phrase. Phrases are listed in
/// severity order, which is also the order of the weather colour scale.
class WeatherCodeMap {
 public:
  WeatherCodeMap() = default;
  WeatherCodeMap(std::vector<std::string> phrases, std::map<int, std::string> codes);

  static WeatherCodeMap load(const std::filesystem::path& path);
  static WeatherCodeMap from_json_text(std::string_view text);

  /// Throws Error(UnknownWeatherCode).
  [[nodiscard]] const std::string& phrase(int code) const;
  [[nodiscard]] std::size_t phrase_index(int code) const;
  [[nodiscard]] const std::vector<std::string>& phrases() const { return phrases_; }
  [[nodiscard]] const std::map<int, std::string>& codes() const { return codes_; }

  /// Categorical: one bin per phrase over phrase index. Continuous: a ramp over the raw code range.
  [[nodiscard]] CategoricalScale scale(ScaleMode mode) const;

  /// Replaces every code with its phrase index. NaN stays NaN.
  [[nodiscard]] GridField to_phrase_indices(const GridField& codes) const;

 private:
  std::vector<std::string> phrases_;
  std::map<int, std::string> codes_;
};

const std::string& classify_weather(int code, const WeatherCodeMap& map);

/// All colour scales used by the pipeline.
class ScaleSet {
 public:
  ScaleSet(std::vector<CategoricalScale> numeric, WeatherCodeMap weather);

  /// Built-in tables for every numeric attribute plus the given weather map.
  static ScaleSet builtin(WeatherCodeMap weather);
  static ScaleSet load(const std::filesystem::path& scales_json, WeatherCodeMap weather);

  /// Throws Error(UnknownAttribute) if no scale is registered.
  [[nodiscard]] CategoricalScale scale_for(Variable attribute, ScaleMode mode) const;
  [[nodiscard]] const WeatherCodeMap& weather() const { return weather_; }
  [[nodiscard]] const std::vector<CategoricalScale>& numeric() const { return numeric_; }

 private:
  std::vector<CategoricalScale> numeric_;
  WeatherCodeMap weather_;
};

std::vector<CategoricalScale> builtin_numeric_scales();
std::string scales_to_json(const std::vector<CategoricalScale>& scales);
std::vector<CategoricalScale> scales_from_json(std::string_view text);

}  // namespace shipcast
