#pragma once

// Structured sea-area bulletins, the canonical text renderer, the strict
// parser, the rule validator and whole-forecast segmentation.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shipcast/categorical.hpp"
#include "shipcast/error.hpp"
#include "shipcast/sea_area.hpp"

namespace shipcast {

enum class Timing { AtFirst, Later, Soon, Occasionally, Becoming };
std::string_view to_string(Timing t);
std::optional<Timing> parse_timing(std::string_view text);

struct WindClause {
  Compass8 direction{Compass8::N};
  int force_low{0};
  int force_high{0};
  std::optional<Timing> timing;

  friend bool operator==(const WindClause&, const WindClause&) = default;
};

/// Sea state or visibility: a label, or a two-label range ("moderate or rough").
struct StateClause {
  std::string label;
  std::optional<std::string> label_high;
  std::optional<Timing> timing;

  friend bool operator==(const StateClause&, const StateClause&) = default;
};

struct WeatherClause {
  std::string phrase;
  std::optional<Timing> timing;

  friend bool operator==(const WeatherClause&, const WeatherClause&) = default;
};

enum class GaleSeverity { Gale = 8, SevereGale = 9, Storm = 10, ViolentStorm = 11, HurricaneForce = 12 };
enum class GaleTiming { Imminent, Soon, Later };

std::string_view to_string(GaleSeverity s);
std::string_view to_string(GaleTiming t);
inline int force_of(GaleSeverity s) { return static_cast<int>(s); }
/// Force 8..12 to severity; throws Error(ValueOutOfRange) below 8.
GaleSeverity severity_for_force(int force);

struct GaleWarning {
  GaleSeverity severity{GaleSeverity::Gale};
  GaleTiming timing{GaleTiming::Imminent};

  friend bool operator==(const GaleWarning&, const GaleWarning&) = default;
};

struct Bulletin {
  std::vector<std::string> areas;
  std::vector<WindClause> wind;
  std::vector<StateClause> sea_state;
  /// Empty means fair weather; rendered as "Fair."
  std::vector<WeatherClause> weather;
  std::vector<StateClause> visibility;
  std::optional<GaleWarning> gale;

  friend bool operator==(const Bulletin&, const Bulletin&) = default;
};

enum class RuleViolation {
  EmptyAreas,
  UnknownArea,
  AreaOrder,
  EmptyWind,
  EmptySeaState,
  EmptyVisibility,
  ForceOutOfRange,
  ForceRangeInverted,
  ForceSpanTooWide,
  UnknownSeaStateLabel,
  UnknownVisibilityLabel,
  LabelRangeInvalid,
  WeatherTooLong,
  WeatherPhraseInvalid,
  FairNotOmitted,
  MissingGaleWarning,
  UnexpectedGaleWarning,
  GaleSeverityMismatch,
};

std::string_view to_string(RuleViolation v);

struct Violation {
  RuleViolation rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Widest allowed force range, in Beaufort steps.
inline constexpr int kMaxForceSpan = 3;

/// Empty iff every rule holds. Area checks are skipped when `registry` is null.
std::vector<Violation> validate(const Bulletin& b, const AreaRegistry* registry = nullptr);

/// Raised by the parser; carries the offending attribute and byte span.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::string attribute, std::pair<std::size_t, std::size_t> span,
             const std::string& message)
      : Error(kind, attribute + " [" + std::to_string(span.first) + ", " + std::to_string(span.second) +
                        "): " + message),
        attribute_(std::move(attribute)),
        span_(span) {}

  [[nodiscard]] const std::string& attribute() const { return attribute_; }
  [[nodiscard]] std::pair<std::size_t, std::size_t> span() const { return span_; }

 private:
  std::string attribute_;
  std::pair<std::size_t, std::size_t> span_;
};

/// Text fragments of one bulletin, one per sentence slot.
std::string render_area_list(const Bulletin& b);
std::string render_gale(const GaleWarning& g);
std::string render_wind(const std::vector<WindClause>& clauses);
std::string render_states(const std::vector<StateClause>& clauses);
std::string render_weather(const std::vector<WeatherClause>& clauses);

/// Everything after the area list: warning (if any) and the four clause sentences.
std::string render_body(const Bulletin& b);

/// Throws Error(ValidationFailed) listing the broken rules.
std::string render_bulletin(const Bulletin& b, const AreaRegistry* registry = nullptr);

/// Strict inverse of render_bulletin. Throws ParseError with kind
/// UnknownArea, ClauseSyntaxError or ValueOutOfRange.
Bulletin parse_bulletin(std::string_view text, const AreaRegistry& registry);

nlohmann::json to_json(const Bulletin& b);
Bulletin bulletin_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// General synopsis

enum class SystemKind { Low, High };
enum class Tendency { Deepening, Filling, Steady };
enum class MotionSpeed { Slowly, Steadily, RatherQuickly, Quickly, VeryQuickly };

std::string_view to_string(SystemKind k);
std::string_view to_string(Tendency t);
std::string_view to_string(MotionSpeed s);
/// Speed bands in knots: <15, 15-25, 25-35, 35-45, >=45.
MotionSpeed motion_speed_for_knots(double knots);

struct Motion {
  Compass8 direction{Compass8::N};
  MotionSpeed speed{MotionSpeed::Slowly};

  friend bool operator==(const Motion&, const Motion&) = default;
};

struct PressureSystem {
  SystemKind kind{SystemKind::Low};
  int pressure_hpa{1000};
  std::string position;
  Tendency tendency{Tendency::Steady};
  std::optional<Motion> motion;

  friend bool operator==(const PressureSystem&, const PressureSystem&) = default;
};

struct Synopsis {
  std::vector<PressureSystem> systems;

  friend bool operator==(const Synopsis&, const Synopsis&) = default;
};

/// "General synopsis. Low C4 984, deepening, moving easterly slowly."
std::string render_synopsis(const Synopsis& s);
Synopsis parse_synopsis(std::string_view text);

// ---------------------------------------------------------------------------
// Whole-forecast segmentation

enum class FragmentKind { Synopsis, Gale, Wind, SeaState, Weather, Visibility };
std::string_view to_string(FragmentKind k);
std::optional<FragmentKind> parse_fragment_kind(std::string_view text);

/// The four attributes scored by evaluation, in report order.
inline constexpr FragmentKind kScoredAttributes[] = {FragmentKind::SeaState, FragmentKind::Visibility,
                                                     FragmentKind::Weather, FragmentKind::Wind};

struct Fragment {
  std::vector<std::string> areas;
  FragmentKind kind{FragmentKind::Wind};
  std::string text;
  /// Set when the fragment covers more than one sea area.
  bool excluded{false};
};

/// Splits a complete forecast into per-area, per-attribute fragments.
/// Throws Error(ForecastStructureError).
std::vector<Fragment> segment_forecast(std::string_view full_text, const AreaRegistry& registry);

}  // namespace shipcast
