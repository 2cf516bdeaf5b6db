#pragma once

// Rules-based data-to-text: per-area hourly series to bulletins, gale
// warnings, the pressure synopsis and cross-area consolidation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shipcast/bulletin.hpp"
#include "shipcast/categorical.hpp"
#include "shipcast/overlay.hpp"
#include "shipcast/sea_area.hpp"

namespace shipcast {

/// Sub-periods shorter than this many hours are absorbed by a neighbour.
inline constexpr int kMinSubPeriodHours = 3;
inline constexpr std::size_t kMaxSubPeriods = 3;

struct SubPeriod {
  int start_hour{0};  ///< inclusive
  int end_hour{0};    ///< exclusive
  std::size_t category{0};

  friend bool operator==(const SubPeriod&, const SubPeriod&) = default;
};

/// Merges runs of identical categories, absorbs runs shorter than 3 h into
/// their longer neighbour (earlier on ties) and caps the result at 3
/// sub-periods by merging the adjacent pair closest in scale order
/// (earlier pair on ties; the longer run's category survives).
std::vector<SubPeriod> segment_categories(std::span<const std::size_t> hourly);

/// No phrase for a single sub-period. Otherwise the first sub-period reads
/// "at first" when the first change comes by hour 12, and each later one
/// reads "becoming" (<6 h), "soon" (6-11 h) or "later" (>=12 h) by start hour.
std::vector<std::optional<Timing>> assign_timing(std::span<const SubPeriod> periods);

struct SummaryClause {
  SubPeriod period;
  std::string label;
  std::optional<std::string> label_high;
  std::optional<Timing> timing;
};

/// Classifies each hour on `scale` and summarizes into timed clauses. A
/// sub-period that spans two adjacent categories becomes a range.
std::vector<SummaryClause> summarize_attribute(const AreaSeries& series, const CategoricalScale& scale);

/// Gale warning from an areal-max wind-speed series in knots.
std::optional<GaleWarning> detect_gales(const AreaSeries& wind_max);

/// Per-area inputs for one forecast day.
struct AreaInputs {
  std::optional<AreaSeries> wind_speed;      ///< areal-mean, knots
  std::optional<AreaSeries> wind_speed_max;  ///< areal-max, knots
  std::optional<AreaSeries> wind_direction;  ///< areal-circular-mean, degrees
  std::optional<AreaSeries> wave_height;     ///< areal-mean, metres
  std::optional<AreaSeries> visibility;      ///< areal-mean, metres
  std::optional<AreaSeries> weather;         ///< areal-max of weather phrase index
};

/// Throws Error(MissingAttribute) naming the absent series.
Bulletin generate_area_bulletin(const AreaInputs& inputs, const std::string& area, const ScaleSet& scales);

/// Groups bulletins with byte-identical bodies. Throws Error(DuplicateArea).
std::vector<Bulletin> consolidate(const std::vector<Bulletin>& bulletins, const AreaRegistry& registry);

struct SynopsisOptions {
  /// Side of the square mean filter applied before extremum detection.
  int smoothing_window{3};
  /// Central-pressure change (hPa) beyond which a system is deepening or filling.
  double tendency_threshold_hpa{2.0};
  std::size_t max_systems{4};
};

/// Lows and highs at hour 0, tracked to hour 23. Throws Error(EmptySynopsis)
/// when the chart has no interior extremum.
Synopsis generate_synopsis(const GridField& pressure, const OverlayGrid& grid = {},
                           const SynopsisOptions& options = {});

}  // namespace shipcast
