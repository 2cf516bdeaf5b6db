#pragma once

// Glue from grid bundles to area inputs and whole forecasts:
// reduce -> crop -> mask -> series -> generate -> consolidate.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shipcast/bulletin.hpp"
#include "shipcast/categorical.hpp"
#include "shipcast/generator.hpp"
#include "shipcast/grid.hpp"
#include "shipcast/sea_area.hpp"

namespace shipcast {

/// Variables a bulletin cannot be generated without.
inline constexpr Variable kRequiredVariables[] = {Variable::WindSpeed, Variable::WindDirection, Variable::WaveHeight,
                                                  Variable::Visibility, Variable::WeatherCode};

/// Percentile used to collapse each variable's ensemble. Unlisted variables use `fallback`.
struct PercentileTable {
  double fallback{50.0};
  std::map<Variable, double> per_variable;

  [[nodiscard]] double for_variable(Variable v) const {
    const auto it = per_variable.find(v);
    return it == per_variable.end() ? fallback : it->second;
  }
};

using FieldSet = std::map<Variable, GridField>;

/// Loads `<case_dir>/<variable>/` for every variable present, reduced and
/// cropped to the forecast domain. Throws Error(MissingAttribute) naming the
/// first absent required variable. Pressure is optional.
FieldSet load_case(const std::filesystem::path& case_dir, const PercentileTable& percentiles);

/// Masks and reduces every field to the area's hourly series. Weather codes
/// become phrase indices before reduction.
AreaInputs area_inputs(const FieldSet& fields, const SeaArea& area, const WeatherCodeMap& weather);

/// Line-oriented rendering of the series, one `key: v0 v1 ... v23` per line.
/// Numbers use the shortest round-trip form so parsing gives the inputs back.
std::string data_summary(const AreaInputs& inputs, std::string_view area);

struct ParsedSummary {
  std::string area;
  AreaInputs inputs;
};

/// Throws Error(InvalidRequest) on malformed lines.
ParsedSummary parse_data_summary(std::string_view text);

struct Forecast {
  std::optional<Synopsis> synopsis;  ///< unset when no pressure field was supplied
  std::vector<Bulletin> per_area;    ///< registry order
  std::vector<Bulletin> groups;      ///< consolidated
};

/// Generates one bulletin per registry area. Errors carry the area name.
Forecast generate_forecast(const FieldSet& fields, const AreaRegistry& registry, const ScaleSet& scales);

/// Synopsis line (when present) followed by one line per bulletin group.
std::string render_forecast(const Forecast& f, const AreaRegistry& registry);

struct ParsedForecast {
  std::optional<Synopsis> synopsis;
  std::vector<Bulletin> groups;
};

/// Inverse of render_forecast. Throws Error(ForecastStructureError) or ParseError.
ParsedForecast parse_forecast(std::string_view text, const AreaRegistry& registry);

}  // namespace shipcast
