#pragma once

// Gridded forecast fields: bundle I/O, ensemble percentile reduction and
// domain cropping.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace shipcast {

enum class Variable {
  WindSpeed,
  WindDirection,
  WaveHeight,
  Visibility,
  WeatherCode,
  Pressure,
};

inline constexpr std::size_t kHoursPerDay = 24;

std::string_view to_string(Variable v);
/// Throws Error(UnknownAttribute) for names outside the closed set.
Variable parse_variable(std::string_view name);
/// Canonical unit string: kn, deg, m, m, code, hPa.
std::string_view default_units(Variable v);

using TimePoint = std::chrono::sys_seconds;

std::string format_iso8601(TimePoint t);
/// Accepts `YYYY-MM-DDTHH:MM[:SS][Z]`. Throws Error(TimeAxisInvalid) otherwise.
TimePoint parse_iso8601(std::string_view text);

/// One attribute on a regular lat/lon grid over 24 hourly steps.
/// `values` is time-major: index = (t * lats + i) * lons + j.
struct GridField {
  Variable variable{Variable::WindSpeed};
  std::string units;
  std::vector<double> lats;
  std::vector<double> lons;
  std::vector<TimePoint> times;
  std::vector<double> values;
  std::optional<double> percentile;

  [[nodiscard]] std::size_t nlat() const { return lats.size(); }
  [[nodiscard]] std::size_t nlon() const { return lons.size(); }
  [[nodiscard]] std::size_t ntime() const { return times.size(); }
  [[nodiscard]] std::size_t cells() const { return lats.size() * lons.size(); }

  [[nodiscard]] double at(std::size_t t, std::size_t i, std::size_t j) const {
    return values[(t * nlat() + i) * nlon() + j];
  }
  double& at(std::size_t t, std::size_t i, std::size_t j) {
    return values[(t * nlat() + i) * nlon() + j];
  }

  /// Throws Error(TimeAxisInvalid / BundleMalformed) when an invariant fails.
  void validate() const;
};

/// Member-major ensemble: index = ((m * times + t) * lats + i) * lons + j.
struct EnsembleField {
  Variable variable{Variable::WindSpeed};
  std::string units;
  std::size_t members{1};
  std::vector<double> lats;
  std::vector<double> lons;
  std::vector<TimePoint> times;
  std::vector<double> values;
  std::optional<double> percentile;

  [[nodiscard]] std::size_t nlat() const { return lats.size(); }
  [[nodiscard]] std::size_t nlon() const { return lons.size(); }
  [[nodiscard]] std::size_t ntime() const { return times.size(); }

  [[nodiscard]] double at(std::size_t m, std::size_t t, std::size_t i, std::size_t j) const {
    return values[((m * ntime() + t) * nlat() + i) * nlon() + j];
  }

  void validate() const;
};

using LoadedField = std::variant<GridField, EnsembleField>;

/// Reads a grid bundle directory (`header.json` + `values.f64le`).
/// Returns an EnsembleField when the header declares members > 1.
LoadedField load_grid_bundle(const std::filesystem::path& dir);

void write_grid_bundle(const std::filesystem::path& dir, const GridField& field);
void write_grid_bundle(const std::filesystem::path& dir, const EnsembleField& field);

/// Loads a bundle and collapses any ensemble dimension at percentile `p`.
GridField load_deterministic(const std::filesystem::path& dir, double p);

/// Percentile of a sample using linear interpolation between closest ranks
/// (rank h = (n - 1) * p / 100). NaN entries are skipped; all-NaN gives NaN.
double percentile_of(std::vector<double> sample, double p);

/// Cellwise, hourwise percentile over ensemble members.
GridField reduce_percentile(const EnsembleField& field, double p);

struct BoundingBox {
  double lat_min;
  double lat_max;
  double lon_min;
  double lon_max;

  [[nodiscard]] bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
};

/// 30N-70N, 20W-10E.
inline constexpr BoundingBox kForecastDomain{30.0, 70.0, -20.0, 10.0};

/// Keeps the rows/columns whose coordinates fall inside `bbox` (inclusive).
GridField crop_domain(const GridField& field, const BoundingBox& bbox = kForecastDomain);

}  // namespace shipcast
