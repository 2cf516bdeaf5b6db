#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shipcast/grid.hpp"

namespace shipcast {

struct LatLon {
  double lat;
  double lon;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

struct SeaArea {
  std::string name;
  /// Closed ring: front() == back().
  std::vector<LatLon> polygon;
  int order_index{0};

  /// Even-odd ray test. Points exactly on an edge may fall either way.
  [[nodiscard]] bool contains(double lat, double lon) const;
};

/// The canonical set of sea areas, kept in broadcast order.
class AreaRegistry {
 public:
  AreaRegistry() = default;
  explicit AreaRegistry(std::vector<SeaArea> areas);

  static AreaRegistry load(const std::filesystem::path& areas_json);
  static AreaRegistry from_json_text(std::string_view text);

  [[nodiscard]] const std::vector<SeaArea>& areas() const { return areas_; }
  [[nodiscard]] std::size_t size() const { return areas_.size(); }

  /// Case-insensitive lookup. nullptr when absent.
  [[nodiscard]] const SeaArea* find(std::string_view name) const;
  /// Throws Error(UnknownArea).
  [[nodiscard]] const SeaArea& get(std::string_view name) const;
  [[nodiscard]] int order_of(std::string_view name) const;

  /// Longest number of words in any area name; bounds the parser's lookahead.
  [[nodiscard]] std::size_t max_name_words() const { return max_name_words_; }

 private:
  std::vector<SeaArea> areas_;
  std::size_t max_name_words_{0};
};

/// Cells whose centre lies outside the polygon become NaN; axes unchanged.
/// Throws Error(EmptyMask) if no cell centre lies inside.
GridField mask_sea_area(const GridField& field, const SeaArea& area);

enum class Reducer {
  ArealMean,
  ArealMax,
  /// Direction of the mean unit vector, in degrees [0, 360).
  ArealCircularMean,
};

std::string_view to_string(Reducer r);

struct AreaSeries {
  std::string area;
  Variable variable{Variable::WindSpeed};
  std::array<double, kHoursPerDay> values{};
  Reducer reducer{Reducer::ArealMean};
};

/// Per-hour areal statistic over the masked cells, skipping NaN.
AreaSeries area_series(const GridField& field, const SeaArea& area, Reducer reducer);

}  // namespace shipcast
