#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shipcast/grid.hpp"

namespace shipcast {

/// Labelled lat/lon grid laid over pressure charts. Columns are lettered
/// west to east from A, rows numbered north to south from 1, so the
/// default 5-degree grid over the forecast domain runs A1 (north-west
/// corner) to F8 (south-east corner).
struct OverlayGrid {
  BoundingBox domain{kForecastDomain};
  double spacing_deg{5.0};

  [[nodiscard]] int columns() const {
    return static_cast<int>(std::ceil((domain.lon_max - domain.lon_min) / spacing_deg));
  }
  [[nodiscard]] int rows() const {
    return static_cast<int>(std::ceil((domain.lat_max - domain.lat_min) / spacing_deg));
  }

  [[nodiscard]] std::string label_for(double lat, double lon) const {
    const int col = std::clamp(static_cast<int>(std::floor((lon - domain.lon_min) / spacing_deg)), 0, columns() - 1);
    const int row = std::clamp(static_cast<int>(std::floor((domain.lat_max - lat) / spacing_deg)), 0, rows() - 1);
    return std::string(1, static_cast<char>('A' + col)) + std::to_string(row + 1);
  }

  /// Longitudes of the vertical grid lines, west to east, edges included.
  [[nodiscard]] std::vector<double> lon_lines() const {
    std::vector<double> out;
    for (int k = 0; k <= columns(); ++k) {
      out.push_back(std::min(domain.lon_min + spacing_deg * k, domain.lon_max));
    }
    return out;
  }

  /// Latitudes of the horizontal grid lines, north to south, edges included.
  [[nodiscard]] std::vector<double> lat_lines() const {
    std::vector<double> out;
    for (int k = 0; k <= rows(); ++k) {
      out.push_back(std::max(domain.lat_max - spacing_deg * k, domain.lat_min));
    }
    return out;
  }
};

}  // namespace shipcast
