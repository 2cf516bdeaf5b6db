#include "shipcast/sea_area.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shipcast/error.hpp"

namespace shipcast {
namespace {

using nlohmann::json;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::size_t word_count(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::size_t n = 0;
  std::string w;
  while (in >> w) {
    ++n;
  }
  return n;
}

std::vector<bool> inside_mask(const GridField& field, const SeaArea& area) {
  std::vector<bool> inside(field.cells(), false);
  for (std::size_t i = 0; i < field.nlat(); ++i) {
    for (std::size_t j = 0; j < field.nlon(); ++j) {
      inside[i * field.nlon() + j] = area.contains(field.lats[i], field.lons[j]);
    }
  }
  if (std::none_of(inside.begin(), inside.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::EmptyMask, "no grid cell centre lies inside sea area '" + area.name + "'");
  }
  return inside;
}

}  // namespace

bool SeaArea::contains(double lat, double lon) const {
  bool inside = false;
  const std::size_t n = polygon.size();
  if (n < 4) {
    return false;
  }
  // The ring is closed, so walking consecutive pairs covers every edge.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const LatLon& a = polygon[k];
    const LatLon& b = polygon[k + 1];
    if ((a.lat > lat) != (b.lat > lat)) {
      const double cross_lon = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (lon < cross_lon) {
        inside = !inside;
      }
    }
  }
  return inside;
}

AreaRegistry::AreaRegistry(std::vector<SeaArea> areas) : areas_(std::move(areas)) {
  std::set<std::string> names;
  std::set<int> orders;
  for (const auto& a : areas_) {
    std::string lower = a.name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (a.name.empty() || !names.insert(lower).second) {
      throw Error(ErrorKind::ConfigInvalid, "duplicate or empty sea area name '" + a.name + "'");
    }
    if (!orders.insert(a.order_index).second) {
      throw Error(ErrorKind::ConfigInvalid, "duplicate order_index for '" + a.name + "'");
    }
    if (a.polygon.size() < 4 || !(a.polygon.front() == a.polygon.back())) {
      throw Error(ErrorKind::ConfigInvalid, "polygon of '" + a.name + "' is not a closed ring");
    }
    max_name_words_ = std::max(max_name_words_, word_count(a.name));
  }
  std::sort(areas_.begin(), areas_.end(),
            [](const SeaArea& x, const SeaArea& y) { return x.order_index < y.order_index; });
}

AreaRegistry AreaRegistry::from_json_text(std::string_view text) {
  std::vector<SeaArea> areas;
  try {
    const json j = json::parse(text);
    const json& list = j.is_object() ? j.at("areas") : j;
    for (const auto& item : list) {
      SeaArea a;
      a.name = item.at("name").get<std::string>();
      a.order_index = item.at("order_index").get<int>();
      for (const auto& v : item.at("ring")) {
        a.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      }
      areas.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("areas.json: ") + e.what());
  }
  return AreaRegistry(std::move(areas));
}

AreaRegistry AreaRegistry::load(const std::filesystem::path& areas_json) {
  std::ifstream in(areas_json);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open " + areas_json.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

const SeaArea* AreaRegistry::find(std::string_view name) const {
  for (const auto& a : areas_) {
    if (iequals(a.name, name)) {
      return &a;
    }
  }
  return nullptr;
}

const SeaArea& AreaRegistry::get(std::string_view name) const {
  if (const auto* a = find(name)) {
    return *a;
  }
  throw Error(ErrorKind::UnknownArea, "unknown sea area '" + std::string(name) + "'");
}

int AreaRegistry::order_of(std::string_view name) const { return get(name).order_index; }

GridField mask_sea_area(const GridField& field, const SeaArea& area) {
  const auto inside = inside_mask(field, area);
  GridField out = field;
  const std::size_t cells = field.cells();
  for (std::size_t t = 0; t < field.ntime(); ++t) {
    for (std::size_t c = 0; c < cells; ++c) {
      if (!inside[c]) {
        out.values[t * cells + c] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return out;
}

std::string_view to_string(Reducer r) {
  switch (r) {
    case Reducer::ArealMean: return "areal-mean";
    case Reducer::ArealMax: return "areal-max";
    case Reducer::ArealCircularMean: return "areal-circular-mean";
  }
  return "?";
}

AreaSeries area_series(const GridField& field, const SeaArea& area, Reducer reducer) {
  if (field.ntime() != kHoursPerDay) {
    throw Error(ErrorKind::TimeAxisInvalid, "area series needs 24 hourly timesteps");
  }
  const auto inside = inside_mask(field, area);
  AreaSeries s;
  s.area = area.name;
  s.variable = field.variable;
  s.reducer = reducer;
  const std::size_t cells = field.cells();
  constexpr double kDeg = std::numbers::pi / 180.0;
  for (std::size_t t = 0; t < kHoursPerDay; ++t) {
    double sum = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = field.values[t * cells + c];
      if (!inside[c] || std::isnan(v)) {
        continue;
      }
      ++n;
      sum += v;
      mx = std::max(mx, v);
      mn = std::min(mn, v);
      sx += std::sin(v * kDeg);
      sy += std::cos(v * kDeg);
    }
    double out = std::numeric_limits<double>::quiet_NaN();
    if (n > 0) {
      switch (reducer) {
        // Clamped so rounding in the sum never lifts the mean above the max.
        case Reducer::ArealMean: out = std::clamp(sum / static_cast<double>(n), mn, mx); break;
        case Reducer::ArealMax: out = mx; break;
        case Reducer::ArealCircularMean: {
          double deg = std::atan2(sx, sy) / kDeg;
          if (deg < 0.0) {
            deg += 360.0;
          }
          out = deg >= 360.0 ? 0.0 : deg;
          break;
        }
      }
    }
    s.values[t] = out;
  }
  return s;
}

}  // namespace shipcast
