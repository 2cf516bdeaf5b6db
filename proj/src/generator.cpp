#include "shipcast/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

namespace shipcast {
namespace {

void merge_equal(std::vector<SubPeriod>& runs) {
  std::vector<SubPeriod> out;
  for (const auto& r : runs) {
    if (!out.empty() && out.back().category == r.category) {
      out.back().end_hour = r.end_hour;
    } else {
      out.push_back(r);
    }
  }
  runs = std::move(out);
}

int length(const SubPeriod& p) { return p.end_hour - p.start_hour; }

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

const AreaSeries& require(const std::optional<AreaSeries>& s, const char* name, const std::string& area) {
  if (!s) {
    throw Error(ErrorKind::MissingAttribute, area + ": missing " + name + " series");
  }
  return *s;
}

std::vector<WindClause> summarize_wind(const AreaSeries& mean, const AreaSeries& max, const AreaSeries& direction,
                                       std::array<int, kHoursPerDay>& peak_force) {
  std::array<std::size_t, kHoursPerDay> mean_force{};
  std::array<Compass8, kHoursPerDay> dirs{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const int f_mean = classify_beaufort(mean.values[h]);
    mean_force[h] = static_cast<std::size_t>(f_mean);
    peak_force[h] = std::max(f_mean, classify_beaufort(max.values[h]));
    dirs[h] = compass_8(direction.values[h]);
  }
  const auto periods = segment_categories(mean_force);

  std::vector<WindClause> clauses;
  std::vector<SubPeriod> spans;
  for (const auto& p : periods) {
    int low = kMaxBeaufort;
    int high = 0;
    std::array<int, 8> votes{};
    for (int h = p.start_hour; h < p.end_hour; ++h) {
      low = std::min(low, static_cast<int>(mean_force[static_cast<std::size_t>(h)]));
      high = std::max(high, peak_force[static_cast<std::size_t>(h)]);
      ++votes[static_cast<std::size_t>(dirs[static_cast<std::size_t>(h)])];
    }
    low = std::max(low, high - kMaxForceSpan);
    // max_element keeps the first maximum: ties go clockwise from north.
    const auto dominant = static_cast<Compass8>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    WindClause c{dominant, low, high, std::nullopt};
    if (!clauses.empty() && clauses.back() == c) {
      spans.back().end_hour = p.end_hour;
      continue;
    }
    clauses.push_back(c);
    spans.push_back(p);
  }
  const auto timing = assign_timing(spans);
  for (std::size_t k = 0; k < clauses.size(); ++k) {
    clauses[k].timing = timing[k];
  }
  return clauses;
}

std::vector<StateClause> to_state_clauses(const std::vector<SummaryClause>& summary) {
  std::vector<StateClause> out;
  for (const auto& s : summary) {
    out.push_back({s.label, s.label_high, s.timing});
  }
  return out;
}

// -- synopsis helpers --------------------------------------------------------

std::vector<double> smooth_hour(const GridField& f, std::size_t t, int window) {
  const auto nlat = static_cast<int>(f.nlat());
  const auto nlon = static_cast<int>(f.nlon());
  const int half = window / 2;
  std::vector<double> out(f.cells(), std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < nlat; ++i) {
    for (int j = 0; j < nlon; ++j) {
      if (std::isnan(f.at(t, static_cast<std::size_t>(i), static_cast<std::size_t>(j)))) {
        continue;
      }
      double sum = 0.0;
      int n = 0;
      for (int di = -half; di <= half; ++di) {
        for (int dj = -half; dj <= half; ++dj) {
          const int ii = i + di;
          const int jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nlat || jj >= nlon) {
            continue;
          }
          const double v = f.at(t, static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          if (!std::isnan(v)) {
            sum += v;
            ++n;
          }
        }
      }
      out[static_cast<std::size_t>(i * nlon + j)] = sum / n;
    }
  }
  return out;
}

struct Extremum {
  SystemKind kind;
  std::size_t i;
  std::size_t j;
  double smoothed;
};

std::vector<Extremum> find_extrema(const std::vector<double>& s, std::size_t nlat, std::size_t nlon) {
  std::vector<Extremum> out;
  if (nlat < 3 || nlon < 3) {
    return out;
  }
  for (std::size_t i = 1; i + 1 < nlat; ++i) {
    for (std::size_t j = 1; j + 1 < nlon; ++j) {
      const double c = s[i * nlon + j];
      if (std::isnan(c)) {
        continue;
      }
      bool is_min = true;
      bool is_max = true;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) {
            continue;
          }
          const double v = s[(i + static_cast<std::size_t>(di)) * nlon + j + static_cast<std::size_t>(dj)];
          if (std::isnan(v) || !(c < v)) {
            is_min = false;
          }
          if (std::isnan(v) || !(c > v)) {
            is_max = false;
          }
        }
      }
      if (is_min) {
        out.push_back({SystemKind::Low, i, j, c});
      } else if (is_max) {
        out.push_back({SystemKind::High, i, j, c});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<SubPeriod> segment_categories(std::span<const std::size_t> hourly) {
  std::vector<SubPeriod> runs;
  for (std::size_t h = 0; h < hourly.size(); ++h) {
    const int hour = static_cast<int>(h);
    runs.push_back({hour, hour + 1, hourly[h]});
  }
  merge_equal(runs);

  while (runs.size() > 1) {
    std::optional<std::size_t> shortest;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      if (length(runs[k]) < kMinSubPeriodHours && (!shortest || length(runs[k]) < length(runs[*shortest]))) {
        shortest = k;
      }
    }
    if (!shortest) {
      break;
    }
    const std::size_t k = *shortest;
    const bool has_left = k > 0;
    const bool has_right = k + 1 < runs.size();
    const bool into_left = has_left && (!has_right || length(runs[k - 1]) >= length(runs[k + 1]));
    if (into_left) {
      runs[k - 1].end_hour = runs[k].end_hour;
    } else {
      runs[k + 1].start_hour = runs[k].start_hour;
    }
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(k));
    merge_equal(runs);
  }

  while (runs.size() > kMaxSubPeriods) {
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
      if (distance(runs[k].category, runs[k + 1].category) < distance(runs[best].category, runs[best + 1].category)) {
        best = k;
      }
    }
    const auto& a = runs[best];
    const auto& b = runs[best + 1];
    const std::size_t category = length(a) >= length(b) ? a.category : b.category;
    runs[best] = {a.start_hour, b.end_hour, category};
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    merge_equal(runs);
  }
  return runs;
}

std::vector<std::optional<Timing>> assign_timing(std::span<const SubPeriod> periods) {
  std::vector<std::optional<Timing>> out(periods.size());
  if (periods.size() <= 1) {
    return out;
  }
  if (periods[1].start_hour <= 12) {
    out[0] = Timing::AtFirst;
  }
  for (std::size_t k = 1; k < periods.size(); ++k) {
    const int start = periods[k].start_hour;
    out[k] = start >= 12 ? Timing::Later : (start >= 6 ? Timing::Soon : Timing::Becoming);
  }
  return out;
}

std::vector<SummaryClause> summarize_attribute(const AreaSeries& series, const CategoricalScale& scale) {
  std::array<std::size_t, kHoursPerDay> hourly{};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    hourly[h] = scale.index_of(series.values[h]);
  }
  const bool allow_ranges = series.variable != Variable::WeatherCode;
  const auto& bins = scale.bins();
  std::vector<SummaryClause> out;
  for (const auto& p : segment_categories(hourly)) {
    SummaryClause c{p, bins[p.category].label, std::nullopt, std::nullopt};
    if (allow_ranges) {
      const auto [lo, hi] = std::minmax_element(hourly.begin() + p.start_hour, hourly.begin() + p.end_hour);
      if (*hi - *lo == 1) {
        c.label = bins[*lo].label;
        c.label_high = bins[*hi].label;
      }
    }
    if (!out.empty() && out.back().label == c.label && out.back().label_high == c.label_high) {
      out.back().period.end_hour = p.end_hour;
      continue;
    }
    out.push_back(std::move(c));
  }
  std::vector<SubPeriod> periods;
  for (const auto& c : out) {
    periods.push_back(c.period);
  }
  const auto timing = assign_timing(periods);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].timing = timing[k];
  }
  return out;
}

std::optional<GaleWarning> detect_gales(const AreaSeries& wind_max) {
  int peak = 0;
  std::optional<std::size_t> first;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    const int f = classify_beaufort(wind_max.values[h]);
    peak = std::max(peak, f);
    if (f >= 8 && !first) {
      first = h;
    }
  }
  if (!first) {
    return std::nullopt;
  }
  const GaleTiming timing = *first < 6 ? GaleTiming::Imminent : (*first <= 12 ? GaleTiming::Soon : GaleTiming::Later);
  return GaleWarning{severity_for_force(peak), timing};
}

Bulletin generate_area_bulletin(const AreaInputs& inputs, const std::string& area, const ScaleSet& scales) {
  const auto& speed = require(inputs.wind_speed, "wind_speed", area);
  const auto& speed_max = require(inputs.wind_speed_max, "wind_speed_max", area);
  const auto& direction = require(inputs.wind_direction, "wind_direction", area);
  const auto& waves = require(inputs.wave_height, "wave_height", area);
  const auto& vis = require(inputs.visibility, "visibility", area);
  const auto& weather = require(inputs.weather, "weather_code", area);

  Bulletin b;
  b.areas = {area};

  std::array<int, kHoursPerDay> peak_force{};
  b.wind = summarize_wind(speed, speed_max, direction, peak_force);
  AreaSeries effective_max = speed_max;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    // Gale logic sees the same hourly peak forces as the wind clauses.
    effective_max.values[h] = std::max(speed_max.values[h], speed.values[h]);
  }
  b.gale = detect_gales(effective_max);

  b.sea_state = to_state_clauses(summarize_attribute(waves, scales.scale_for(Variable::WaveHeight, ScaleMode::Categorical)));
  b.visibility = to_state_clauses(summarize_attribute(vis, scales.scale_for(Variable::Visibility, ScaleMode::Categorical)));

  AreaSeries weather_idx = weather;
  weather_idx.variable = Variable::WeatherCode;
  for (const auto& c : summarize_attribute(weather_idx, scales.scale_for(Variable::WeatherCode, ScaleMode::Categorical))) {
    b.weather.push_back({c.label, c.timing});
  }
  if (b.weather.size() == 1 && b.weather[0].phrase == "fair") {
    b.weather.clear();
  }
  return b;
}

std::vector<Bulletin> consolidate(const std::vector<Bulletin>& bulletins, const AreaRegistry& registry) {
  std::set<std::string> seen;
  for (const auto& b : bulletins) {
    for (const auto& a : b.areas) {
      if (!seen.insert(registry.get(a).name).second) {
        throw Error(ErrorKind::DuplicateArea, "sea area '" + a + "' appears in more than one bulletin");
      }
    }
  }
  std::map<std::string, Bulletin> by_body;
  for (const auto& b : bulletins) {
    auto [it, inserted] = by_body.try_emplace(render_body(b), b);
    if (!inserted) {
      auto& areas = it->second.areas;
      areas.insert(areas.end(), b.areas.begin(), b.areas.end());
    }
  }
  std::vector<Bulletin> out;
  for (auto& [body, b] : by_body) {
    std::sort(b.areas.begin(), b.areas.end(), [&registry](const std::string& x, const std::string& y) {
      return registry.order_of(x) < registry.order_of(y);
    });
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [&registry](const Bulletin& x, const Bulletin& y) {
    return registry.order_of(x.areas.front()) < registry.order_of(y.areas.front());
  });
  return out;
}

Synopsis generate_synopsis(const GridField& pressure, const OverlayGrid& grid, const SynopsisOptions& options) {
  pressure.validate();
  const std::size_t last = kHoursPerDay - 1;
  const auto start = smooth_hour(pressure, 0, options.smoothing_window);
  const auto end = smooth_hour(pressure, last, options.smoothing_window);
  auto systems0 = find_extrema(start, pressure.nlat(), pressure.nlon());
  const auto systems1 = find_extrema(end, pressure.nlat(), pressure.nlon());
  if (systems0.empty()) {
    throw Error(ErrorKind::EmptySynopsis, "no pressure centre on the chart");
  }
  std::stable_sort(systems0.begin(), systems0.end(), [](const Extremum& a, const Extremum& b) {
    if (a.kind != b.kind) {
      return a.kind == SystemKind::Low;
    }
    return a.kind == SystemKind::Low ? a.smoothed < b.smoothed : a.smoothed > b.smoothed;
  });

  constexpr double kDeg = std::numbers::pi / 180.0;
  Synopsis out;
  for (const auto& e : systems0) {
    if (out.systems.size() >= options.max_systems) {
      break;
    }
    const double lat0 = pressure.lats[e.i];
    const double lon0 = pressure.lons[e.j];
    const double p0 = pressure.at(0, e.i, e.j);
    const long hpa = std::lround(p0);
    if (hpa < 900 || hpa > 1070) {
      continue;
    }
    std::size_t ti = e.i;
    std::size_t tj = e.j;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : systems1) {
      if (f.kind != e.kind) {
        continue;
      }
      const double dlat = pressure.lats[f.i] - lat0;
      const double dlon = (pressure.lons[f.j] - lon0) * std::cos(lat0 * kDeg);
      const double d2 = dlat * dlat + dlon * dlon;
      if (d2 < best) {
        best = d2;
        ti = f.i;
        tj = f.j;
      }
    }
    PressureSystem sys;
    sys.kind = e.kind;
    sys.pressure_hpa = static_cast<int>(hpa);
    sys.position = grid.label_for(lat0, lon0);
    const double change = pressure.at(last, ti, tj) - p0;
    sys.tendency = change < -options.tendency_threshold_hpa
                       ? Tendency::Deepening
                       : (change > options.tendency_threshold_hpa ? Tendency::Filling : Tendency::Steady);
    if (ti != e.i || tj != e.j) {
      const double north = pressure.lats[ti] - lat0;
      const double mid_lat = 0.5 * (pressure.lats[ti] + lat0);
      const double east = (pressure.lons[tj] - lon0) * std::cos(mid_lat * kDeg);
      double bearing = std::atan2(east, north) / kDeg;
      if (bearing < 0.0) {
        bearing += 360.0;
      }
      const double nmi = 60.0 * std::hypot(north, east);
      sys.motion = Motion{compass_8(std::min(bearing, 360.0)), motion_speed_for_knots(nmi / static_cast<double>(last))};
    }
    out.systems.push_back(std::move(sys));
  }
  if (out.systems.empty()) {
    throw Error(ErrorKind::EmptySynopsis, "no pressure centre within 900-1070 hPa");
  }
  return out;
}

}  // namespace shipcast
