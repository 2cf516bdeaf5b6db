#include "shipcast/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "shipcast/error.hpp"

namespace shipcast {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kHeaderName = "header.json";
constexpr const char* kPayloadName = "values.f64le";

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) {
    throw Error(ErrorKind::BundleMalformed, std::string(name) + " axis is empty");
  }
  for (std::size_t k = 1; k < axis.size(); ++k) {
    if (!(axis[k] > axis[k - 1])) {
      throw Error(ErrorKind::BundleMalformed, std::string(name) + " axis is not strictly ascending");
    }
  }
}

void check_times(const std::vector<TimePoint>& times) {
  if (times.size() != kHoursPerDay) {
    throw Error(ErrorKind::TimeAxisInvalid,
                "expected 24 hourly timesteps, found " + std::to_string(times.size()));
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] - times[k - 1] != std::chrono::hours(1)) {
      throw Error(ErrorKind::TimeAxisInvalid, "timesteps are not strictly hourly at index " +
                                                  std::to_string(k));
    }
  }
}

double read_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) {
    bits = (bits << 8) | p[b];
  }
  return std::bit_cast<double>(bits);
}

void write_le_double(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int b = 0; b < 8; ++b) {
    buf[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  os.write(buf, 8);
}

struct Header {
  Variable variable;
  std::string units;
  std::optional<double> percentile;
  std::size_t members;
  std::vector<double> lats;
  std::vector<double> lons;
  std::vector<TimePoint> times;
};

Header read_header(const fs::path& dir) {
  const fs::path path = dir / kHeaderName;
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::BundleMalformed, "missing " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BundleMalformed, path.string() + ": " + e.what());
  }
  Header h;
  try {
    h.variable = parse_variable(j.at("variable").get<std::string>());
    h.units = j.at("units").get<std::string>();
    const auto& p = j.at("percentile");
    if (!p.is_null()) {
      h.percentile = p.get<double>();
    }
    h.members = j.at("members").get<std::size_t>();
    h.lats = j.at("lats").get<std::vector<double>>();
    h.lons = j.at("lons").get<std::vector<double>>();
    for (const auto& t : j.at("times")) {
      h.times.push_back(parse_iso8601(t.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BundleMalformed, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::TimeAxisInvalid) {
      throw;
    }
    throw Error(ErrorKind::BundleMalformed, path.string() + ": " + e.what());
  }
  if (h.members < 1) {
    throw Error(ErrorKind::BundleMalformed, "members must be >= 1");
  }
  check_axis(h.lats, "lat");
  check_axis(h.lons, "lon");
  check_times(h.times);
  return h;
}

std::vector<double> read_payload(const fs::path& dir, std::size_t expected_count) {
  const fs::path path = dir / kPayloadName;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::BundleMalformed, "missing " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t expected_bytes = expected_count * sizeof(double);
  if (bytes.size() != expected_bytes) {
    throw Error(ErrorKind::PayloadSizeMismatch,
                path.string() + " holds " + std::to_string(bytes.size()) + " bytes, header implies " +
                    std::to_string(expected_bytes));
  }
  std::vector<double> values(expected_count);
  for (std::size_t k = 0; k < expected_count; ++k) {
    values[k] = read_le_double(bytes.data() + k * 8);
  }
  return values;
}

void write_bundle(const fs::path& dir, Variable variable, const std::string& units,
                  const std::optional<double>& percentile, std::size_t members,
                  const std::vector<double>& lats, const std::vector<double>& lons,
                  const std::vector<TimePoint>& times, const std::vector<double>& values) {
  fs::create_directories(dir);
  json j;
  j["variable"] = std::string(to_string(variable));
  j["units"] = units;
  j["percentile"] = percentile ? json(*percentile) : json(nullptr);
  j["members"] = members;
  j["lats"] = lats;
  j["lons"] = lons;
  std::vector<std::string> iso;
  iso.reserve(times.size());
  for (auto t : times) {
    iso.push_back(format_iso8601(t));
  }
  j["times"] = iso;
  {
    std::ofstream out(dir / kHeaderName);
    if (!out) {
      throw Error(ErrorKind::IoError, "cannot write " + (dir / kHeaderName).string());
    }
    out << j.dump(2) << '\n';
  }
  std::ofstream out(dir / kPayloadName, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + (dir / kPayloadName).string());
  }
  for (double v : values) {
    write_le_double(out, v);
  }
}

}  // namespace

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::WindSpeed: return "wind_speed";
    case Variable::WindDirection: return "wind_direction";
    case Variable::WaveHeight: return "wave_height";
    case Variable::Visibility: return "visibility";
    case Variable::WeatherCode: return "weather_code";
    case Variable::Pressure: return "pressure";
  }
  return "?";
}

Variable parse_variable(std::string_view name) {
  for (auto v : {Variable::WindSpeed, Variable::WindDirection, Variable::WaveHeight, Variable::Visibility,
                 Variable::WeatherCode, Variable::Pressure}) {
    if (to_string(v) == name) {
      return v;
    }
  }
  throw Error(ErrorKind::UnknownAttribute, "unknown variable '" + std::string(name) + "'");
}

std::string_view default_units(Variable v) {
  switch (v) {
    case Variable::WindSpeed: return "kn";
    case Variable::WindDirection: return "deg";
    case Variable::WaveHeight: return "m";
    case Variable::Visibility: return "m";
    case Variable::WeatherCode: return "code";
    case Variable::Pressure: return "hPa";
  }
  return "";
}

std::string format_iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

TimePoint parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  const std::string s(text);
  int consumed = 0;
  const int n = std::sscanf(s.c_str(), "%4d-%2u-%2uT%2d:%2d%n", &y, &mo, &d, &hh, &mm, &consumed);
  if (n != 5) {
    throw Error(ErrorKind::TimeAxisInvalid, "not an ISO-8601 timestamp: '" + s + "'");
  }
  std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == ':') {
    int c2 = 0;
    if (std::sscanf(rest.data(), ":%2d%n", &ss, &c2) != 1) {
      throw Error(ErrorKind::TimeAxisInvalid, "not an ISO-8601 timestamp: '" + s + "'");
    }
    rest.remove_prefix(static_cast<std::size_t>(c2));
  }
  if (rest == "Z" || rest == "+00:00") {
    rest = {};
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!rest.empty() || !ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) {
    throw Error(ErrorKind::TimeAxisInvalid, "not an ISO-8601 UTC timestamp: '" + s + "'");
  }
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

void GridField::validate() const {
  check_axis(lats, "lat");
  check_axis(lons, "lon");
  check_times(times);
  if (values.size() != ntime() * nlat() * nlon()) {
    throw Error(ErrorKind::BundleMalformed, "values size does not match (time, lat, lon) dimensions");
  }
}

void EnsembleField::validate() const {
  if (members < 1) {
    throw Error(ErrorKind::BundleMalformed, "ensemble needs at least one member");
  }
  check_axis(lats, "lat");
  check_axis(lons, "lon");
  check_times(times);
  if (values.size() != members * ntime() * nlat() * nlon()) {
    throw Error(ErrorKind::BundleMalformed, "values size does not match (member, time, lat, lon) dimensions");
  }
}

LoadedField load_grid_bundle(const std::filesystem::path& dir) {
  Header h = read_header(dir);
  const std::size_t per_member = h.times.size() * h.lats.size() * h.lons.size();
  auto values = read_payload(dir, per_member * h.members);
  if (h.members > 1) {
    EnsembleField e;
    e.variable = h.variable;
    e.units = std::move(h.units);
    e.members = h.members;
    e.lats = std::move(h.lats);
    e.lons = std::move(h.lons);
    e.times = std::move(h.times);
    e.values = std::move(values);
    e.percentile = h.percentile;
    return e;
  }
  GridField g;
  g.variable = h.variable;
  g.units = std::move(h.units);
  g.lats = std::move(h.lats);
  g.lons = std::move(h.lons);
  g.times = std::move(h.times);
  g.values = std::move(values);
  g.percentile = h.percentile;
  return g;
}

void write_grid_bundle(const std::filesystem::path& dir, const GridField& field) {
  field.validate();
  write_bundle(dir, field.variable, field.units, field.percentile, 1, field.lats, field.lons, field.times,
               field.values);
}

void write_grid_bundle(const std::filesystem::path& dir, const EnsembleField& field) {
  field.validate();
  write_bundle(dir, field.variable, field.units, field.percentile, field.members, field.lats, field.lons,
               field.times, field.values);
}

GridField load_deterministic(const std::filesystem::path& dir, double p) {
  auto loaded = load_grid_bundle(dir);
  if (auto* e = std::get_if<EnsembleField>(&loaded)) {
    return reduce_percentile(*e, p);
  }
  return std::get<GridField>(std::move(loaded));
}

double percentile_of(std::vector<double> sample, double p) {
  if (!(p >= 0.0 && p <= 100.0)) {
    throw Error(ErrorKind::ValueOutOfRange, "percentile must lie in [0, 100]");
  }
  std::erase_if(sample, [](double v) { return std::isnan(v); });
  if (sample.empty()) {
    return nan();
  }
  std::sort(sample.begin(), sample.end());
  const double rank = (static_cast<double>(sample.size()) - 1.0) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) {
    return sample[lo];
  }
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

GridField reduce_percentile(const EnsembleField& field, double p) {
  if (!(p >= 0.0 && p <= 100.0)) {
    throw Error(ErrorKind::ValueOutOfRange, "percentile must lie in [0, 100]");
  }
  field.validate();
  GridField out;
  out.variable = field.variable;
  out.units = field.units;
  out.lats = field.lats;
  out.lons = field.lons;
  out.times = field.times;
  out.percentile = p;
  const std::size_t slab = field.ntime() * field.nlat() * field.nlon();
  out.values.resize(slab);
  std::vector<double> sample(field.members);
  for (std::size_t k = 0; k < slab; ++k) {
    for (std::size_t m = 0; m < field.members; ++m) {
      sample[m] = field.values[m * slab + k];
    }
    out.values[k] = percentile_of(sample, p);
  }
  return out;
}

GridField crop_domain(const GridField& field, const BoundingBox& bbox) {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < field.nlat(); ++i) {
    if (field.lats[i] >= bbox.lat_min && field.lats[i] <= bbox.lat_max) {
      rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < field.nlon(); ++j) {
    if (field.lons[j] >= bbox.lon_min && field.lons[j] <= bbox.lon_max) {
      cols.push_back(j);
    }
  }
  if (rows.empty() || cols.empty()) {
    throw Error(ErrorKind::EmptyDomain, "bounding box does not intersect the grid");
  }
  GridField out;
  out.variable = field.variable;
  out.units = field.units;
  out.times = field.times;
  out.percentile = field.percentile;
  for (auto i : rows) {
    out.lats.push_back(field.lats[i]);
  }
  for (auto j : cols) {
    out.lons.push_back(field.lons[j]);
  }
  out.values.reserve(field.ntime() * rows.size() * cols.size());
  for (std::size_t t = 0; t < field.ntime(); ++t) {
    for (auto i : rows) {
      for (auto j : cols) {
        out.values.push_back(field.at(t, i, j));
      }
    }
  }
  return out;
}

}  // namespace shipcast
