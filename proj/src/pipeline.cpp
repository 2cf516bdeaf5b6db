#include "shipcast/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace shipcast {
namespace {

constexpr std::string_view kWindMaxKey = "wind_speed_max";
constexpr std::string_view kWeatherKey = "weather_index";

std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void append_series(std::string& out, std::string_view key, const std::optional<AreaSeries>& s) {
  if (!s) {
    return;
  }
  out += key;
  out += ':';
  for (double v : s->values) {
    out += ' ';
    out += format_number(v);
  }
  out += '\n';
}

[[noreturn]] void rethrow_with(const Error& e, const std::string& context) {
  const std::string what = e.what();
  const auto prefix = std::string(to_string(e.kind())) + ": ";
  throw Error(e.kind(), context + ": " + (what.starts_with(prefix) ? what.substr(prefix.size()) : what));
}

}  // namespace

FieldSet load_case(const std::filesystem::path& case_dir, const PercentileTable& percentiles) {
  if (!std::filesystem::is_directory(case_dir)) {
    throw Error(ErrorKind::IoError, "case directory not found: " + case_dir.string());
  }
  FieldSet out;
  for (auto v : {Variable::WindSpeed, Variable::WindDirection, Variable::WaveHeight, Variable::Visibility,
                 Variable::WeatherCode, Variable::Pressure}) {
    const auto dir = case_dir / std::string(to_string(v));
    if (!std::filesystem::exists(dir)) {
      continue;
    }
    try {
      GridField f = load_deterministic(dir, percentiles.for_variable(v));
      if (f.variable != v) {
        throw Error(ErrorKind::BundleMalformed, "header declares " + std::string(to_string(f.variable)));
      }
      out.emplace(v, crop_domain(f));
    } catch (const Error& e) {
      rethrow_with(e, std::string(to_string(v)));
    }
  }
  for (auto v : kRequiredVariables) {
    if (!out.contains(v)) {
      throw Error(ErrorKind::MissingAttribute,
                  std::string(to_string(v)) + ": no bundle under " + case_dir.string());
    }
  }
  return out;
}

AreaInputs area_inputs(const FieldSet& fields, const SeaArea& area, const WeatherCodeMap& weather) {
  AreaInputs in;
  auto series = [&](Variable v, Reducer r) -> std::optional<AreaSeries> {
    const auto it = fields.find(v);
    if (it == fields.end()) {
      return std::nullopt;
    }
    try {
      if (v == Variable::WeatherCode) {
        return area_series(weather.to_phrase_indices(it->second), area, r);
      }
      return area_series(it->second, area, r);
    } catch (const Error& e) {
      rethrow_with(e, area.name + "/" + std::string(to_string(v)));
    }
  };
  in.wind_speed = series(Variable::WindSpeed, Reducer::ArealMean);
  in.wind_speed_max = series(Variable::WindSpeed, Reducer::ArealMax);
  in.wind_direction = series(Variable::WindDirection, Reducer::ArealCircularMean);
  in.wave_height = series(Variable::WaveHeight, Reducer::ArealMean);
  in.visibility = series(Variable::Visibility, Reducer::ArealMean);
  in.weather = series(Variable::WeatherCode, Reducer::ArealMax);
  return in;
}

std::string data_summary(const AreaInputs& inputs, std::string_view area) {
  std::string out = "area: " + std::string(area) + "\n";
  append_series(out, to_string(Variable::WindSpeed), inputs.wind_speed);
  append_series(out, kWindMaxKey, inputs.wind_speed_max);
  append_series(out, to_string(Variable::WindDirection), inputs.wind_direction);
  append_series(out, to_string(Variable::WaveHeight), inputs.wave_height);
  append_series(out, to_string(Variable::Visibility), inputs.visibility);
  append_series(out, kWeatherKey, inputs.weather);
  return out;
}

ParsedSummary parse_data_summary(std::string_view text) {
  ParsedSummary out;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::InvalidRequest, "summary line without ':': " + line);
    }
    const std::string key = line.substr(0, colon);
    std::string rest = line.substr(colon + 1);
    if (key == "area") {
      const auto b = rest.find_first_not_of(' ');
      const auto e = rest.find_last_not_of(" \r");
      out.area = b == std::string::npos ? "" : rest.substr(b, e - b + 1);
      continue;
    }
    AreaSeries s;
    s.area = out.area;
    std::optional<AreaSeries>* slot = nullptr;
    if (key == to_string(Variable::WindSpeed)) {
      slot = &out.inputs.wind_speed;
      s.variable = Variable::WindSpeed;
    } else if (key == kWindMaxKey) {
      slot = &out.inputs.wind_speed_max;
      s.variable = Variable::WindSpeed;
      s.reducer = Reducer::ArealMax;
    } else if (key == to_string(Variable::WindDirection)) {
      slot = &out.inputs.wind_direction;
      s.variable = Variable::WindDirection;
      s.reducer = Reducer::ArealCircularMean;
    } else if (key == to_string(Variable::WaveHeight)) {
      slot = &out.inputs.wave_height;
      s.variable = Variable::WaveHeight;
    } else if (key == to_string(Variable::Visibility)) {
      slot = &out.inputs.visibility;
      s.variable = Variable::Visibility;
    } else if (key == kWeatherKey) {
      slot = &out.inputs.weather;
      s.variable = Variable::WeatherCode;
      s.reducer = Reducer::ArealMax;
    } else {
      throw Error(ErrorKind::InvalidRequest, "unknown summary key '" + key + "'");
    }
    std::istringstream nums(rest);
    std::string tok;
    std::size_t n = 0;
    while (nums >> tok) {
      double v = 0.0;
      const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
        if (tok == "nan") {
          v = std::nan("");
        } else {
          throw Error(ErrorKind::InvalidRequest, key + ": bad number '" + tok + "'");
        }
      }
      if (n >= kHoursPerDay) {
        throw Error(ErrorKind::InvalidRequest, key + ": more than 24 values");
      }
      s.values[n++] = v;
    }
    if (n != kHoursPerDay) {
      throw Error(ErrorKind::InvalidRequest, key + ": expected 24 values, got " + std::to_string(n));
    }
    *slot = s;
  }
  if (out.area.empty()) {
    throw Error(ErrorKind::InvalidRequest, "summary names no area");
  }
  return out;
}

Forecast generate_forecast(const FieldSet& fields, const AreaRegistry& registry, const ScaleSet& scales) {
  Forecast out;
  for (auto v : kRequiredVariables) {
    if (!fields.contains(v)) {
      throw Error(ErrorKind::MissingAttribute, std::string(to_string(v)) + ": field not supplied");
    }
  }
  for (const auto& area : registry.areas()) {
    const auto inputs = area_inputs(fields, area, scales.weather());
    try {
      out.per_area.push_back(generate_area_bulletin(inputs, area.name, scales));
    } catch (const Error& e) {
      rethrow_with(e, area.name);
    }
  }
  out.groups = consolidate(out.per_area, registry);
  if (const auto it = fields.find(Variable::Pressure); it != fields.end()) {
    try {
      out.synopsis = generate_synopsis(it->second);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptySynopsis) {
        rethrow_with(e, "pressure");
      }
      out.synopsis = Synopsis{};
    }
  }
  return out;
}

std::string render_forecast(const Forecast& f, const AreaRegistry& registry) {
  std::string out;
  if (f.synopsis) {
    out += render_synopsis(*f.synopsis) + "\n";
  }
  for (const auto& b : f.groups) {
    out += render_bulletin(b, &registry) + "\n";
  }
  return out;
}

ParsedForecast parse_forecast(std::string_view text, const AreaRegistry& registry) {
  ParsedForecast out;
  std::vector<std::string> areas;
  std::string body;
  auto flush = [&] {
    if (!areas.empty()) {
      std::string heading;
      for (const auto& a : areas) {
        heading += (heading.empty() ? "" : ", ") + a;
      }
      out.groups.push_back(parse_bulletin(heading + "." + body, registry));
    }
    body.clear();
  };
  for (const auto& f : segment_forecast(text, registry)) {
    if (f.kind == FragmentKind::Synopsis) {
      const auto s = parse_synopsis(f.text);
      out.synopsis = s;
      continue;
    }
    if (f.areas != areas || f.kind == FragmentKind::Gale) {
      flush();
      areas = f.areas;
    }
    body += " " + f.text;
  }
  flush();
  return out;
}

}  // namespace shipcast
