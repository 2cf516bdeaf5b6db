#include "shipcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shipcast/categorical.hpp"

namespace shipcast {
namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(lo + step * static_cast<double>(k));
  }
  return out;
}

GridField blank(Variable v, const SyntheticOptions& o) {
  GridField f;
  f.variable = v;
  f.units = std::string(default_units(v));
  f.lats = axis(o.bbox.lat_min, o.bbox.lat_max, o.spacing_deg);
  f.lons = axis(o.bbox.lon_min, o.bbox.lon_max, o.spacing_deg);
  for (std::size_t t = 0; t < kHoursPerDay; ++t) {
    f.times.push_back(o.start + std::chrono::hours(t));
  }
  f.values.assign(kHoursPerDay * f.cells(), 0.0);
  return f;
}

// A travelling Gaussian bump: centre moves linearly over the day, amplitude ramps.
struct Bump {
  double lat0, lon0, dlat, dlon, radius, amp0, amp1;

  [[nodiscard]] double at(double t, double lat, double lon) const {
    const double s = t / 23.0;
    const double clat = lat0 + dlat * s;
    const double clon = lon0 + dlon * s;
    const double d2 = (lat - clat) * (lat - clat) + (lon - clon) * (lon - clon);
    return (amp0 + (amp1 - amp0) * s) * std::exp(-d2 / (2.0 * radius * radius));
  }
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Bump bump(const BoundingBox& b, double amp_lo, double amp_hi) {
    return {uniform(b.lat_min, b.lat_max), uniform(b.lon_min, b.lon_max), uniform(-6, 6), uniform(-8, 8),
            uniform(1.0, 6.0), uniform(amp_lo, amp_hi), uniform(amp_lo, amp_hi)};
  }

 private:
  std::mt19937_64 rng_;
};

template <class Fn>
void fill(GridField& f, Fn fn) {
  for (std::size_t t = 0; t < f.ntime(); ++t) {
    for (std::size_t i = 0; i < f.nlat(); ++i) {
      for (std::size_t j = 0; j < f.nlon(); ++j) {
        f.at(t, i, j) = fn(static_cast<double>(t), f.lats[i], f.lons[j]);
      }
    }
  }
}

}  // namespace

FieldSet synthetic_fields(const SyntheticOptions& o) {
  FieldSet out;
  auto speed = blank(Variable::WindSpeed, o);
  auto dir = blank(Variable::WindDirection, o);
  auto waves = blank(Variable::WaveHeight, o);
  auto vis = blank(Variable::Visibility, o);
  auto wx = blank(Variable::WeatherCode, o);
  auto pressure = blank(Variable::Pressure, o);
  const double mid_lat = 0.5 * (o.bbox.lat_min + o.bbox.lat_max);
  const double mid_lon = 0.5 * (o.bbox.lon_min + o.bbox.lon_max);
  const Bump low{mid_lat + 2.0, mid_lon - 3.0, 0.0, 4.0, 5.0, -25.0, -31.0};

  if (o.benign) {
    fill(speed, [](double, double, double) { return 12.0; });
    fill(dir, [](double, double, double) { return 225.0; });
    fill(waves, [](double, double, double) { return 1.0; });
    fill(vis, [](double, double, double) { return 20000.0; });
    fill(wx, [](double, double, double) { return 1.0; });
  } else {
    Sampler s(o.seed);
    const double base_speed = s.uniform(0.0, 40.0);
    const double speed_trend = s.uniform(-1.2, 1.2);
    const Bump wind_bump = s.bump(o.bbox, -20.0, 40.0);
    const double base_dir = s.uniform(0.0, 360.0);
    const double veer = s.uniform(-12.0, 12.0);
    const double dir_grad = s.uniform(-10.0, 10.0);
    const double wave_scale = s.uniform(0.03, 0.25);
    const double wave_base = s.uniform(0.0, 3.0);
    const double vis_base = s.uniform(0.0, 25000.0);
    const Bump fog = s.bump(o.bbox, -25000.0, 15000.0);
    const double vis_trend = s.uniform(-800.0, 800.0);
    // Weather: a few hour blocks, each with one code plus a spatial patch.
    const int blocks = s.integer(1, 5);
    std::vector<int> block_codes;
    std::vector<double> block_edges;
    for (int b = 0; b < blocks; ++b) {
      block_codes.push_back(s.integer(0, 30));
      block_edges.push_back(s.uniform(0.0, 24.0));
    }
    std::sort(block_edges.begin(), block_edges.end());
    const Bump patch = s.bump(o.bbox, 0.0, 1.0);
    const int patch_code = s.integer(0, 30);

    fill(speed, [&](double t, double lat, double lon) {
      return std::max(0.0, base_speed + speed_trend * t + wind_bump.at(t, lat, lon));
    });
    fill(dir, [&](double t, double lat, double lon) {
      double d = std::fmod(base_dir + veer * t + dir_grad * (lat - mid_lat + 0.5 * (lon - mid_lon)), 360.0);
      return d < 0.0 ? d + 360.0 : d;
    });
    fill(waves, [&](double t, double lat, double lon) {
      const double w = base_speed + speed_trend * t + wind_bump.at(t, lat, lon);
      return std::clamp(wave_base + wave_scale * std::max(0.0, w), 0.0, 18.0);
    });
    fill(vis, [&](double t, double lat, double lon) {
      return std::clamp(vis_base + vis_trend * t + fog.at(t, lat, lon), 0.0, 40000.0);
    });
    fill(wx, [&](double t, double lat, double lon) {
      if (patch.at(t, lat, lon) > 0.5) {
        return static_cast<double>(patch_code);
      }
      std::size_t b = 0;
      while (b + 1 < block_edges.size() && t >= block_edges[b + 1]) {
        ++b;
      }
      return static_cast<double>(block_codes[b]);
    });
  }
  fill(pressure, [&](double t, double lat, double lon) {
    return 1015.0 + low.at(t, lat, lon) + 0.15 * (lat - mid_lat);
  });

  out.emplace(Variable::WindSpeed, std::move(speed));
  out.emplace(Variable::WindDirection, std::move(dir));
  out.emplace(Variable::WaveHeight, std::move(waves));
  out.emplace(Variable::Visibility, std::move(vis));
  out.emplace(Variable::WeatherCode, std::move(wx));
  if (o.with_pressure) {
    out.emplace(Variable::Pressure, std::move(pressure));
  }
  return out;
}

EnsembleField synthetic_ensemble(const GridField& base, std::size_t members, std::uint64_t seed) {
  EnsembleField e;
  e.variable = base.variable;
  e.units = base.units;
  e.members = members;
  e.lats = base.lats;
  e.lons = base.lons;
  e.times = base.times;
  e.values.reserve(members * base.values.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t m = 0; m < members; ++m) {
    // Codes and bearings do not take additive noise.
    const bool noisy = base.variable != Variable::WeatherCode && base.variable != Variable::WindDirection;
    const double offset = m == 0 || !noisy ? 0.0 : noise(rng);
    for (double v : base.values) {
      e.values.push_back(std::isnan(v) ? v : std::max(0.0, v + offset));
    }
  }
  return e;
}

void write_case(const std::filesystem::path& case_dir, const FieldSet& fields) {
  for (const auto& [v, f] : fields) {
    write_grid_bundle(case_dir / std::string(to_string(v)), f);
  }
}

}  // namespace shipcast
