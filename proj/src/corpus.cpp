#include "shipcast/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "shipcast/error.hpp"

namespace shipcast {
namespace {

using json = nlohmann::json;

// Nearest index on a regular axis (ascending or descending).
std::size_t nearest(const std::vector<double>& axis, double v) {
  if (axis.size() < 2) {
    return 0;
  }
  const double pos = (v - axis.front()) / (axis.back() - axis.front()) * static_cast<double>(axis.size() - 1);
  return static_cast<std::size_t>(std::clamp(std::lround(pos), 0L, static_cast<long>(axis.size() - 1)));
}

struct Extent {
  double lat_lo, lat_hi, lon_lo, lon_hi;
};

Extent extent_of(const GridField& f) {
  const auto [lat_lo, lat_hi] = std::minmax_element(f.lats.begin(), f.lats.end());
  const auto [lon_lo, lon_hi] = std::minmax_element(f.lons.begin(), f.lons.end());
  return {*lat_lo, *lat_hi, *lon_lo, *lon_hi};
}

void check_timesteps(const GridField& f) {
  if (f.ntime() != kHoursPerDay) {
    throw Error(ErrorKind::TimeAxisInvalid, std::string(to_string(f.variable)) + ": expected 24 hourly steps, got " +
                                                std::to_string(f.ntime()));
  }
}

FrameSet frames_for(const GridField& field, const SeaArea* area, const CategoricalScale& scale, RasterSize size,
                    const std::string& attribute) {
  check_timesteps(field);
  FrameSet fs;
  fs.attribute = attribute;
  if (area) {
    fs.area = area->name;
  }
  fs.mode = scale.mode();
  fs.width = size.width;
  fs.height = size.height;
  fs.palette = scale.palette();
  for (std::size_t t = 0; t < kHoursPerDay; ++t) {
    fs.frames.push_back(rasterize_frame(field, t, area, scale, size));
  }
  fs.layout.push_back({attribute, 0, kHoursPerDay});
  fs.duration_s = 1;
  return fs;
}

GridField prepared(const GridField& field, ScaleMode mode, const ScaleSet& scales) {
  if (field.variable == Variable::WeatherCode && mode == ScaleMode::Categorical) {
    return scales.weather().to_phrase_indices(field);
  }
  return field;
}

}  // namespace

void check_raster_size(RasterSize size) {
  if (size.width <= 0 || size.height <= 0 ||
      static_cast<long>(size.width) * 6 != static_cast<long>(size.height) * 10) {
    throw Error(ErrorKind::AspectRatioInvalid,
                std::to_string(size.width) + "x" + std::to_string(size.height) + " is not 10:6");
  }
}

Image rasterize_frame(const GridField& field, std::size_t t, const SeaArea* mask, const CategoricalScale& scale,
                      RasterSize size) {
  check_raster_size(size);
  if (t >= field.ntime() || field.cells() == 0) {
    throw Error(ErrorKind::TimeAxisInvalid, "hour " + std::to_string(t) + " not in field");
  }
  const std::size_t nlon = field.nlon();
  std::vector<Rgb> cell_color(field.cells(), kBackground);
  for (std::size_t i = 0; i < field.nlat(); ++i) {
    for (std::size_t j = 0; j < nlon; ++j) {
      const double v = field.at(t, i, j);
      if (std::isnan(v) || (mask && !mask->contains(field.lats[i], field.lons[j]))) {
        continue;
      }
      cell_color[i * nlon + j] = scale.color_of(v);
    }
  }
  const Extent e = extent_of(field);
  std::vector<std::size_t> col(static_cast<std::size_t>(size.width));
  std::vector<std::size_t> row(static_cast<std::size_t>(size.height));
  for (int x = 0; x < size.width; ++x) {
    const double lon = e.lon_lo + (x + 0.5) / size.width * (e.lon_hi - e.lon_lo);
    col[static_cast<std::size_t>(x)] = nearest(field.lons, lon);
  }
  for (int y = 0; y < size.height; ++y) {
    const double lat = e.lat_hi - (y + 0.5) / size.height * (e.lat_hi - e.lat_lo);
    row[static_cast<std::size_t>(y)] = nearest(field.lats, lat);
  }
  Image img(size.width, size.height, kBackground);
  for (int y = 0; y < size.height; ++y) {
    const std::size_t base = row[static_cast<std::size_t>(y)] * nlon;
    for (int x = 0; x < size.width; ++x) {
      img.set(x, y, cell_color[base + col[static_cast<std::size_t>(x)]]);
    }
  }
  return img;
}

FrameSet encode_attribute_video(const GridField& field, const SeaArea* area, ScaleMode mode, const ScaleSet& scales,
                                RasterSize size) {
  check_raster_size(size);
  check_timesteps(field);
  return frames_for(prepared(field, mode, scales), area, scales.scale_for(field.variable, mode), size,
                    std::string(to_string(field.variable)));
}

FrameSet encode_combined_wind(const GridField& direction, const GridField& speed, const SeaArea* area,
                              ScaleMode mode, const ScaleSet& scales, RasterSize size) {
  check_raster_size(size);
  check_timesteps(direction);
  check_timesteps(speed);
  FrameSet fs = frames_for(direction, area, scales.scale_for(Variable::WindDirection, mode), size,
                           std::string(to_string(Variable::WindDirection)));
  FrameSet sp = frames_for(speed, area, scales.scale_for(Variable::WindSpeed, mode), size,
                           std::string(to_string(Variable::WindSpeed)));
  fs.attribute = "wind";
  for (auto& f : sp.frames) {
    fs.frames.push_back(std::move(f));
  }
  fs.layout.push_back({std::string(to_string(Variable::WindSpeed)), kHoursPerDay, kHoursPerDay});
  for (const auto& c : sp.palette) {
    if (std::find(fs.palette.begin(), fs.palette.end(), c) == fs.palette.end()) {
      fs.palette.push_back(c);
    }
  }
  fs.duration_s = 2;
  return fs;
}

FrameSet render_pressure_frames(const GridField& pressure, ScaleMode mode, const ScaleSet& scales, RasterSize size,
                                const OverlayGrid& grid) {
  check_raster_size(size);
  FrameSet fs = frames_for(pressure, nullptr, scales.scale_for(Variable::Pressure, mode), size,
                           std::string(to_string(Variable::Pressure)));
  const Extent e = extent_of(pressure);
  auto px = [&](double lon) {
    return std::clamp(static_cast<int>(std::lround((lon - e.lon_lo) / (e.lon_hi - e.lon_lo) * size.width)), 0,
                      size.width - kGraticuleWidth);
  };
  auto py = [&](double lat) {
    return std::clamp(static_cast<int>(std::lround((e.lat_hi - lat) / (e.lat_hi - e.lat_lo) * size.height)), 0,
                      size.height - kGraticuleWidth);
  };
  // One overlay layer, stamped identically onto every frame.
  Image overlay(size.width, size.height, kBackground);
  std::vector<bool> ink(static_cast<std::size_t>(size.width) * static_cast<std::size_t>(size.height), false);
  for (double lon : grid.lon_lines()) {
    overlay.fill_rect(px(lon), 0, kGraticuleWidth, size.height, kOverlayInk);
  }
  for (double lat : grid.lat_lines()) {
    overlay.fill_rect(0, py(lat), size.width, kGraticuleWidth, kOverlayInk);
  }
  const auto lons = grid.lon_lines();
  const auto lats = grid.lat_lines();
  for (std::size_t c = 0; c + 1 < lons.size(); ++c) {
    for (std::size_t r = 0; r + 1 < lats.size(); ++r) {
      const auto label = grid.label_for(0.5 * (lats[r] + lats[r + 1]), 0.5 * (lons[c] + lons[c + 1]));
      draw_text(overlay, px(lons[c]) + kGraticuleWidth + 3, py(lats[r]) + kGraticuleWidth + 3, label, kOverlayInk);
    }
  }
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      ink[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) + static_cast<std::size_t>(x)] =
          overlay.pixel(x, y) == kOverlayInk;
    }
  }
  for (auto& frame : fs.frames) {
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        if (ink[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) + static_cast<std::size_t>(x)]) {
          frame.set(x, y, kOverlayInk);
        }
      }
    }
  }
  return fs;
}

json frameset_manifest(const FrameSet& fs) {
  json frames = json::array();
  for (std::size_t k = 0; k < fs.frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", k);
    frames.push_back(name);
  }
  json layout = json::array();
  for (const auto& b : fs.layout) {
    layout.push_back({{"attribute", b.attribute}, {"first_frame", b.first_frame}, {"count", b.count}});
  }
  json palette = json::array();
  for (const auto& c : fs.palette) {
    palette.push_back(to_hex(c));
  }
  return {{"attribute", fs.attribute},
          {"area", fs.area ? json(*fs.area) : json(nullptr)},
          {"mode", std::string(to_string(fs.mode))},
          {"fps", fs.fps},
          {"duration_s", fs.duration_s},
          {"width", fs.width},
          {"height", fs.height},
          {"frame_count", fs.frames.size()},
          {"frames", frames},
          {"layout", layout},
          {"palette", palette},
          {"background", to_hex(kBackground)}};
}

void write_frameset(const std::filesystem::path& dir, const FrameSet& fs) {
  std::filesystem::create_directories(dir);
  const json manifest = frameset_manifest(fs);
  for (std::size_t k = 0; k < fs.frames.size(); ++k) {
    write_png(dir / manifest["frames"][k].get<std::string>(), fs.frames[k]);
  }
  std::ofstream out(dir / "frameset.json");
  out << manifest.dump(2) << "\n";
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot write " + (dir / "frameset.json").string());
  }
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

std::array<std::size_t, 3> split_sizes(std::size_t n) {
  constexpr std::array<std::size_t, 3> kPercent{70, 15, 15};
  std::array<std::size_t, 3> sizes{};
  std::array<std::size_t, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    sizes[k] = n * kPercent[k] / 100;
    rem[k] = n * kPercent[k] % 100;
    assigned += sizes[k];
  }
  for (std::size_t left = n - assigned; left > 0; --left) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (rem[k] > rem[best]) {
        best = k;
      }
    }
    ++sizes[best];
    rem[best] = 0;
  }
  return sizes;
}

void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Unbiased draw from [0, n) by rejecting the short tail of the 64-bit range.
  auto below = [&rng](std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = rng();
      if (x >= threshold) {
        return x % n;
      }
    }
  };
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[below(i)]);
  }
}

CorpusManifest build_corpus(const std::vector<CorpusInput>& inputs, std::uint64_t seed) {
  if (inputs.empty()) {
    throw Error(ErrorKind::InvalidRequest, "corpus has no entries");
  }
  std::set<std::string> ids;
  for (const auto& in : inputs) {
    if (!ids.insert(in.id).second) {
      throw Error(ErrorKind::DuplicateEntry, "entry id '" + in.id + "' appears twice");
    }
  }
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  seeded_shuffle(order, seed);

  CorpusManifest m;
  m.seed = seed;
  m.counts = split_sizes(inputs.size());
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t c = 0; c < m.counts[s]; ++c) {
      m.entries.push_back({inputs[order[pos++]], static_cast<Split>(s)});
    }
  }
  return m;
}

json to_json(const CorpusManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"id", e.input.id},
                       {"frame_sets", e.input.frame_sets},
                       {"bulletin", e.input.bulletin},
                       {"issue_time", e.input.issue_time},
                       {"split", std::string(to_string(e.split))}});
  }
  return {{"seed", m.seed},
          {"counts",
           {{"train", m.counts[0]}, {"validation", m.counts[1]}, {"test", m.counts[2]}}},
          {"total", m.entries.size()},
          {"split_percent", {70, 15, 15}},
          {"entries", entries},
          {"orphans", m.orphans}};
}

}  // namespace shipcast
