#pragma once

// Frame rendering for video-input models and train/validation/test corpus manifests.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shipcast/categorical.hpp"
#include "shipcast/grid.hpp"
#include "shipcast/image.hpp"
#include "shipcast/overlay.hpp"
#include "shipcast/sea_area.hpp"

namespace shipcast {

inline constexpr int kFramesPerSecond = 24;
inline constexpr int kGraticuleWidth = 2;

struct RasterSize {
  int width{1000};
  int height{600};
};

/// Throws Error(AspectRatioInvalid) unless width:height is exactly 10:6.
void check_raster_size(RasterSize size);

/// Paints hour `t` of `field` onto a raster covering the field's own extent,
/// north up, by nearest-cell sampling. Cells outside `mask` and NaN cells
/// take the background colour.
Image rasterize_frame(const GridField& field, std::size_t t, const SeaArea* mask, const CategoricalScale& scale,
                      RasterSize size = {});

/// A contiguous run of frames showing one attribute.
struct FrameBlock {
  std::string attribute;
  std::size_t first_frame{0};
  std::size_t count{0};
};

struct FrameSet {
  std::string attribute;
  std::optional<std::string> area;  ///< absent for pressure
  ScaleMode mode{ScaleMode::Categorical};
  std::vector<Image> frames;
  int fps{kFramesPerSecond};
  int duration_s{1};
  int width{0};
  int height{0};
  std::vector<FrameBlock> layout;
  std::vector<Rgb> palette;
};

/// 24 frames, one per hour. Weather codes are mapped to phrase indices for
/// categorical frames. Throws Error(TimeAxisInvalid) unless the field has 24 steps.
FrameSet encode_attribute_video(const GridField& field, const SeaArea* area, ScaleMode mode, const ScaleSet& scales,
                                RasterSize size = {});

/// 48 frames over 2 s: 24 direction frames then 24 speed frames.
FrameSet encode_combined_wind(const GridField& direction, const GridField& speed, const SeaArea* area,
                              ScaleMode mode, const ScaleSet& scales, RasterSize size = {});

/// Unmasked pressure frames with the labelled overlay grid burned in.
FrameSet render_pressure_frames(const GridField& pressure, ScaleMode mode, const ScaleSet& scales,
                                RasterSize size = {}, const OverlayGrid& grid = {});

nlohmann::json frameset_manifest(const FrameSet& fs);
/// Writes frame_000.png... and frameset.json into `dir`.
void write_frameset(const std::filesystem::path& dir, const FrameSet& fs);

enum class Split { Train, Validation, Test };
std::string_view to_string(Split s);

struct CorpusInput {
  std::string id;
  std::vector<std::string> frame_sets;  ///< frameset.json paths, relative to the corpus root
  std::string bulletin;                 ///< Bulletin JSON path, relative to the corpus root
  std::string issue_time;
};

struct CorpusEntry {
  CorpusInput input;
  Split split{Split::Train};
};

struct CorpusManifest {
  std::uint64_t seed{0};
  std::array<std::size_t, 3> counts{};
  std::vector<CorpusEntry> entries;
  std::vector<std::string> orphans;
};

/// Largest-remainder apportionment of n over 70/15/15, ties to the earlier split.
std::array<std::size_t, 3> split_sizes(std::size_t n);

/// In-place Fisher-Yates driven by a 64-bit Mersenne Twister.
void seeded_shuffle(std::vector<std::size_t>& items, std::uint64_t seed);

/// Shuffles under `seed` and assigns splits in train, validation, test order.
/// Throws Error(DuplicateEntry), or Error(InvalidRequest) for an empty list.
CorpusManifest build_corpus(const std::vector<CorpusInput>& inputs, std::uint64_t seed);

nlohmann::json to_json(const CorpusManifest& m);

}  // namespace shipcast
