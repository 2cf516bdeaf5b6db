#pragma once

// Seeded synthetic forecast fields for tests, demos and corpus smoke runs.

#include <cstdint>
#include <filesystem>

#include "shipcast/grid.hpp"
#include "shipcast/pipeline.hpp"

namespace shipcast {

struct SyntheticOptions {
  std::uint64_t seed{0};
  BoundingBox bbox{kForecastDomain};
  double spacing_deg{0.25};
  TimePoint start{std::chrono::sys_days{std::chrono::year{2024} / 1 / 1}};
  /// Constant, calm conditions everywhere (pressure still carries one low).
  bool benign{false};
  bool with_pressure{true};
};

/// Hourly fields for all six variables on a regular grid covering `bbox`.
FieldSet synthetic_fields(const SyntheticOptions& options);

/// Wraps a deterministic field into an ensemble by adding seeded member noise.
EnsembleField synthetic_ensemble(const GridField& base, std::size_t members, std::uint64_t seed);

/// Writes `<case_dir>/<variable>/` bundles.
void write_case(const std::filesystem::path& case_dir, const FieldSet& fields);

}  // namespace shipcast
