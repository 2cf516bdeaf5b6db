// Writes seeded synthetic case bundles: <out>/<case_id>/<variable>/.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shipcast/error.hpp"
#include "shipcast/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write synthetic grid bundles for testing the pipeline", "shipcast-synth"};
  std::string out = "bundles";
  int cases = 1;
  std::uint64_t seed = 1;
  double spacing = 0.25;
  bool benign = false;
  std::size_t members = 1;
  app.add_option("--out", out, "Directory to create cases in")->capture_default_str();
  app.add_option("--cases", cases, "Number of daily cases")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed")->capture_default_str();
  app.add_option("--spacing", spacing, "Grid spacing in degrees")->capture_default_str();
  app.add_option("--members", members, "Ensemble members per bundle")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--benign", benign, "Constant calm conditions");
  CLI11_PARSE(app, argc, argv);

  try {
    for (int c = 0; c < cases; ++c) {
      shipcast::SyntheticOptions o;
      o.seed = seed + static_cast<std::uint64_t>(c);
      o.spacing_deg = spacing;
      o.benign = benign;
      o.start += std::chrono::days(c);
      const auto fields = shipcast::synthetic_fields(o);
      const std::string id = "case_" + std::string(c < 10 ? "00" : c < 100 ? "0" : "") + std::to_string(c);
      const auto dir = std::filesystem::path(out) / id;
      if (members > 1) {
        for (const auto& [v, f] : fields) {
          shipcast::write_grid_bundle(dir / std::string(shipcast::to_string(v)),
                                      shipcast::synthetic_ensemble(f, members, o.seed * 31 + static_cast<int>(v)));
        }
      } else {
        shipcast::write_case(dir, fields);
      }
      std::cerr << "wrote " << dir.string() << "\n";
    }
  } catch (const shipcast::Error& e) {
    std::cerr << "shipcast-synth: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
