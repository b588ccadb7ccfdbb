#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cmlptr/degradation.hpp"
#include "cmlptr/metrics.hpp"
#include "cmlptr/solver.hpp"

namespace cmlptr {

/// Flat key=value run configuration shared by every CLI subcommand.
///
/// band_table is either a built-in name ("landsat7", "ikonos") or a path to a
/// band table file.
struct RunConfig {
  SolverConfig solver;
  Index factor = 8;
  Index kernel_size = 9;
  double sigma = 3.3973;
  std::string band_table = "landsat7";
  double wl_min = 400.0;
  double wl_max = 2500.0;
  std::uint64_t seed = 1;
  double peak = 0.0;  ///< 0: use the reference maximum
  PsnrMode psnr_mode = PsnrMode::band_average;
  double calibration = 1.0;  ///< power applied to the ground truth before simulating
  Index scene_rank = 3;
  Index blocks = 4;
  SpectraKind spectra = SpectraKind::random_semi_unitary;

  static const std::vector<std::string>& keys();

  /// Assigns one key. Unknown keys and unparsable values throw ConfigError.
  void set(std::string_view key, std::string_view value);
  /// Range checks across all fields.
  void validate() const;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_text() const;

  std::vector<SpectralBand> bands() const;
  EvalOptions eval_options() const;
};

}  // namespace cmlptr
