#pragma once

// Batch front-end: configuration files, the five subcommands and their
// JSON/CSV outputs. File layouts are described in docs/schemas.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ghz3/counts.hpp"
#include "ghz3/experiment.hpp"
#include "ghz3/spectral.hpp"
#include "ghz3/tomography.hpp"

namespace ghz3::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct DipSettings {
  double baseline = 1.0;   // counts/s far from the dip
  double width_m = 8e-4;   // 1/e half-width of the Gaussian dip
  double center_m = 0.0;
};

// Rate file consumed by `counts`.
struct RateFile {
  RateModel model;
  std::optional<double> fourfold_observed;  // counts per window
  std::optional<double> pair_rate_hz;
};

struct RunConfig {
  PipelineConfig pipeline;
  SpectralModel spectral;
  DipSettings dip;
  NoiseParams noise;
  std::optional<RateFile> rates;  // used by `counts` when present
  std::uint64_t seed = kDefaultSeed;
};

// Both parsers validate every sub-config and throw ConfigError on malformed
// JSON, unknown keys, wrong types or invalid values. Absent keys keep their
// defaults.
RunConfig parse_run_config(std::string_view text);
RateFile parse_rate_file(std::string_view text);

struct HomRange {
  double x_min = -3e-3;
  double x_max = 3e-3;
  int steps = 121;
};

// Each command writes its files into `out` (created if missing).
void cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
void cmd_hom(const RunConfig& cfg, const HomRange& range, const std::filesystem::path& out);
// events == 0 uses expected counts (infinite statistics, sigma 0).
void cmd_witness(const RunConfig& cfg, std::int64_t events, const std::filesystem::path& out);
void cmd_mermin(const RunConfig& cfg, const std::filesystem::path& out);
void cmd_counts(const RateFile& rates, const std::filesystem::path& out);

// Entry point. Returns 0 on success, 2 for usage or configuration errors and
// 1 for any other failure.
int run(int argc, const char* const* argv);

// Value rounded to 12 significant digits; the form every emitted number takes.
double round12(double v);

}  // namespace ghz3::cli
