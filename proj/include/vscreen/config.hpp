#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vscreen/classify.hpp"
#include "vscreen/psychometrics.hpp"
#include "vscreen/synthetic.hpp"

namespace vscreen {

enum class OutputFormat { Json, Markdown, Csv };
std::string_view to_string(OutputFormat f);
std::optional<OutputFormat> parse_format(std::string_view s);

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

// "lo:hi:step"; a bare number is a one-point grid.
GridSpec parse_grid(std::string_view text);

struct RunConfig {
  std::filesystem::path data_dir;
  std::optional<std::filesystem::path> norms_path;
  TierThresholds thresholds;
  std::uint64_t seed = 20260101;
  std::size_t bootstrap_iterations = 10000;  // group-comparison CI
  std::size_t iterations = 1000;             // synthetic policy replications
  unsigned threads = 0;
  bool leave_one_out_norms = false;
  psych::ResampleScheme resample_scheme = psych::ResampleScheme::Stratified;
  psych::DiscriminatorOutcome discriminator_outcome = psych::DiscriminatorOutcome::Keep;
  std::map<std::string, std::string> family_map;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::filesystem::path output = "vscreen-out";
  std::optional<OutputFormat> format;  // unset: the command's default set
  GridSpec l_grid{0.93, 0.97, 0.01};
  GridSpec f_grid{0.40, 0.60, 0.05};
  synthetic::AccuracyConfig accuracy;
  std::size_t synthetic_items = 524;
};

// Keys mirror the RunConfig field names; unknown keys raise ConfigError.
// Thresholds use the TierThresholds field names; "output" is
// {"path": ..., "format": ...}.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace vscreen
