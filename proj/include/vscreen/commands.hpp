#pragma once

// Command orchestration shared by the CLI and the tests.
//
// Exit codes: 0 clean, 2 when a Tier 1 model is present (screen, psych,
// sweep), 1 on error. `synthetic` returns 1 when any policy misses its
// expected verdict.

#include <filesystem>
#include <string>
#include <vector>

#include "vscreen/classify.hpp"
#include "vscreen/config.hpp"
#include "vscreen/indices.hpp"
#include "vscreen/probe_data.hpp"
#include "vscreen/svg.hpp"

namespace vscreen {

inline constexpr int kExitClean = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTier1 = 2;

struct CommandResult {
  int exit_code = kExitClean;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

// Data directory -> dataset, norms (file or derived), and profiles.
struct LoadedSample {
  Dataset dataset;
  ItemNorms norms;
  ConsensusSet consensus;
  std::vector<ValidityProfile> profiles;
  std::string digest;
};
LoadedSample load_sample(const RunConfig& config);

CommandResult cmd_screen(const RunConfig& config);
CommandResult cmd_synthetic(const RunConfig& config);
CommandResult cmd_psych(const RunConfig& config);
CommandResult cmd_sweep(const RunConfig& config);
CommandResult cmd_plot(const std::filesystem::path& report_path, svg::Figure figure,
                       const std::filesystem::path& out_path);

// One CSV per synthetic policy under
// config.output; a ready-made battery for the other commands.
CommandResult cmd_simulate(const RunConfig& config);

}  // namespace vscreen
