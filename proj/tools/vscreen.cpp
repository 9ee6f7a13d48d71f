// vscreen: validity screening for metacognitive probe data.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vscreen/commands.hpp"
#include "vscreen/error.hpp"
#include "vscreen/report.hpp"

namespace {

struct Flags {
  std::string config;
  std::string data;
  std::string norms;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> bootstrap;
  std::string out;
  std::string format;
  std::optional<double> l_min, f_min, fp_min;
  std::string l_grid, f_grid;
  std::optional<unsigned> threads;
  bool loo_norms = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--data", f.data, "directory of probe CSV files");
  cmd->add_option("--norms", f.norms, "item norms JSON");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "json, md, or csv (default: all the command supports)");
  cmd->add_option("--l-min", f.l_min, "Tier 1 L threshold");
  cmd->add_option("--f-min", f.f_min, "Tier 1 F threshold");
  cmd->add_option("--fp-min", f.fp_min, "Tier 1 Fp threshold");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
}

vscreen::RunConfig resolve(const Flags& f) {
  vscreen::RunConfig c = f.config.empty() ? vscreen::RunConfig{} : vscreen::load_run_config(f.config);
  if (!f.data.empty()) c.data_dir = f.data;
  if (!f.norms.empty()) c.norms_path = f.norms;
  if (f.seed) c.seed = *f.seed;
  if (f.iterations) c.iterations = *f.iterations;
  if (f.bootstrap) c.bootstrap_iterations = *f.bootstrap;
  if (!f.out.empty()) c.output = f.out;
  if (!f.format.empty()) {
    const auto fmt = vscreen::parse_format(f.format);
    if (!fmt) throw vscreen::Error(vscreen::ErrorCode::ConfigError, "--format must be json, md, or csv");
    c.format = fmt;
  }
  if (f.l_min) c.thresholds.l_min = *f.l_min;
  if (f.f_min) c.thresholds.f_min = *f.f_min;
  if (f.fp_min) c.thresholds.fp_min = *f.fp_min;
  if (!f.l_grid.empty()) c.l_grid = vscreen::parse_grid(f.l_grid);
  if (!f.f_grid.empty()) c.f_grid = vscreen::parse_grid(f.f_grid);
  if (f.threads) c.threads = *f.threads;
  if (f.loo_norms) c.leave_one_out_norms = true;
  c.thresholds.validate();
  return c;
}

void report_result(const vscreen::CommandResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& p : r.written) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validity screening for LLM metacognitive probe data"};
  app.set_version_flag("--version", std::string(vscreen::report::tool_version()));
  app.require_subcommand(1);

  Flags flags;
  auto* screen = app.add_subcommand("screen", "compute profiles and tier assignments");
  auto* synthetic = app.add_subcommand("synthetic", "validate the classifier against synthetic policies");
  auto* psych = app.add_subcommand("psych", "psychometric validation report");
  auto* sweep = app.add_subcommand("sweep", "Tier 1 stability over a threshold grid");
  auto* simulate = app.add_subcommand("simulate", "write a synthetic battery (one CSV per policy)");
  for (auto* cmd : {screen, synthetic, psych, sweep, simulate}) add_common(cmd, flags);
  for (auto* cmd : {screen, psych, sweep}) cmd->add_flag("--leave-one-out-norms", flags.loo_norms, "derive each model's consensus without its own responses");
  synthetic->add_option("--iterations", flags.iterations, "replications per policy");
  psych->add_option("--bootstrap-iterations", flags.bootstrap, "bootstrap replicates for the group CI");
  sweep->add_option("--l-grid", flags.l_grid, "L grid lo:hi:step");
  sweep->add_option("--f-grid", flags.f_grid, "F/Fp grid lo:hi:step");

  std::string report_path, figure_name, plot_out;
  auto* plot = app.add_subcommand("plot", "render an SVG figure from a JSON report");
  plot->add_option("--report", report_path, "JSON report")->required();
  plot->add_option("--figure", figure_name, "tiered, sensitivity, contingency, or synthetic")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vscreen::kExitError;
  }

  try {
    vscreen::CommandResult result;
    if (plot->parsed()) {
      const auto fig = vscreen::svg::parse_figure(figure_name);
      if (!fig) throw vscreen::Error(vscreen::ErrorCode::ConfigError, "unknown figure '" + figure_name + "'");
      result = vscreen::cmd_plot(report_path, *fig, plot_out);
    } else {
      const auto config = resolve(flags);
      if (screen->parsed()) result = vscreen::cmd_screen(config);
      else if (synthetic->parsed()) result = vscreen::cmd_synthetic(config);
      else if (psych->parsed()) result = vscreen::cmd_psych(config);
      else if (sweep->parsed()) result = vscreen::cmd_sweep(config);
      else result = vscreen::cmd_simulate(config);
    }
    report_result(result);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return vscreen::kExitError;
}
