#include "vscreen/commands.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "vscreen/error.hpp"
#include "vscreen/psychometrics.hpp"
#include "vscreen/report.hpp"
#include "vscreen/rng.hpp"
#include "vscreen/synthetic.hpp"

namespace vscreen {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content, CommandResult& result) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
  result.written.push_back(path);
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir.string() + "': " + ec.message());
}

bool wants(const RunConfig& c, OutputFormat f) { return !c.format || *c.format == f; }

report::ArtifactMeta meta_for(const RunConfig& c, std::string command, std::string digest) {
  return {std::move(command), c.seed, c.thresholds, std::move(digest)};
}

}  // namespace

LoadedSample load_sample(const RunConfig& config) {
  if (config.data_dir.empty()) throw Error(ErrorCode::ConfigError, "no data directory given (--data)");
  config.thresholds.validate();
  auto ds = Dataset::build(load_probe_directory(config.data_dir, config.threads));
  ItemNorms norms = config.norms_path ? load_norms(*config.norms_path) : compute_item_norms(ds);
  DatasetProfileOptions opts;
  opts.leave_one_out_norms = config.leave_one_out_norms;
  opts.threads = config.threads;
  auto profiles = compute_profiles(ds, norms, opts);
  auto consensus = consensus_items(norms);
  return {std::move(ds), std::move(norms), std::move(consensus), std::move(profiles),
          report::digest_inputs(config.data_dir, config.norms_path)};
}

CommandResult cmd_screen(const RunConfig& config) {
  const auto sample = load_sample(config);
  const auto classification = classify_sample(sample.profiles, config.thresholds);
  const auto meta = meta_for(config, "screen", sample.digest);

  CommandResult result;
  prepare_output(config.output);
  if (wants(config, OutputFormat::Json))
    write_file(config.output / "screen.json",
               report::screen_json_document(meta, sample.profiles, classification, sample.dataset.warnings()), result);
  if (wants(config, OutputFormat::Markdown))
    write_file(config.output / "screen.md", report::screen_markdown(meta, sample.profiles, classification), result);
  if (wants(config, OutputFormat::Csv))
    write_file(config.output / "profiles.csv", report::profiles_csv(meta, sample.profiles, classification), result);

  result.warnings = sample.dataset.warnings();
  result.warnings.insert(result.warnings.end(), classification.warnings.begin(), classification.warnings.end());
  result.exit_code = classification.tier1_models().empty() ? kExitClean : kExitTier1;
  return result;
}

CommandResult cmd_synthetic(const RunConfig& config) {
  config.thresholds.validate();
  config.accuracy.validate();

  std::vector<synthetic::SyntheticItem> items;
  ConsensusSet consensus;
  std::string digest;
  if (config.norms_path || !config.data_dir.empty()) {
    // Norms from the file, else derived from the data directory.
    std::optional<Dataset> ds;
    if (!config.data_dir.empty()) ds = Dataset::build(load_probe_directory(config.data_dir, config.threads));
    const auto norms = config.norms_path ? load_norms(*config.norms_path) : compute_item_norms(*ds);
    std::map<std::string, Track, std::less<>> tracks;
    if (ds)
      for (const auto& item : ds->items()) tracks.emplace(item, ds->track_of(item));
    items = synthetic::items_from_norms(norms, tracks);
    consensus = consensus_items(norms);
    digest = report::digest_inputs(config.data_dir, config.norms_path);
  } else {
    if (config.accuracy.mode == synthetic::AccuracyMode::FromNorms)
      throw Error(ErrorCode::ConfigError, "accuracy mode 'from_norms' needs a norms file (--norms)");
    items = synthetic::sample_item_accuracies(config.accuracy, config.synthetic_items, config.seed);
    consensus = synthetic::consensus_from_accuracy(items);
    digest = report::Digest{}.hex();
  }

  std::vector<synthetic::PolicySpec> policies;
  for (auto p : synthetic::kAllPolicies) policies.push_back(synthetic::PolicySpec::defaults(p));
  synthetic::ValidationOptions opts;
  opts.iterations = config.iterations;
  opts.seed = config.seed;
  opts.thresholds = config.thresholds;
  opts.threads = config.threads;
  const auto vm = synthetic::run_policy_validation(policies, items, consensus, opts);
  const auto meta = meta_for(config, "synthetic", digest);

  CommandResult result;
  prepare_output(config.output);
  if (wants(config, OutputFormat::Json))
    write_file(config.output / "synthetic.json", report::validation_json_document(meta, vm), result);
  if (wants(config, OutputFormat::Csv))
    write_file(config.output / "synthetic.csv", report::validation_csv(meta, vm), result);
  if (wants(config, OutputFormat::Markdown))
    write_file(config.output / "synthetic.md", report::validation_markdown(meta, vm), result);
  result.warnings = vm.warnings;
  result.exit_code = vm.all_pass() ? kExitClean : kExitError;
  return result;
}

CommandResult cmd_psych(const RunConfig& config) {
  if (config.format == OutputFormat::Csv)
    throw Error(ErrorCode::ConfigError, "psych writes json or md; csv is not available for this report");
  const auto sample = load_sample(config);
  const auto classification = classify_sample(sample.profiles, config.thresholds);

  psych::PsychometricOptions opts;
  opts.group.bootstrap_iterations = config.bootstrap_iterations;
  opts.group.seed = config.seed;
  opts.group.scheme = config.resample_scheme;
  opts.group.threads = config.threads;
  opts.discriminator_outcome = config.discriminator_outcome;
  opts.family_map = config.family_map;
  opts.pairs = config.pairs;
  const auto rep = psych::run_psychometrics(sample.dataset, sample.profiles, classification, sample.consensus, opts);
  const auto meta = meta_for(config, "psych", sample.digest);

  CommandResult result;
  prepare_output(config.output);
  if (wants(config, OutputFormat::Json))
    write_file(config.output / "psych.json", report::psych_json_document(meta, rep, sample.profiles, classification),
               result);
  if (wants(config, OutputFormat::Markdown))
    write_file(config.output / "psych.md", report::psych_markdown(meta, rep, sample.profiles, classification),
               result);
  result.warnings = classification.warnings;
  result.warnings.insert(result.warnings.end(), rep.warnings.begin(), rep.warnings.end());
  result.exit_code = classification.tier1_models().empty() ? kExitClean : kExitTier1;
  return result;
}

CommandResult cmd_sweep(const RunConfig& config) {
  const auto sample = load_sample(config);
  const auto l_grid = make_grid(config.l_grid.lo, config.l_grid.hi, config.l_grid.step);
  const auto f_grid = make_grid(config.f_grid.lo, config.f_grid.hi, config.f_grid.step);
  const auto sweep = threshold_sweep(sample.profiles, l_grid, f_grid, config.thresholds);
  const auto meta = meta_for(config, "sweep", sample.digest);

  CommandResult result;
  prepare_output(config.output);
  if (wants(config, OutputFormat::Json))
    write_file(config.output / "sweep.json", report::sweep_json_document(meta, sweep, sample.profiles), result);
  if (wants(config, OutputFormat::Csv))
    write_file(config.output / "sweep.csv", report::sweep_csv(meta, sweep), result);
  if (wants(config, OutputFormat::Markdown))
    write_file(config.output / "sweep.md", report::sweep_markdown(meta, sweep), result);

  bool tier1 = false;
  for (const auto& p : sample.profiles) tier1 = tier1 || !tier1_flags(p.overall, config.thresholds).empty();
  if (!sweep.stable) result.warnings.push_back("Tier 1 membership changes across the threshold grid");
  result.exit_code = tier1 ? kExitTier1 : kExitClean;
  return result;
}

CommandResult cmd_plot(const std::filesystem::path& report_path, svg::Figure figure,
                       const std::filesystem::path& out_path) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open report '" + report_path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  report::Json doc;
  try {
    doc = report::Json::parse(buf.str());
  } catch (const report::Json::exception& e) {
    throw Error(ErrorCode::ParseError, report_path.string() + ": " + e.what());
  }
  const auto svg_text = svg::render(doc, figure);
  CommandResult result;
  if (out_path.has_parent_path()) prepare_output(out_path.parent_path());
  write_file(out_path, svg_text, result);
  return result;
}

CommandResult cmd_simulate(const RunConfig& config) {
  config.accuracy.validate();
  if (config.accuracy.mode == synthetic::AccuracyMode::FromNorms)
    throw Error(ErrorCode::ConfigError, "simulate samples item accuracies; use accuracy mode beta or uniform");
  const auto items = synthetic::sample_item_accuracies(config.accuracy, config.synthetic_items, config.seed);

  CommandResult result;
  prepare_output(config.output);
  for (std::size_t k = 0; k < synthetic::kAllPolicies.size(); ++k) {
    const auto spec = synthetic::PolicySpec::defaults(synthetic::kAllPolicies[k]);
    const std::string name(synthetic::to_string(spec.policy));
    CounterRng rng(config.seed, (std::uint64_t{0x5157} << 32) | k);
    const auto records = synthetic::generate_policy_dataset(spec, items, rng, name);
    std::ostringstream out;
    write_probe_csv(out, records);
    write_file(config.output / (name + ".csv"), out.str(), result);
  }
  return result;
}

}  // namespace vscreen
