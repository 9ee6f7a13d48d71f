#include "vscreen/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vscreen/error.hpp"

namespace vscreen {

using nlohmann::json;

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Markdown: return "md";
    case OutputFormat::Csv: return "csv";
  }
  return "";
}

std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "md" || s == "markdown") return OutputFormat::Markdown;
  if (s == "csv") return OutputFormat::Csv;
  return std::nullopt;
}

namespace {

double parse_number(std::string_view s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, std::string(what) + ": '" + std::string(s) + "' is not a number");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  const std::set<std::string_view> keys(allowed);
  for (const auto& [k, _] : obj.items())
    if (!keys.count(k))
      throw Error(ErrorCode::ConfigError, "unknown key '" + k + "' in " + std::string(where));
}

template <class T>
T get_as(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "key '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

GridSpec parse_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  if (parts.size() == 1) {
    const double v = parse_number(parts[0], "grid");
    return {v, v, 1.0};
  }
  if (parts.size() != 3) throw Error(ErrorCode::ConfigError, "grid must be lo:hi:step, got '" + std::string(text) + "'");
  GridSpec g{parse_number(parts[0], "grid lo"), parse_number(parts[1], "grid hi"), parse_number(parts[2], "grid step")};
  make_grid(g.lo, g.hi, g.step);  // validates
  return g;
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  reject_unknown(j,
                 {"data_dir", "norms_path", "thresholds", "seed", "bootstrap_iterations", "iterations", "threads",
                  "leave_one_out_norms", "resample_scheme", "discriminator_outcome", "family_map", "pairs",
                  "output", "l_grid", "f_grid", "accuracy", "synthetic_items"},
                 "config");
  RunConfig c;
  if (j.contains("data_dir")) c.data_dir = get_as<std::string>(j["data_dir"], "data_dir");
  if (j.contains("norms_path")) c.norms_path = get_as<std::string>(j["norms_path"], "norms_path");
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    reject_unknown(t, {"rbs_gt", "l_min", "f_min", "fp_min", "tier2_elevated_sd", "tier2_marked_sd"}, "thresholds");
    if (t.contains("rbs_gt")) c.thresholds.rbs_gt = get_as<double>(t["rbs_gt"], "rbs_gt");
    if (t.contains("l_min")) c.thresholds.l_min = get_as<double>(t["l_min"], "l_min");
    if (t.contains("f_min")) c.thresholds.f_min = get_as<double>(t["f_min"], "f_min");
    if (t.contains("fp_min")) c.thresholds.fp_min = get_as<double>(t["fp_min"], "fp_min");
    if (t.contains("tier2_elevated_sd"))
      c.thresholds.tier2_elevated_sd = get_as<double>(t["tier2_elevated_sd"], "tier2_elevated_sd");
    if (t.contains("tier2_marked_sd"))
      c.thresholds.tier2_marked_sd = get_as<double>(t["tier2_marked_sd"], "tier2_marked_sd");
    c.thresholds.validate();
  }
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("bootstrap_iterations"))
    c.bootstrap_iterations = get_as<std::size_t>(j["bootstrap_iterations"], "bootstrap_iterations");
  if (j.contains("iterations")) c.iterations = get_as<std::size_t>(j["iterations"], "iterations");
  if (j.contains("threads")) c.threads = get_as<unsigned>(j["threads"], "threads");
  if (j.contains("leave_one_out_norms"))
    c.leave_one_out_norms = get_as<bool>(j["leave_one_out_norms"], "leave_one_out_norms");
  if (j.contains("resample_scheme")) {
    const auto s = get_as<std::string>(j["resample_scheme"], "resample_scheme");
    if (s == "stratified") c.resample_scheme = psych::ResampleScheme::Stratified;
    else if (s == "pooled") c.resample_scheme = psych::ResampleScheme::Pooled;
    else throw Error(ErrorCode::ConfigError, "resample_scheme must be 'stratified' or 'pooled'");
  }
  if (j.contains("discriminator_outcome")) {
    const auto s = get_as<std::string>(j["discriminator_outcome"], "discriminator_outcome");
    if (s == "keep") c.discriminator_outcome = psych::DiscriminatorOutcome::Keep;
    else if (s == "bet") c.discriminator_outcome = psych::DiscriminatorOutcome::Bet;
    else throw Error(ErrorCode::ConfigError, "discriminator_outcome must be 'keep' or 'bet'");
  }
  if (j.contains("family_map"))
    c.family_map = get_as<std::map<std::string, std::string>>(j["family_map"], "family_map");
  if (j.contains("pairs")) {
    for (const auto& p : j["pairs"]) {
      if (!p.is_array() || p.size() != 2)
        throw Error(ErrorCode::ConfigError, "each entry of 'pairs' must be [model_a, model_b]");
      c.pairs.emplace_back(get_as<std::string>(p[0], "pairs"), get_as<std::string>(p[1], "pairs"));
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, {"path", "format"}, "output");
    if (o.contains("path")) c.output = get_as<std::string>(o["path"], "output.path");
    if (o.contains("format")) {
      const auto f = parse_format(get_as<std::string>(o["format"], "output.format"));
      if (!f) throw Error(ErrorCode::ConfigError, "output.format must be json, md, or csv");
      c.format = f;
    }
  }
  if (j.contains("l_grid")) c.l_grid = parse_grid(get_as<std::string>(j["l_grid"], "l_grid"));
  if (j.contains("f_grid")) c.f_grid = parse_grid(get_as<std::string>(j["f_grid"], "f_grid"));
  if (j.contains("accuracy")) {
    const auto& a = j["accuracy"];
    reject_unknown(a, {"mode", "a", "b", "lo", "hi"}, "accuracy");
    if (a.contains("mode")) {
      const auto m = get_as<std::string>(a["mode"], "accuracy.mode");
      if (m == "from_norms") c.accuracy.mode = synthetic::AccuracyMode::FromNorms;
      else if (m == "beta") c.accuracy.mode = synthetic::AccuracyMode::Beta;
      else if (m == "uniform") c.accuracy.mode = synthetic::AccuracyMode::Uniform;
      else throw Error(ErrorCode::ConfigError, "accuracy.mode must be from_norms, beta, or uniform");
    }
    if (a.contains("a")) c.accuracy.beta_a = get_as<double>(a["a"], "accuracy.a");
    if (a.contains("b")) c.accuracy.beta_b = get_as<double>(a["b"], "accuracy.b");
    if (a.contains("lo")) c.accuracy.uniform_lo = get_as<double>(a["lo"], "accuracy.lo");
    if (a.contains("hi")) c.accuracy.uniform_hi = get_as<double>(a["hi"], "accuracy.hi");
    c.accuracy.validate();
  }
  if (j.contains("synthetic_items")) c.synthetic_items = get_as<std::size_t>(j["synthetic_items"], "synthetic_items");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace vscreen
