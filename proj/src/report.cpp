#include "vscreen/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vscreen/error.hpp"

namespace vscreen::report {

std::string_view tool_version() { return VSCREEN_VERSION; }

void Digest::update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
}

void Digest::update_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  update(path.filename().string());
  update(std::string_view("\0", 1));
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
}

std::string Digest::hex() const {
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(state_));
  return out;
}

std::string digest_inputs(const std::filesystem::path& data_dir,
                          const std::optional<std::filesystem::path>& norms_path) {
  Digest d;
  if (!data_dir.empty() && std::filesystem::is_directory(data_dir)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(data_dir))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) d.update_file(f);
  }
  if (norms_path) d.update_file(*norms_path);
  return d.hex();
}

std::string fixed(std::optional<double> v, int precision) {
  if (!v || !std::isfinite(*v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  std::string s = buf;
  // Avoid "-0.000".
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

Json optional_json(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

Json thresholds_json(const TierThresholds& th) {
  return Json{{"rbs_gt", th.rbs_gt},
              {"l_min", th.l_min},
              {"f_min", th.f_min},
              {"fp_min", th.fp_min},
              {"tier2_elevated_sd", th.tier2_elevated_sd},
              {"tier2_marked_sd", th.tier2_marked_sd}};
}

Json meta_json(const ArtifactMeta& meta) {
  return Json{{"tool", kToolName},
              {"version", tool_version()},
              {"command", meta.command},
              {"seed", meta.seed},
              {"thresholds", thresholds_json(meta.thresholds)},
              {"input_digest", meta.input_digest}};
}

Json correlation_json(const std::optional<stats::CorrelationResult>& c) {
  if (!c) return nullptr;
  return Json{{"r", c->r},
              {"n", c->n},
              {"t", optional_json(c->t_stat)},
              {"df", c->df},
              {"p", c->p_two_tailed}};
}

Json index_set_json(const IndexSet& s) {
  Json j = Json::object();
  for (int i = 0; i <= static_cast<int>(IndexId::Accuracy); ++i) {
    const auto id = static_cast<IndexId>(i);
    j[std::string(to_string(id))] = optional_json(s.get(id));
  }
  j["n"] = s.n;
  j["n_correct"] = s.n_correct;
  j["n_incorrect"] = s.n_incorrect;
  j["n_consensus"] = s.n_consensus;
  return j;
}

Json profile_json(const ValidityProfile& p) {
  Json j;
  j["model_id"] = p.model_id;
  j["overall"] = index_set_json(p.overall);
  Json tracks = Json::object();
  for (const auto& [t, s] : p.per_track) tracks[std::string(to_string(t))] = index_set_json(s);
  j["per_track"] = tracks;
  Json icn;
  icn["switches"] = p.icn.switches ? Json(*p.icn.switches) : Json(nullptr);
  Json labels = Json::object();
  for (const auto& [t, ph] : p.icn.labels) labels[std::string(to_string(t))] = to_string(ph);
  icn["labels"] = labels;
  j["ICN"] = icn;
  j["L_retro"] = optional_json(p.split.L_retro);
  j["L_prosp"] = optional_json(p.split.L_prosp);
  return j;
}

Json profiles_json(std::span<const ValidityProfile> profiles) {
  Json arr = Json::array();
  for (const auto& p : profiles) arr.push_back(profile_json(p));
  return arr;
}

Json classification_json(const Classification& c) {
  Json j;
  Json assignments = Json::array();
  for (const auto& a : c.assignments) {
    Json rules = Json::array();
    for (const auto& r : a.triggered_rules)
      rules.push_back(Json{{"index", to_string(r.index)},
                           {"value", r.value},
                           {"threshold", r.threshold},
                           {"tier", r.tier1 ? 1 : 2}});
    assignments.push_back(Json{{"model_id", a.model_id}, {"tier", to_string(a.tier)}, {"triggered_rules", rules}});
  }
  j["assignments"] = assignments;
  Json ref = Json::object();
  for (const auto& [id, st] : c.reference_stats)
    ref[std::string(to_string(id))] = Json{{"mean", st.mean}, {"sd", st.sd}, {"n", st.n}};
  j["tier2_applied"] = c.tier2_applied;
  j["reference_stats"] = ref;
  Json counts = Json::object();
  for (Tier t : {Tier::Tier1Invalid, Tier::Tier2Marked, Tier::Tier2Elevated, Tier::Valid, Tier::Unclassifiable})
    counts[std::string(to_string(t))] =
        std::count_if(c.assignments.begin(), c.assignments.end(), [&](const TierAssignment& a) { return a.tier == t; });
  j["counts"] = counts;
  j["warnings"] = c.warnings;
  return j;
}

Json sweep_json(const SweepResult& sweep) {
  Json points = Json::array();
  for (const auto& p : sweep.points)
    points.push_back(Json{{"l_min", p.l_min}, {"f_min", p.f_min}, {"fp_min", p.f_min},
                          {"tier1", std::vector<std::string>(p.tier1.begin(), p.tier1.end())}});
  return Json{{"stable", sweep.stable}, {"points", points}};
}

Json validation_json(const synthetic::ValidationMatrix& vm) {
  Json j;
  j["iterations"] = vm.iterations;
  j["seed"] = vm.seed;
  j["all_pass"] = vm.all_pass();
  Json policies = Json::array();
  for (const auto& p : vm.policies) {
    Json pj;
    pj["policy"] = synthetic::to_string(p.spec.policy);
    Json params = Json::object();
    for (const auto& [k, v] : p.spec.parameters) params[k] = v;
    pj["parameters"] = params;
    Json summaries = Json::object();
    for (const auto& [name, s] : p.summaries)
      summaries[name] = Json{{"mean", s.n_defined ? Json(s.mean) : Json(nullptr)},
                             {"sd", s.n_defined ? Json(s.sd) : Json(nullptr)},
                             {"n_defined", s.n_defined},
                             {"ci_low", s.n_defined ? Json(s.ci_low) : Json(nullptr)},
                             {"ci_high", s.n_defined ? Json(s.ci_high) : Json(nullptr)}};
    pj["summaries"] = summaries;
    Json fired = Json::array();
    for (const auto& r : p.fired)
      fired.push_back(Json{{"index", to_string(r.index)}, {"value", r.value}, {"threshold", r.threshold}});
    pj["fired"] = fired;
    Json snapped = Json::array();
    for (auto id : p.snapped) snapped.push_back(to_string(id));
    pj["snapped_to_threshold"] = snapped;
    pj["per_iteration_flag_rate"] = p.per_iteration_flag_rate;
    pj["verdict"] = synthetic::to_string(p.verdict);
    pj["expected"] = synthetic::to_string(p.expected);
    pj["pass"] = p.pass();
    policies.push_back(pj);
  }
  j["policies"] = policies;
  j["warnings"] = vm.warnings;
  return j;
}

std::vector<RetroProspectiveRow> retro_prospective_rows(std::span<const ValidityProfile> profiles,
                                                        const TierThresholds& th) {
  std::vector<RetroProspectiveRow> rows;
  for (const auto& p : profiles) {
    RetroProspectiveRow r{p.model_id, p.split.L_retro, p.split.L_prosp, std::nullopt};
    if (r.L_retro && r.L_prosp) r.consistent = (*r.L_retro >= th.l_min) == (*r.L_prosp >= th.l_min);
    rows.push_back(r);
  }
  return rows;
}

namespace {

Json pair_json(const psych::PairCorrelation& p) {
  return Json{{"a", to_string(p.a)}, {"b", to_string(p.b)}, {"result", correlation_json(p.result)},
              {"n_dropped", p.n_dropped}};
}

Json regression_json(const std::optional<stats::RegressionResult>& r) {
  if (!r) return nullptr;
  return Json{{"coefficients", r->coefficients}, {"r_squared", r->r_squared}, {"n", r->n}, {"k", r->k}};
}

Json matrix_json(const stats::Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Json contingency_json(const psych::Contingency& c) {
  return Json{{"keep_bet", c.keep_bet},
              {"keep_no_bet", c.keep_no_bet},
              {"withdraw_bet", c.withdraw_bet},
              {"withdraw_no_bet", c.withdraw_no_bet},
              {"total", c.total()}};
}

Json discriminator_count_json(const psych::TrackDiscriminatorCount& c) {
  return Json{{"items", c.items},
              {"tested", c.tested},
              {"significant", c.significant},
              {"undefined", c.undefined},
              {"insufficient", c.insufficient}};
}

}  // namespace

Json psych_json(const psych::PsychometricReport& rep, std::span<const ValidityProfile> profiles,
                const Classification& classification, const TierThresholds& th) {
  Json j;
  // Reliability.
  Json alphas = Json::object();
  for (const auto& a : rep.reliability.alphas)
    alphas[std::string(to_string(a.index))] = Json{{"alpha", optional_json(a.alpha)},
                                                   {"n_models", a.n_models},
                                                   {"n_dropped", a.n_dropped},
                                                   {"n_parts", a.n_parts},
                                                   {"note", a.note}};
  Json split = Json::array();
  for (const auto& s : rep.reliability.split_half)
    split.push_back(Json{{"index", to_string(s.index)},
                         {"track", to_string(s.track)},
                         {"r", optional_json(s.r)},
                         {"r_sb", optional_json(s.r_sb)},
                         {"n_models", s.n_models},
                         {"n_dropped", s.n_dropped}});
  j["reliability"] = Json{{"alpha", alphas}, {"split_half", split}};

  // Scale correlations.
  Json corr;
  Json order = Json::array();
  for (auto id : rep.correlations.order) order.push_back(to_string(id));
  corr["order"] = order;
  Json rmat = Json::array(), pmat = Json::array();
  const std::size_t k = rep.correlations.order.size();
  for (std::size_t i = 0; i < k; ++i) {
    Json rrow = Json::array(), prow = Json::array();
    for (std::size_t jx = 0; jx < k; ++jx) {
      const auto& c = rep.correlations.at(i, jx);
      rrow.push_back(c ? Json(c->r) : Json(nullptr));
      prow.push_back(c ? Json(c->p_two_tailed) : Json(nullptr));
    }
    rmat.push_back(rrow);
    pmat.push_back(prow);
  }
  corr["r"] = rmat;
  corr["p"] = pmat;
  Json conv = Json::array(), disc = Json::array();
  for (const auto& p : rep.correlations.convergent) conv.push_back(pair_json(p));
  for (const auto& p : rep.correlations.discriminant) disc.push_back(pair_json(p));
  corr["convergent"] = conv;
  corr["discriminant"] = disc;
  j["scale_correlations"] = corr;

  // PCA.
  if (rep.pca) {
    Json vars = Json::array(), dropped = Json::array();
    for (auto id : rep.pca->variables) vars.push_back(to_string(id));
    for (auto id : rep.pca->dropped) dropped.push_back(to_string(id));
    j["pca"] = Json{{"variables", vars},
                    {"dropped", dropped},
                    {"n_cases", rep.pca->n_cases},
                    {"eigenvalues", rep.pca->eigenvalues},
                    {"variance_fractions", rep.pca->variance_fractions},
                    {"loadings", matrix_json(rep.pca->loadings)},
                    {"correlation", matrix_json(rep.pca->correlation)}};
  } else {
    j["pca"] = nullptr;
  }

  j["classification"] = classification_json(classification);
  j["profiles"] = profiles_json(profiles);

  Json sens = Json::array();
  for (const auto& s : rep.sensitivity) {
    const auto* a = classification.find(s.model_id);
    sens.push_back(Json{{"model_id", s.model_id},
                        {"tier", a ? Json(to_string(a->tier)) : Json(nullptr)},
                        {"result", correlation_json(s.result)}});
  }
  j["item_sensitivity"] = sens;

  if (rep.group) {
    const auto& g = *rep.group;
    Json loo = Json::array();
    for (const auto& e : g.leave_one_out)
      loo.push_back(Json{{"model_id", e.model_id}, {"d", optional_json(e.d)}, {"p", optional_json(e.p)}});
    Json ci = nullptr;
    if (g.ci)
      ci = Json{{"low", g.ci->ci_low},
                {"high", g.ci->ci_high},
                {"iterations", g.ci->iterations},
                {"skipped", g.ci->skipped},
                {"seed", g.ci->seed}};
    auto group_stats = [](const stats::SampleStats& s) {
      return Json{{"n", s.n}, {"mean", s.mean}, {"sd", optional_json(s.sd)}};
    };
    j["group_comparison"] = Json{{"valid_models", g.valid_models},
                                 {"invalid_models", g.invalid_models},
                                 {"excluded", g.excluded},
                                 {"valid", group_stats(g.valid_stats)},
                                 {"invalid", group_stats(g.invalid_stats)},
                                 {"valid_significant_positive", g.valid_significant_positive},
                                 {"invalid_significant_positive", g.invalid_significant_positive},
                                 {"d", g.d},
                                 {"t", g.t.t},
                                 {"df", g.t.df},
                                 {"p", g.t.p},
                                 {"ci", ci},
                                 {"ci_note", g.ci_note},
                                 {"leave_one_out", loo}};
  } else {
    j["group_comparison"] = nullptr;
  }

  Json inc = Json::array();
  for (const auto& r : rep.incremental)
    inc.push_back(Json{{"dependent", r.dependent},
                       {"n", r.n},
                       {"reduced", regression_json(r.reduced)},
                       {"full", regression_json(r.full)},
                       {"delta_r2", r.delta_r2},
                       {"F", r.f_test ? Json(r.f_test->f) : Json(nullptr)},
                       {"p", r.f_test ? Json(r.f_test->p) : Json(nullptr)},
                       {"note", r.note}});
  j["incremental"] = inc;

  Json cont = Json::array();
  for (const auto& m : rep.contingency) {
    Json per = Json::object();
    for (const auto& [t, c] : m.per_track) per[std::string(to_string(t))] = contingency_json(c);
    cont.push_back(Json{{"model_id", m.model_id}, {"all", contingency_json(m.all)}, {"per_track", per}});
  }
  j["contingency"] = cont;

  Json pairs = Json::array();
  for (const auto& p : rep.families.pairs) {
    Json d = Json::object();
    for (const auto& [id, v] : p.deltas) d[std::string(to_string(id))] = optional_json(v);
    pairs.push_back(Json{{"model_a", p.model_a}, {"model_b", p.model_b}, {"deltas", d}});
  }
  j["paired_deltas"] = pairs;

  Json rp = Json::array();
  std::size_t inconsistent = 0;
  for (const auto& r : retro_prospective_rows(profiles, th)) {
    if (r.consistent && !*r.consistent) ++inconsistent;
    rp.push_back(Json{{"model_id", r.model_id},
                      {"L_retro", optional_json(r.L_retro)},
                      {"L_prosp", optional_json(r.L_prosp)},
                      {"consistent", r.consistent ? Json(*r.consistent) : Json(nullptr)}});
  }
  j["retro_prospective"] = Json{{"models", rp}, {"inconsistent", inconsistent}};

  Json fams = Json::array();
  for (const auto& f : rep.families.families) {
    Json idx = Json::object();
    for (const auto& [id, s] : f.indices)
      idx[std::string(to_string(id))] = Json{{"n", s.n},
                                             {"mean", optional_json(s.mean)},
                                             {"sd", optional_json(s.sd)},
                                             {"min", optional_json(s.min)},
                                             {"max", optional_json(s.max)}};
    fams.push_back(Json{{"family", f.family}, {"members", f.members}, {"indices", idx}});
  }
  j["families"] = fams;

  if (rep.discriminators) {
    const auto& d = *rep.discriminators;
    Json per = Json::object();
    for (const auto& [t, c] : d.per_track) per[std::string(to_string(t))] = discriminator_count_json(c);
    Json items = Json::array();
    for (const auto& it : d.items)
      items.push_back(Json{{"item_id", it.item_id},
                           {"track", to_string(it.track)},
                           {"status", it.status},
                           {"r", it.result ? Json(it.result->r) : Json(nullptr)},
                           {"p", it.result ? Json(it.result->p_two_tailed) : Json(nullptr)}});
    j["item_discriminators"] =
        Json{{"alpha", d.alpha}, {"total", discriminator_count_json(d.total)}, {"per_track", per}, {"items", items}};
  } else {
    j["item_discriminators"] = nullptr;
  }
  j["warnings"] = rep.warnings;
  return j;
}

namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string markdown_header(std::string_view title, const ArtifactMeta& meta) {
  std::ostringstream out;
  const auto& th = meta.thresholds;
  out << "# " << title << "\n\n"
      << "- tool: " << kToolName << ' ' << tool_version() << "\n"
      << "- command: " << meta.command << "\n"
      << "- seed: " << meta.seed << "\n"
      << "- thresholds: RBS > " << fixed(th.rbs_gt, 2) << ", L >= " << fixed(th.l_min, 2) << ", F >= "
      << fixed(th.f_min, 2) << ", Fp >= " << fixed(th.fp_min, 2) << ", Tier 2 at M + " << fixed(th.tier2_elevated_sd, 1)
      << " SD / M + " << fixed(th.tier2_marked_sd, 1) << " SD\n"
      << "- input digest: " << meta.input_digest << "\n\n";
  return out.str();
}

std::string csv_header(const ArtifactMeta& meta) {
  std::ostringstream out;
  const auto& th = meta.thresholds;
  out << "# tool=" << kToolName << ' ' << tool_version() << "\n"
      << "# command=" << meta.command << "\n"
      << "# seed=" << meta.seed << "\n"
      << "# thresholds=rbs_gt:" << th.rbs_gt << ";l_min:" << th.l_min << ";f_min:" << th.f_min
      << ";fp_min:" << th.fp_min << ";tier2_elevated_sd:" << th.tier2_elevated_sd
      << ";tier2_marked_sd:" << th.tier2_marked_sd << "\n"
      << "# input_digest=" << meta.input_digest << "\n";
  return out.str();
}

std::string rules_text(const TierAssignment& a) {
  std::string s;
  for (const auto& r : a.triggered_rules) {
    if (!s.empty()) s += "; ";
    s += std::string(to_string(r.index)) + (r.index == IndexId::RBS && r.tier1 ? " > " : " >= ") +
         fixed(r.threshold) + " (" + fixed(r.value) + ")";
  }
  return s.empty() ? "-" : s;
}

}  // namespace

std::string screen_json_document(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                                 const Classification& c, std::span<const std::string> dataset_warnings) {
  Json j;
  j["meta"] = meta_json(meta);
  j["profiles"] = profiles_json(profiles);
  j["classification"] = classification_json(c);
  j["dataset_warnings"] = std::vector<std::string>(dataset_warnings.begin(), dataset_warnings.end());
  return dump(j);
}

std::string screen_markdown(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                            const Classification& c) {
  std::ostringstream out;
  out << markdown_header("Validity screen", meta);
  out << "| model | tier | L | K | F | Fp | RBS | TRIN | withdraw_delta | accuracy | triggered rules |\n"
      << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const auto* a = c.find(p.model_id);
    out << "| " << p.model_id << " | " << (a ? to_string(a->tier) : "-") << " | " << fixed(p.overall.L) << " | "
        << fixed(p.overall.K) << " | " << fixed(p.overall.F) << " | " << fixed(p.overall.Fp) << " | "
        << fixed(p.overall.RBS) << " | " << fixed(p.overall.TRIN) << " | " << fixed(p.overall.withdraw_delta)
        << " | " << fixed(p.overall.accuracy) << " | " << (a ? rules_text(*a) : "-") << " |\n";
  }
  if (!c.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const auto& w : c.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

std::string profiles_csv(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                         const Classification& c) {
  std::ostringstream out;
  out << csv_header(meta);
  out << "model,tier";
  for (int i = 0; i <= static_cast<int>(IndexId::Accuracy); ++i) out << ',' << to_string(static_cast<IndexId>(i));
  out << ",ICN,L_retro,L_prosp\n";
  for (const auto& p : profiles) {
    const auto* a = c.find(p.model_id);
    out << p.model_id << ',' << (a ? to_string(a->tier) : "");
    for (int i = 0; i <= static_cast<int>(IndexId::Accuracy); ++i) out << ',' << fixed(p.get(static_cast<IndexId>(i)), 6);
    out << ',' << (p.icn.switches ? std::to_string(*p.icn.switches) : "-") << ',' << fixed(p.split.L_retro, 6) << ','
        << fixed(p.split.L_prosp, 6) << '\n';
  }
  return out.str();
}

std::string validation_json_document(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm) {
  Json j;
  j["meta"] = meta_json(meta);
  j["synthetic"] = validation_json(vm);
  return dump(j);
}

std::string validation_csv(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm) {
  std::ostringstream out;
  out << csv_header(meta);
  out << "policy,index,mean,sd,n_defined,ci_low,ci_high,verdict,expected,pass\n";
  for (const auto& p : vm.policies) {
    for (const auto& [name, s] : p.summaries) {
      const auto v = [&](double x) { return s.n_defined ? fixed(x, 6) : std::string("-"); };
      out << synthetic::to_string(p.spec.policy) << ',' << name << ',' << v(s.mean) << ',' << v(s.sd) << ','
          << s.n_defined << ',' << v(s.ci_low) << ',' << v(s.ci_high) << ',' << synthetic::to_string(p.verdict)
          << ',' << synthetic::to_string(p.expected) << ',' << (p.pass() ? "pass" : "FAIL") << '\n';
    }
  }
  return out.str();
}

std::string validation_markdown(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm) {
  std::ostringstream out;
  out << markdown_header("Synthetic policy validation", meta);
  out << "Iterations: " << vm.iterations << "\n\n";
  out << "| policy | L | Fp | F | RBS | withdraw_delta (M) | withdraw_delta (SD) | flag rate | verdict | expected | result |\n"
      << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  std::size_t passed = 0;
  for (const auto& p : vm.policies) {
    auto m = [&](std::string_view name) {
      const auto* s = p.find(name);
      return s && s->n_defined ? fixed(s->mean) : std::string("-");
    };
    const auto* dw = p.find("withdraw_delta");
    out << "| " << synthetic::to_string(p.spec.policy) << " | " << m("L") << " | " << m("Fp") << " | " << m("F")
        << " | " << m("RBS") << " | " << m("withdraw_delta") << " | "
        << (dw && dw->n_defined ? fixed(dw->sd) : "-") << " | " << fixed(p.per_iteration_flag_rate) << " | "
        << synthetic::to_string(p.verdict) << " | " << synthetic::to_string(p.expected) << " | "
        << (p.pass() ? "pass" : "FAIL") << " |\n";
    passed += p.pass();
  }
  out << "\n" << passed << " of " << vm.policies.size() << " policies received their expected verdict.\n";
  for (const auto& w : vm.warnings) out << "\n- warning: " << w << "\n";
  return out.str();
}

std::string psych_json_document(const ArtifactMeta& meta, const psych::PsychometricReport& rep,
                                std::span<const ValidityProfile> profiles, const Classification& c) {
  Json j;
  j["meta"] = meta_json(meta);
  j["thresholds"] = thresholds_json(meta.thresholds);
  j["psychometrics"] = psych_json(rep, profiles, c, meta.thresholds);
  return dump(j);
}

std::string psych_markdown(const ArtifactMeta& meta, const psych::PsychometricReport& rep,
                           std::span<const ValidityProfile> profiles, const Classification& c) {
  std::ostringstream out;
  out << markdown_header("Psychometric validation", meta);

  out << "## Reliability\n\n| index | alpha | models |\n|---|---|---|\n";
  for (const auto& a : rep.reliability.alphas)
    out << "| " << to_string(a.index) << " | " << fixed(a.alpha) << " | " << a.n_models << " |\n";
  out << "\n### Split-half (Spearman-Brown corrected)\n\n| index | track | r | r_sb | models |\n|---|---|---|---|---|\n";
  for (const auto& s : rep.reliability.split_half)
    out << "| " << to_string(s.index) << " | " << to_string(s.track) << " | " << fixed(s.r) << " | " << fixed(s.r_sb)
        << " | " << s.n_models << " |\n";

  out << "\n## Convergent and discriminant validity\n\n| pair | r | p | n |\n|---|---|---|---|\n";
  auto pair_row = [&](const psych::PairCorrelation& p) {
    out << "| " << to_string(p.a) << " - " << to_string(p.b) << " | "
        << (p.result ? fixed(p.result->r) : "-") << " | " << (p.result ? fixed(p.result->p_two_tailed, 4) : "-")
        << " | " << (p.result ? std::to_string(p.result->n) : "-") << " |\n";
  };
  for (const auto& p : rep.correlations.convergent) pair_row(p);
  for (const auto& p : rep.correlations.discriminant) pair_row(p);
  out << "\n### Inter-scale correlation matrix\n\n|";
  for (auto id : rep.correlations.order) out << " | " << to_string(id);
  out << " |\n|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < rep.correlations.order.size(); ++i) {
    out << "| " << to_string(rep.correlations.order[i]);
    for (std::size_t j = 0; j < rep.correlations.order.size(); ++j) {
      const auto& c2 = rep.correlations.at(i, j);
      out << " | " << (c2 ? fixed(c2->r) : "-");
    }
    out << " |\n";
  }

  out << "\n## Principal components\n\n";
  if (rep.pca) {
    out << "| component | eigenvalue | variance |";
    for (auto id : rep.pca->variables) out << ' ' << to_string(id) << " |";
    out << "\n|---|---|---|";
    for (std::size_t i = 0; i < rep.pca->variables.size(); ++i) out << "---|";
    out << "\n";
    for (std::size_t c2 = 0; c2 < rep.pca->eigenvalues.size(); ++c2) {
      out << "| PC" << c2 + 1 << " | " << fixed(rep.pca->eigenvalues[c2]) << " | "
          << fixed(rep.pca->variance_fractions[c2]) << " |";
      for (std::size_t r = 0; r < rep.pca->variables.size(); ++r) out << ' ' << fixed(rep.pca->loadings(r, c2)) << " |";
      out << "\n";
    }
  } else {
    out << "Not computed (see warnings).\n";
  }

  out << "\n## Tiered classification\n\n| model | tier | triggered rules |\n|---|---|---|\n";
  for (const auto& a : c.assignments) out << "| " << a.model_id << " | " << to_string(a.tier) << " | " << rules_text(a) << " |\n";

  out << "\n## Item sensitivity r(KEEP, correct)\n\n| model | tier | r | p |\n|---|---|---|---|\n";
  for (const auto& s : rep.sensitivity) {
    const auto* a = c.find(s.model_id);
    out << "| " << s.model_id << " | " << (a ? to_string(a->tier) : "-") << " | "
        << (s.result ? fixed(s.result->r) : "-") << " | " << (s.result ? fixed(s.result->p_two_tailed, 4) : "-")
        << " |\n";
  }
  if (rep.group) {
    const auto& g = *rep.group;
    out << "\nValid-side n = " << g.valid_stats.n << " (M = " << fixed(g.valid_stats.mean)
        << ", SD = " << fixed(g.valid_stats.sd) << "), Tier 1 n = " << g.invalid_stats.n
        << " (M = " << fixed(g.invalid_stats.mean) << ", SD = " << fixed(g.invalid_stats.sd) << ").\n\n"
        << "| statistic | value |\n|---|---|\n"
        << "| d | " << fixed(g.d) << " |\n"
        << "| t | " << fixed(g.t.t) << " |\n"
        << "| df | " << fixed(g.t.df, 0) << " |\n"
        << "| p | " << fixed(g.t.p, 4) << " |\n"
        << "| CI low | " << (g.ci ? fixed(g.ci->ci_low) : "-") << " |\n"
        << "| CI high | " << (g.ci ? fixed(g.ci->ci_high) : "-") << " |\n";
    out << "\n### Leave-one-out\n\n| removed | d | p |\n|---|---|---|\n";
    for (const auto& e : g.leave_one_out) out << "| " << e.model_id << " | " << fixed(e.d) << " | " << fixed(e.p, 4) << " |\n";
  }

  out << "\n## Incremental prediction\n\n| dependent | R2 (accuracy) | R2 (accuracy + L) | delta R2 | F | p | n |\n"
      << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rep.incremental)
    out << "| " << r.dependent << " | " << (r.reduced ? fixed(r.reduced->r_squared) : "-") << " | "
        << (r.full ? fixed(r.full->r_squared) : "-") << " | " << fixed(r.delta_r2) << " | "
        << (r.f_test ? fixed(r.f_test->f) : "-") << " | " << (r.f_test ? fixed(r.f_test->p, 4) : "-") << " | " << r.n
        << " |\n";

  out << "\n## WITHDRAW x BET contingency (all items)\n\n"
      << "| model | KEEP+BET | KEEP+NO_BET | WITHDRAW+BET | WITHDRAW+NO_BET | n |\n|---|---|---|---|---|---|\n";
  for (const auto& m : rep.contingency)
    out << "| " << m.model_id << " | " << m.all.keep_bet << " | " << m.all.keep_no_bet << " | " << m.all.withdraw_bet
        << " | " << m.all.withdraw_no_bet << " | " << m.all.total() << " |\n";

  out << "\n## Paired-model deltas (b - a)\n\n";
  if (rep.families.pairs.empty()) out << "No pairs configured.\n";
  for (const auto& p : rep.families.pairs) {
    out << "\n### " << p.model_b << " - " << p.model_a << "\n\n| index | delta |\n|---|---|\n";
    for (const auto& [id, v] : p.deltas) out << "| " << to_string(id) << " | " << fixed(v) << " |\n";
  }

  out << "\n## Retrospective versus prospective\n\n| model | L_retro | L_prosp | consistent |\n|---|---|---|---|\n";
  for (const auto& r : retro_prospective_rows(profiles, meta.thresholds))
    out << "| " << r.model_id << " | " << fixed(r.L_retro) << " | " << fixed(r.L_prosp) << " | "
        << (r.consistent ? (*r.consistent ? "yes" : "no") : "-") << " |\n";

  out << "\n## Family summaries\n\n";
  if (rep.families.families.empty()) out << "No family map configured.\n";
  for (const auto& f : rep.families.families) {
    out << "\n### " << f.family << " (n = " << f.members.size() << ")\n\n| index | M | SD | min | max |\n|---|---|---|---|---|\n";
    for (const auto& [id, s] : f.indices)
      out << "| " << to_string(id) << " | " << fixed(s.mean) << " | " << fixed(s.sd) << " | " << fixed(s.min) << " | "
          << fixed(s.max) << " |\n";
  }

  out << "\n## Item-level discriminators\n\n";
  if (rep.discriminators) {
    const auto& d = *rep.discriminators;
    out << "| track | significant | tested | zero variance | insufficient | items |\n|---|---|---|---|---|---|\n";
    for (const auto& [t, cnt] : d.per_track)
      out << "| " << to_string(t) << " | " << cnt.significant << " | " << cnt.tested << " | " << cnt.undefined << " | "
          << cnt.insufficient << " | " << cnt.items << " |\n";
    out << "| all | " << d.total.significant << " | " << d.total.tested << " | " << d.total.undefined << " | "
        << d.total.insufficient << " | " << d.total.items << " |\n";
  } else {
    out << "Not computed (see warnings).\n";
  }

  if (!rep.warnings.empty() || !c.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const auto& w : c.warnings) out << "- " << w << "\n";
    for (const auto& w : rep.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

std::string sweep_json_document(const ArtifactMeta& meta, const SweepResult& sweep,
                                std::span<const ValidityProfile> profiles) {
  Json j;
  j["meta"] = meta_json(meta);
  j["sweep"] = sweep_json(sweep);
  Json pts = Json::array();
  for (const auto& p : profiles)
    pts.push_back(Json{{"model_id", p.model_id}, {"L", optional_json(p.overall.L)}, {"F", optional_json(p.overall.F)},
                       {"Fp", optional_json(p.overall.Fp)}, {"RBS", optional_json(p.overall.RBS)}});
  j["profiles"] = pts;
  return dump(j);
}

std::string sweep_csv(const ArtifactMeta& meta, const SweepResult& sweep) {
  std::ostringstream out;
  out << csv_header(meta);
  out << "l_min,f_min,fp_min,n_tier1,tier1\n";
  for (const auto& p : sweep.points) {
    std::string names;
    for (const auto& m : p.tier1) names += (names.empty() ? "" : ";") + m;
    out << fixed(p.l_min, 4) << ',' << fixed(p.f_min, 4) << ',' << fixed(p.f_min, 4) << ',' << p.tier1.size() << ",\""
        << names << "\"\n";
  }
  return out.str();
}

std::string sweep_markdown(const ArtifactMeta& meta, const SweepResult& sweep) {
  std::ostringstream out;
  out << markdown_header("Threshold stability sweep", meta);
  out << "Stable: " << (sweep.stable ? "yes" : "no") << "\n\n| L min | F/Fp min | Tier 1 models |\n|---|---|---|\n";
  for (const auto& p : sweep.points) {
    std::string names;
    for (const auto& m : p.tier1) names += (names.empty() ? "" : ", ") + m;
    out << "| " << fixed(p.l_min, 2) << " | " << fixed(p.f_min, 2) << " | " << (names.empty() ? "-" : names) << " |\n";
  }
  return out.str();
}

}  // namespace vscreen::report
