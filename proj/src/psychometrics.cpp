#include "vscreen/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vscreen/error.hpp"
#include "vscreen/symmetric_eigen.hpp"

namespace vscreen::psych {

namespace {

std::vector<Track> present_tracks(const Dataset& ds) {
  std::vector<Track> out;
  for (Track t : kAllTracks)
    if (const auto it = ds.track_sizes().find(t); it != ds.track_sizes().end() && it->second > 0)
      out.push_back(t);
  return out;
}

std::optional<stats::CorrelationResult> try_pearson(std::span<const double> x, std::span<const double> y) {
  try {
    return stats::pearson(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance || e.code() == ErrorCode::InsufficientSample) return std::nullopt;
    throw;
  }
}

}  // namespace

// ---- reliability ---------------------------------------------------------

ReliabilityReport reliability_suite(const Dataset& ds, std::span<const ValidityProfile> profiles,
                                    const ConsensusSet& consensus) {
  if (profiles.size() < 3) throw Error(ErrorCode::InsufficientSample, "reliability needs >= 3 models");
  const auto tracks = present_tracks(ds);
  if (tracks.size() < 2) throw Error(ErrorCode::InsufficientSample, "reliability needs >= 2 tracks");

  ReliabilityReport out;
  for (IndexId id : kCoreIndices) {
    AlphaEntry entry;
    entry.index = id;
    entry.n_parts = tracks.size();
    std::vector<std::vector<double>> rows;
    for (const auto& p : profiles) {
      std::vector<double> row;
      for (Track t : tracks) {
        const auto it = p.per_track.find(t);
        const auto v = it == p.per_track.end() ? std::nullopt : it->second.get(id);
        if (!v) break;
        row.push_back(*v);
      }
      if (row.size() == tracks.size()) rows.push_back(std::move(row));
      else ++entry.n_dropped;
    }
    entry.n_models = rows.size();
    if (rows.size() < 2) {
      entry.note = "fewer than 2 complete models";
    } else {
      try {
        entry.alpha = stats::cronbach_alpha(stats::Matrix::from_rows(rows));
      } catch (const Error& e) {
        entry.note = e.what();
      }
    }
    out.alphas.push_back(std::move(entry));
  }

  // Parity of each item's position within its track (lexicographic order).
  std::map<std::string, bool, std::less<>> odd_position;
  std::map<Track, std::size_t> seen;
  for (const auto& item : ds.items()) {
    const std::size_t pos = seen[ds.track_of(item)]++;
    odd_position.emplace(item, pos % 2 == 0);  // 1st, 3rd, ... positions
  }

  struct Halves {
    std::map<Track, IndexSet> odd, even;
  };
  std::vector<Halves> halves(profiles.size());
  for (std::size_t m = 0; m < profiles.size(); ++m) {
    std::map<Track, ResponseTally> odd, even;
    for (const auto& r : ds.records_for(profiles[m].model_id)) {
      const bool in_consensus = consensus.count(r.item_id) > 0;
      (odd_position.at(r.item_id) ? odd : even)[r.track].add(r, in_consensus);
    }
    for (const auto& [t, tl] : odd) halves[m].odd.emplace(t, indices_from_tally(tl));
    for (const auto& [t, tl] : even) halves[m].even.emplace(t, indices_from_tally(tl));
  }

  for (IndexId id : kCoreIndices) {
    for (Track t : tracks) {
      SplitHalfEntry entry;
      entry.index = id;
      entry.track = t;
      std::vector<double> a, b;
      for (const auto& h : halves) {
        const auto io = h.odd.find(t);
        const auto ie = h.even.find(t);
        const auto vo = io == h.odd.end() ? std::nullopt : io->second.get(id);
        const auto ve = ie == h.even.end() ? std::nullopt : ie->second.get(id);
        if (vo && ve) {
          a.push_back(*vo);
          b.push_back(*ve);
        } else {
          ++entry.n_dropped;
        }
      }
      entry.n_models = a.size();
      if (const auto r = try_pearson(a, b)) {
        entry.r = r->r;
        if (r->r > -1.0) entry.r_sb = stats::spearman_brown(r->r);
      }
      out.split_half.push_back(entry);
    }
  }
  return out;
}

// ---- inter-scale structure -----------------------------------------------

PairCorrelation correlate_indices(std::span<const ValidityProfile> profiles, IndexId a, IndexId b) {
  PairCorrelation out;
  out.a = a;
  out.b = b;
  std::vector<double> xs, ys;
  for (const auto& p : profiles) {
    const auto va = p.get(a);
    const auto vb = p.get(b);
    if (va && vb) {
      xs.push_back(*va);
      ys.push_back(*vb);
    } else {
      ++out.n_dropped;
    }
  }
  out.result = try_pearson(xs, ys);
  return out;
}

ScaleCorrelations scale_correlations(std::span<const ValidityProfile> profiles) {
  ScaleCorrelations out;
  const std::size_t k = out.order.size();
  out.matrix.resize(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      out.matrix[i * k + j] = correlate_indices(profiles, out.order[i], out.order[j]).result;
  out.convergent = {correlate_indices(profiles, IndexId::L, IndexId::K),
                    correlate_indices(profiles, IndexId::F, IndexId::Fp),
                    correlate_indices(profiles, IndexId::WithdrawDelta, IndexId::BetDelta)};
  out.discriminant = {correlate_indices(profiles, IndexId::L, IndexId::F),
                      correlate_indices(profiles, IndexId::L, IndexId::Accuracy)};
  return out;
}

PcaResult pca_indices(std::span<const ValidityProfile> profiles) {
  PcaResult out;
  std::vector<std::array<double, 6>> cases;
  for (const auto& p : profiles) {
    std::array<double, 6> row{};
    bool complete = true;
    for (std::size_t j = 0; j < kCoreIndices.size(); ++j) {
      const auto v = p.get(kCoreIndices[j]);
      if (!v) {
        complete = false;
        break;
      }
      row[j] = *v;
    }
    if (complete) cases.push_back(row);
  }
  if (cases.size() < profiles.size())
    out.warnings.push_back(std::to_string(profiles.size() - cases.size()) +
                           " model(s) with undefined indices excluded from PCA");
  out.n_cases = cases.size();
  if (cases.size() < kMinPcaCases)
    throw Error(ErrorCode::InsufficientSample, "PCA needs >= 7 complete models, have " + std::to_string(cases.size()));

  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < kCoreIndices.size(); ++j) {
    std::vector<double> col;
    for (const auto& c : cases) col.push_back(c[j]);
    const auto st = stats::sample_stats(col);
    if (!st.sd || *st.sd == 0.0) {
      out.dropped.push_back(kCoreIndices[j]);
      out.warnings.push_back(std::string(to_string(kCoreIndices[j])) + " is constant across models; dropped (ZeroVariance)");
      continue;
    }
    for (double& v : col) v = (v - st.mean) / *st.sd;
    out.variables.push_back(kCoreIndices[j]);
    columns.push_back(std::move(col));
  }
  const std::size_t p = columns.size();
  if (p < 2) throw Error(ErrorCode::ZeroVariance, "PCA needs >= 2 non-constant indices");

  out.correlation = stats::Matrix(p, p);
  const double denom = static_cast<double>(cases.size() - 1);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < cases.size(); ++c) s += columns[i][c] * columns[j][c];
      out.correlation(i, j) = out.correlation(j, i) = i == j ? 1.0 : s / denom;
    }

  const auto eig = stats::symmetric_eigen(out.correlation);
  out.eigenvalues = eig.values;
  double total = 0.0;
  for (double v : eig.values) total += std::max(v, 0.0);
  out.loadings = stats::Matrix(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    const double lambda = std::max(eig.values[c], 0.0);
    out.variance_fractions.push_back(lambda / total);
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < p; ++r)
      if (std::fabs(eig.vectors(r, c)) > std::fabs(eig.vectors(argmax, c))) argmax = r;
    const double sign = eig.vectors(argmax, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < p; ++r) out.loadings(r, c) = sign * eig.vectors(r, c) * std::sqrt(lambda);
  }
  return out;
}

// ---- item sensitivity and group comparison -------------------------------

std::optional<stats::CorrelationResult> item_sensitivity(std::span<const ProbeRecord> records) {
  std::vector<int> keep;
  std::vector<double> correct;
  for (const auto& r : records) {
    keep.push_back(r.kept() ? 1 : 0);
    correct.push_back(r.correct ? 1.0 : 0.0);
  }
  try {
    return stats::point_biserial(keep, correct);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance || e.code() == ErrorCode::InsufficientSample) return std::nullopt;
    throw;
  }
}

std::vector<ModelSensitivity> item_sensitivity(const Dataset& ds) {
  std::vector<ModelSensitivity> out;
  for (const auto& m : ds.models()) out.push_back({m, item_sensitivity(ds.records_for(m))});
  return out;
}

namespace {

std::vector<double> values_of(std::span<const std::pair<std::string, double>> group) {
  std::vector<double> out;
  for (const auto& [_, v] : group) out.push_back(v);
  return out;
}

std::optional<double> safe_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  try {
    return stats::cohens_d(a, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

GroupComparison compare_groups(std::span<const std::pair<std::string, double>> valid,
                               std::span<const std::pair<std::string, double>> invalid,
                               const GroupComparisonOptions& options) {
  if (valid.size() < 2 || invalid.size() < 2)
    throw Error(ErrorCode::InsufficientSample, "group comparison needs >= 2 models per group");
  GroupComparison out;
  for (const auto& [m, _] : valid) out.valid_models.push_back(m);
  for (const auto& [m, _] : invalid) out.invalid_models.push_back(m);
  const auto a = values_of(valid);
  const auto b = values_of(invalid);
  out.valid_stats = stats::sample_stats(a);
  out.invalid_stats = stats::sample_stats(b);
  out.d = stats::cohens_d(a, b);
  out.t = stats::pooled_t_test(a, b);

  if (options.bootstrap_iterations > 0) {
    stats::BootstrapOptions bo;
    bo.iterations = options.bootstrap_iterations;
    bo.seed = options.seed;
    bo.ci_level = options.ci_level;
    bo.threads = options.threads;
    stats::ReplicateFn replicate;
    if (options.scheme == ResampleScheme::Stratified) {
      replicate = [&](CounterRng& rng) {
        const auto ra = stats::resample(a, rng);
        const auto rb = stats::resample(b, rng);
        return safe_d(ra, rb);
      };
    } else {
      replicate = [&](CounterRng& rng) {
        std::vector<double> ra, rb;
        const std::size_t n = a.size() + b.size();
        for (std::size_t i = 0; i < n; ++i) {
          const auto k = rng.below(n);
          if (k < a.size()) ra.push_back(a[k]);
          else rb.push_back(b[k - a.size()]);
        }
        return safe_d(ra, rb);
      };
    }
    try {
      out.ci = stats::bootstrap(replicate, out.d, bo);
      out.ci_note = options.scheme == ResampleScheme::Stratified ? "stratified percentile bootstrap"
                                                                  : "pooled percentile bootstrap";
    } catch (const Error& e) {
      out.ci_note = e.what();
    }
  }

  auto drop_one = [&](std::span<const std::pair<std::string, double>> group, std::size_t skip) {
    std::vector<double> v;
    for (std::size_t i = 0; i < group.size(); ++i)
      if (i != skip) v.push_back(group[i].second);
    return v;
  };
  auto loo_entry = [&](const std::string& model, const std::vector<double>& va, const std::vector<double>& vb) {
    LeaveOneOut e{model, std::nullopt, std::nullopt};
    if (va.size() >= 2 && vb.size() >= 2) {
      try {
        e.d = stats::cohens_d(va, vb);
        e.p = stats::pooled_t_test(va, vb).p;
      } catch (const Error&) {
        e.d.reset();
        e.p.reset();
      }
    }
    return e;
  };
  for (std::size_t i = 0; i < valid.size(); ++i)
    out.leave_one_out.push_back(loo_entry(valid[i].first, drop_one(valid, i), b));
  for (std::size_t i = 0; i < invalid.size(); ++i)
    out.leave_one_out.push_back(loo_entry(invalid[i].first, a, drop_one(invalid, i)));
  return out;
}

GroupComparison group_comparison(std::span<const ModelSensitivity> sensitivities,
                                 const Classification& classification,
                                 const GroupComparisonOptions& options) {
  std::vector<std::pair<std::string, double>> valid, invalid;
  std::vector<std::string> excluded;
  std::size_t valid_sig = 0, invalid_sig = 0;
  for (const auto& s : sensitivities) {
    const auto* a = classification.find(s.model_id);
    if (!a || a->tier == Tier::Unclassifiable || !s.result) {
      excluded.push_back(s.model_id);
      continue;
    }
    const bool sig_pos = s.result->r > 0.0 && s.result->p_two_tailed < 0.05;
    if (a->tier == Tier::Tier1Invalid) {
      invalid.emplace_back(s.model_id, s.result->r);
      invalid_sig += sig_pos;
    } else {
      valid.emplace_back(s.model_id, s.result->r);
      valid_sig += sig_pos;
    }
  }
  auto out = compare_groups(valid, invalid, options);
  out.excluded = std::move(excluded);
  out.valid_significant_positive = valid_sig;
  out.invalid_significant_positive = invalid_sig;
  return out;
}

// ---- incremental regression ----------------------------------------------

IncrementalResult incremental_fit(std::string dependent, std::span<const double> y,
                                  std::span<const double> base, std::span<const double> added) {
  IncrementalResult out;
  out.dependent = std::move(dependent);
  out.n = y.size();
  if (y.size() != base.size() || y.size() != added.size())
    throw Error(ErrorCode::ShapeError, "incremental_fit: length mismatch");
  stats::Matrix xr(y.size(), 1), xf(y.size(), 2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    xr(i, 0) = xf(i, 0) = base[i];
    xf(i, 1) = added[i];
  }
  try {
    out.reduced = stats::ols(y, xr);
  } catch (const Error& e) {
    out.note = std::string("reduced model: ") + e.what();
    return out;
  }
  try {
    out.full = stats::ols(y, xf);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularDesign) {
      out.note = std::string("full model: ") + e.what();
      return out;
    }
    out.full = out.reduced;
    out.full->k = 2;
    out.note = "added predictor collinear with the reduced design; dropped (delta R^2 = 0)";
    out.delta_r2 = 0.0;
    out.f_test = stats::FTestResult{0.0, 1.0};
    return out;
  }
  out.delta_r2 = out.full->r_squared - out.reduced->r_squared;
  try {
    out.f_test = stats::delta_r2_f_test(out.reduced->r_squared, out.full->r_squared, y.size(), 1, 2);
  } catch (const Error& e) {
    out.note = e.what();
  }
  return out;
}

std::vector<IncrementalResult> incremental_regression(std::span<const ValidityProfile> profiles,
                                                      std::span<const ModelSensitivity> sensitivities) {
  std::map<std::string, double, std::less<>> sens;
  for (const auto& s : sensitivities)
    if (s.result) sens.emplace(s.model_id, s.result->r);

  std::vector<IncrementalResult> out;
  for (const std::string dv : {"withdraw_delta", "item_sensitivity"}) {
    std::vector<double> y, acc, l;
    for (const auto& p : profiles) {
      const auto a = p.get(IndexId::Accuracy);
      const auto lv = p.get(IndexId::L);
      std::optional<double> yv;
      if (dv == "withdraw_delta") {
        yv = p.get(IndexId::WithdrawDelta);
      } else if (const auto it = sens.find(p.model_id); it != sens.end()) {
        yv = it->second;
      }
      if (a && lv && yv) {
        y.push_back(*yv);
        acc.push_back(*a);
        l.push_back(*lv);
      }
    }
    if (y.size() < 5) {
      IncrementalResult r;
      r.dependent = dv;
      r.n = y.size();
      r.note = "fewer than 5 models with accuracy, L and the dependent variable defined";
      out.push_back(std::move(r));
      continue;
    }
    out.push_back(incremental_fit(dv, y, acc, l));
  }
  return out;
}

// ---- item discriminators -------------------------------------------------

DiscriminatorReport item_discriminators(const Dataset& ds, const Classification& classification,
                                        DiscriminatorOutcome outcome, double alpha) {
  DiscriminatorReport out;
  out.alpha = alpha;
  std::map<std::string, int, std::less<>> membership;
  std::size_t n_valid = 0, n_invalid = 0;
  for (const auto& a : classification.assignments) {
    if (a.tier == Tier::Unclassifiable) continue;
    const int valid_side = a.tier == Tier::Tier1Invalid ? 0 : 1;
    membership.emplace(a.model_id, valid_side);
    (valid_side ? n_valid : n_invalid)++;
  }
  if (n_valid == 0 || n_invalid == 0)
    throw Error(ErrorCode::InsufficientSample, "item discriminators need both valid and Tier 1 models");

  struct Column {
    std::vector<int> group;
    std::vector<double> response;
  };
  std::map<std::string, Column, std::less<>> columns;
  for (const auto& r : ds.records()) {
    const auto it = membership.find(r.model_id);
    if (it == membership.end()) continue;
    auto& c = columns[r.item_id];
    c.group.push_back(it->second);
    c.response.push_back(outcome == DiscriminatorOutcome::Keep ? (r.kept() ? 1.0 : 0.0) : (r.bet_on() ? 1.0 : 0.0));
  }

  for (const auto& item : ds.items()) {
    ItemDiscriminator d;
    d.item_id = item;
    d.track = ds.track_of(item);
    auto& count = out.per_track[d.track];
    ++count.items;
    const auto it = columns.find(item);
    std::size_t g1 = 0, g0 = 0;
    if (it != columns.end())
      for (int g : it->second.group) (g ? g1 : g0)++;
    if (g1 < kMinModelsPerGroupPerItem || g0 < kMinModelsPerGroupPerItem) {
      d.status = "insufficient";
      ++count.insufficient;
    } else {
      try {
        d.result = stats::point_biserial(it->second.group, it->second.response);
        d.status = "ok";
        ++count.tested;
        if (d.result->p_two_tailed < alpha) ++count.significant;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVariance) throw;
        d.status = "zero_variance";
        ++count.undefined;
      }
    }
    out.items.push_back(std::move(d));
  }
  for (const auto& [_, c] : out.per_track) {
    out.total.items += c.items;
    out.total.tested += c.tested;
    out.total.significant += c.significant;
    out.total.undefined += c.undefined;
    out.total.insufficient += c.insufficient;
  }
  return out;
}

// ---- contingency, families, pairs ----------------------------------------

Contingency contingency_table(std::span<const ProbeRecord> records) {
  Contingency c;
  for (const auto& r : records) {
    if (r.kept()) (r.bet_on() ? c.keep_bet : c.keep_no_bet)++;
    else (r.bet_on() ? c.withdraw_bet : c.withdraw_no_bet)++;
  }
  return c;
}

std::vector<ModelContingency> contingency_tables(const Dataset& ds) {
  std::vector<ModelContingency> out;
  for (const auto& m : ds.models()) {
    ModelContingency mc;
    mc.model_id = m;
    const auto records = ds.records_for(m);
    mc.all = contingency_table(records);
    std::map<Track, std::vector<ProbeRecord>> by_track;
    for (const auto& r : records) by_track[r.track].push_back(r);
    for (const auto& [t, rs] : by_track) mc.per_track.emplace(t, contingency_table(rs));
    out.push_back(std::move(mc));
  }
  return out;
}

namespace {

IndexSpread spread(const std::vector<double>& values) {
  IndexSpread s;
  s.n = values.size();
  if (values.empty()) return s;
  const auto st = stats::sample_stats(values);
  s.mean = st.mean;
  s.sd = st.sd;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace

FamilyPairSummaries family_and_paired_summaries(std::span<const ValidityProfile> profiles,
                                                const std::map<std::string, std::string>& family_map,
                                                std::span<const std::pair<std::string, std::string>> pairs) {
  std::map<std::string, const ValidityProfile*, std::less<>> by_id;
  for (const auto& p : profiles) by_id.emplace(p.model_id, &p);
  auto lookup = [&](const std::string& id) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::ConfigError, "unknown model '" + id + "' in run configuration");
    return it->second;
  };

  FamilyPairSummaries out;
  std::map<std::string, std::vector<const ValidityProfile*>> families;
  for (const auto& [model, family] : family_map) families[family].push_back(lookup(model));
  for (auto& [family, members] : families) {
    std::sort(members.begin(), members.end(),
              [](const ValidityProfile* a, const ValidityProfile* b) { return a->model_id < b->model_id; });
    FamilySummary fs;
    fs.family = family;
    for (const auto* m : members) fs.members.push_back(m->model_id);
    for (IndexId id : kSummaryIndices) {
      std::vector<double> values;
      for (const auto* m : members)
        if (const auto v = m->get(id)) values.push_back(*v);
      fs.indices.emplace(id, spread(values));
    }
    out.families.push_back(std::move(fs));
  }
  for (const auto& [a, b] : pairs) {
    const auto* pa = lookup(a);
    const auto* pb = lookup(b);
    PairDelta pd{a, b, {}};
    for (IndexId id : kSummaryIndices) {
      const auto va = pa->get(id);
      const auto vb = pb->get(id);
      pd.deltas.emplace(id, va && vb ? std::optional<double>(*vb - *va) : std::nullopt);
    }
    out.pairs.push_back(std::move(pd));
  }
  return out;
}

// ---- whole battery -------------------------------------------------------

PsychometricReport run_psychometrics(const Dataset& ds, std::span<const ValidityProfile> profiles,
                                     const Classification& classification, const ConsensusSet& consensus,
                                     const PsychometricOptions& options) {
  PsychometricReport rep;
  auto attempt = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      rep.warnings.push_back(std::string(what) + " skipped: " + e.what());
    }
  };
  attempt("reliability", [&] { rep.reliability = reliability_suite(ds, profiles, consensus); });
  rep.correlations = scale_correlations(profiles);
  attempt("PCA", [&] {
    rep.pca = pca_indices(profiles);
    for (const auto& w : rep.pca->warnings) rep.warnings.push_back("PCA: " + w);
  });
  rep.sensitivity = item_sensitivity(ds);
  attempt("group comparison",
          [&] { rep.group = group_comparison(rep.sensitivity, classification, options.group); });
  rep.incremental = incremental_regression(profiles, rep.sensitivity);
  attempt("item discriminators", [&] {
    rep.discriminators = item_discriminators(ds, classification, options.discriminator_outcome);
  });
  rep.contingency = contingency_tables(ds);
  rep.families = family_and_paired_summaries(profiles, options.family_map, options.pairs);
  return rep;
}

}  // namespace vscreen::psych
