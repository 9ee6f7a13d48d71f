#include "vscreen/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vscreen/error.hpp"
#include "vscreen/parallel.hpp"
#include "vscreen/stats.hpp"

namespace vscreen::synthetic {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::AlwaysKeepBet: return "AlwaysKeepBet";
    case Policy::AlwaysWithdrawNoBet: return "AlwaysWithdrawNoBet";
    case Policy::Random5050: return "Random5050";
    case Policy::Random80Keep: return "Random80Keep";
    case Policy::PerfectMonitor: return "PerfectMonitor";
    case Policy::NoisyMonitor: return "NoisyMonitor";
    case Policy::InvertedMonitor: return "InvertedMonitor";
    case Policy::R1Like: return "R1Like";
  }
  return "";
}

std::optional<Policy> parse_policy(std::string_view name) {
  for (Policy p : kAllPolicies)
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::string_view to_string(Verdict v) { return v == Verdict::Flagged ? "Flagged" : "Passed"; }

Verdict expected_verdict(Policy p) {
  switch (p) {
    case Policy::AlwaysKeepBet:
    case Policy::AlwaysWithdrawNoBet:
    case Policy::Random5050:
    case Policy::InvertedMonitor:
    case Policy::R1Like: return Verdict::Flagged;
    case Policy::Random80Keep:
    case Policy::PerfectMonitor:
    case Policy::NoisyMonitor: return Verdict::Passed;
  }
  return Verdict::Passed;
}

PolicySpec PolicySpec::defaults(Policy p) {
  PolicySpec s;
  s.policy = p;
  switch (p) {
    case Policy::Random5050: s.parameters = {{"keep_prob", 0.5}}; break;
    case Policy::Random80Keep: s.parameters = {{"keep_prob", 0.8}}; break;
    case Policy::NoisyMonitor: s.parameters = {{"keep_on_correct", 0.8}, {"keep_on_incorrect", 0.4}}; break;
    default: break;
  }
  return s;
}

double PolicySpec::param(std::string_view name) const {
  const auto it = parameters.find(std::string(name));
  if (it == parameters.end())
    throw Error(ErrorCode::ConfigError, std::string(to_string(policy)) + ": missing parameter '" +
                                            std::string(name) + "'");
  return it->second;
}

void PolicySpec::validate() const {
  for (const auto& [name, v] : parameters)
    if (!(v >= 0.0 && v <= 1.0))
      throw Error(ErrorCode::ConfigError, std::string(to_string(policy)) + ": parameter '" + name +
                                              "' outside [0, 1]");
  switch (policy) {
    case Policy::Random5050:
    case Policy::Random80Keep: param("keep_prob"); break;
    case Policy::NoisyMonitor:
      param("keep_on_correct");
      param("keep_on_incorrect");
      break;
    default: break;
  }
}

void AccuracyConfig::validate() const {
  if (mode == AccuracyMode::Beta && !(beta_a > 0.0 && beta_b > 0.0))
    throw Error(ErrorCode::ConfigError, "beta accuracy parameters must be positive");
  if (mode == AccuracyMode::Uniform && !(uniform_lo >= 0.0 && uniform_hi <= 1.0 && uniform_lo <= uniform_hi))
    throw Error(ErrorCode::ConfigError, "uniform accuracy bounds must satisfy 0 <= lo <= hi <= 1");
}

std::vector<SyntheticItem> battery_layout(std::size_t n_items) {
  constexpr double kTotal = 524.0;
  std::array<std::size_t, 6> counts{};
  std::array<double, 6> remainders{};
  std::size_t assigned = 0;
  for (std::size_t t = 0; t < 6; ++t) {
    const double exact = static_cast<double>(n_items) * static_cast<double>(kExpectedTrackSizes[t]) / kTotal;
    counts[t] = static_cast<std::size_t>(std::floor(exact));
    remainders[t] = exact - static_cast<double>(counts[t]);
    assigned += counts[t];
  }
  std::array<std::size_t, 6> order{0, 1, 2, 3, 4, 5};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n_items; ++i, ++assigned) ++counts[order[i % 6]];

  std::vector<SyntheticItem> items;
  items.reserve(n_items);
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 1; k <= counts[t]; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "T%zu-%04zu", t + 1, k);
      items.push_back({id, kAllTracks[t], 0.0});
    }
  }
  return items;
}

std::vector<SyntheticItem> sample_item_accuracies(const AccuracyConfig& config, std::size_t n_items,
                                                  std::uint64_t seed) {
  config.validate();
  if (config.mode == AccuracyMode::FromNorms)
    throw Error(ErrorCode::ConfigError, "from_norms accuracies come from items_from_norms");
  if (n_items == 0) throw Error(ErrorCode::ConfigError, "n_items must be positive");
  auto items = battery_layout(n_items);
  CounterRng rng(seed, 0xACC0ACC0ULL);
  for (auto& item : items) {
    item.accuracy = config.mode == AccuracyMode::Beta
                        ? rng.beta(config.beta_a, config.beta_b)
                        : config.uniform_lo + (config.uniform_hi - config.uniform_lo) * rng.uniform();
  }
  return items;
}

std::vector<SyntheticItem> items_from_norms(const ItemNorms& norms,
                                            const std::map<std::string, Track, std::less<>>& item_tracks) {
  if (norms.empty()) throw Error(ErrorCode::EmptyInput, "norms contain no items");
  std::vector<SyntheticItem> items;
  items.reserve(norms.size());
  for (const auto& [id, norm] : norms) {
    Track track = Track::T1;
    if (const auto it = item_tracks.find(id); it != item_tracks.end()) {
      track = it->second;
    } else if (id.size() >= 2) {
      if (const auto parsed = parse_track(std::string_view(id).substr(0, 2))) track = *parsed;
    }
    items.push_back({id, track, norm.mean_accuracy});
  }
  return items;
}

std::vector<ProbeRecord> generate_policy_dataset(const PolicySpec& policy,
                                                 std::span<const SyntheticItem> items, CounterRng& rng,
                                                 std::string_view model_id) {
  policy.validate();
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "no items to generate");
  const std::string model = model_id.empty() ? std::string(to_string(policy.policy)) : std::string(model_id);
  std::vector<ProbeRecord> records;
  records.reserve(items.size());
  for (const auto& item : items) {
    ProbeRecord r;
    r.model_id = model;
    r.track = item.track;
    r.item_id = item.item_id;
    r.domain = std::string(to_string(item.track));
    r.correct = rng.bernoulli(item.accuracy);
    bool keep = true;
    bool bet = true;
    switch (policy.policy) {
      case Policy::AlwaysKeepBet: break;
      case Policy::AlwaysWithdrawNoBet: keep = bet = false; break;
      case Policy::Random5050:
      case Policy::Random80Keep:
        keep = rng.bernoulli(policy.param("keep_prob"));
        bet = keep;
        break;
      case Policy::PerfectMonitor: keep = bet = r.correct; break;
      case Policy::NoisyMonitor:
        keep = rng.bernoulli(r.correct ? policy.param("keep_on_correct") : policy.param("keep_on_incorrect"));
        bet = keep;
        break;
      case Policy::InvertedMonitor: keep = bet = !r.correct; break;
      case Policy::R1Like:
        keep = !r.correct;
        bet = true;
        break;
    }
    r.keep = keep ? KeepChoice::Keep : KeepChoice::Withdraw;
    r.bet = bet ? BetChoice::Bet : BetChoice::NoBet;
    if (r.track == Track::T6) r.prospective = keep ? ProspectiveChoice::Answer : ProspectiveChoice::Decline;
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ProbeRecord> generate_policy_dataset(const PolicySpec& policy,
                                                 std::span<const SyntheticItem> items,
                                                 std::uint64_t seed) {
  CounterRng rng(seed, static_cast<std::uint64_t>(policy.policy));
  return generate_policy_dataset(policy, items, rng);
}

ConsensusSet consensus_from_accuracy(std::span<const SyntheticItem> items, double threshold) {
  ConsensusSet out;
  for (const auto& item : items)
    if (item.accuracy >= threshold - 1e-12) out.insert(item.item_id);
  return out;
}

const Summary* PolicyResult::find(std::string_view name) const {
  for (const auto& [n, s] : summaries)
    if (n == name) return &s;
  return nullptr;
}

bool ValidationMatrix::all_pass() const {
  return std::all_of(policies.begin(), policies.end(), [](const PolicyResult& p) { return p.pass(); });
}

const PolicyResult* ValidationMatrix::find(Policy p) const {
  for (const auto& r : policies)
    if (r.spec.policy == p) return &r;
  return nullptr;
}

namespace {

constexpr std::array<IndexId, 12> kSummaryIndices = {
    IndexId::L,           IndexId::K,          IndexId::F,
    IndexId::Fp,          IndexId::RBS,        IndexId::TRIN,
    IndexId::WithdrawDelta, IndexId::BetDelta, IndexId::Concordance,
    IndexId::ContradictionRate, IndexId::ContradictionRateCorrect, IndexId::Accuracy};
constexpr std::size_t kSummaryCount = kSummaryIndices.size() + 1;  // + item_sensitivity

struct IterationOutcome {
  std::array<std::optional<double>, kSummaryCount> values;
  bool flagged = false;
};

std::optional<double> item_sensitivity(std::span<const ProbeRecord> records) {
  std::vector<int> keep;
  std::vector<double> correct;
  keep.reserve(records.size());
  correct.reserve(records.size());
  for (const auto& r : records) {
    keep.push_back(r.kept() ? 1 : 0);
    correct.push_back(r.correct ? 1.0 : 0.0);
  }
  try {
    return stats::point_biserial(keep, correct).r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.n_defined = values.size();
  if (values.empty()) return s;
  s.mean = stats::mean(values);
  s.sd = values.size() >= 2 ? std::sqrt(stats::variance(values)) : 0.0;
  s.ci_low = stats::quantile(values, 0.025);
  s.ci_high = stats::quantile(values, 0.975);
  return s;
}

}  // namespace

ValidationMatrix run_policy_validation(std::span<const PolicySpec> policies,
                                       std::span<const SyntheticItem> items, const ConsensusSet& consensus,
                                       const ValidationOptions& options) {
  options.thresholds.validate();
  if (options.iterations == 0) throw Error(ErrorCode::ConfigError, "iterations must be positive");
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "no items for policy validation");
  for (const auto& p : policies) p.validate();

  ValidationMatrix out;
  out.seed = options.seed;
  out.iterations = options.iterations;
  out.thresholds = options.thresholds;
  if (options.iterations < 100)
    out.warnings.push_back("fewer than 100 iterations; distributional summaries are unstable");

  const std::size_t iters = options.iterations;
  std::vector<IterationOutcome> outcomes(policies.size() * iters);
  parallel_for(outcomes.size(), options.threads, [&](std::size_t job) {
    const std::size_t pi = job / iters;
    const std::size_t it = job % iters;
    const auto& spec = policies[pi];
    CounterRng rng(options.seed, (static_cast<std::uint64_t>(spec.policy) << 32) | it);
    const auto records = generate_policy_dataset(spec, items, rng);
    const auto profile = compute_profile(to_string(spec.policy), records, consensus);
    auto& o = outcomes[job];
    for (std::size_t k = 0; k < kSummaryIndices.size(); ++k) o.values[k] = profile.get(kSummaryIndices[k]);
    o.values[kSummaryIndices.size()] = item_sensitivity(records);
    o.flagged = !tier1_flags(profile.overall, options.thresholds).empty();
  });

  for (std::size_t pi = 0; pi < policies.size(); ++pi) {
    PolicyResult res;
    res.spec = policies[pi];
    res.expected = expected_verdict(res.spec.policy);
    std::size_t flagged = 0;
    for (std::size_t k = 0; k < kSummaryCount; ++k) {
      std::vector<double> values;
      for (std::size_t it = 0; it < iters; ++it)
        if (const auto v = outcomes[pi * iters + it].values[k]) values.push_back(*v);
      const std::string name =
          k < kSummaryIndices.size() ? std::string(to_string(kSummaryIndices[k])) : "item_sensitivity";
      const Summary s = summarize(std::move(values));
      if (k < kSummaryIndices.size() && s.n_defined > 0) res.mean_profile.set(kSummaryIndices[k], s.mean);
      res.summaries.emplace_back(name, s);
    }
    for (std::size_t it = 0; it < iters; ++it) flagged += outcomes[pi * iters + it].flagged;
    res.per_iteration_flag_rate = static_cast<double>(flagged) / static_cast<double>(iters);

    const auto& th = options.thresholds;
    const std::array<std::pair<IndexId, double>, 4> rules = {
        {{IndexId::RBS, th.rbs_gt}, {IndexId::L, th.l_min}, {IndexId::F, th.f_min}, {IndexId::Fp, th.fp_min}}};
    for (const auto& [id, threshold] : rules) {
      const Summary* s = res.find(to_string(id));
      if (!s || s->n_defined == 0) continue;
      const double se = s->sd / std::sqrt(static_cast<double>(s->n_defined));
      if (s->mean != threshold && std::fabs(s->mean - threshold) <= options.snap_standard_errors * se) {
        res.mean_profile.set(id, threshold);
        res.snapped.push_back(id);
      }
    }
    res.fired = tier1_flags(res.mean_profile, th);
    res.verdict = res.fired.empty() ? Verdict::Passed : Verdict::Flagged;
    out.policies.push_back(std::move(res));
  }
  return out;
}

}  // namespace vscreen::synthetic
