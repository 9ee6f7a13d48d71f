#pragma once

// Synthetic response policies and generative validation of the tier rules.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/classify.hpp"
#include "vscreen/indices.hpp"
#include "vscreen/probe_data.hpp"
#include "vscreen/rng.hpp"

namespace vscreen::synthetic {

enum class Policy {
  AlwaysKeepBet,
  AlwaysWithdrawNoBet,
  Random5050,
  Random80Keep,
  PerfectMonitor,
  NoisyMonitor,
  InvertedMonitor,
  R1Like,
};

inline constexpr std::array<Policy, 8> kAllPolicies = {
    Policy::AlwaysKeepBet,  Policy::AlwaysWithdrawNoBet, Policy::Random5050,
    Policy::Random80Keep,   Policy::PerfectMonitor,      Policy::NoisyMonitor,
    Policy::InvertedMonitor, Policy::R1Like};

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view name);

enum class Verdict { Flagged, Passed };
std::string_view to_string(Verdict v);

// Flagged: AlwaysKeepBet, AlwaysWithdrawNoBet, Random5050, InvertedMonitor, R1Like.
Verdict expected_verdict(Policy p);

struct PolicySpec {
  Policy policy = Policy::PerfectMonitor;
  // Random5050 / Random80Keep: keep_prob. NoisyMonitor: keep_on_correct,
  // keep_on_incorrect.
  std::map<std::string, double> parameters;

  static PolicySpec defaults(Policy p);
  double param(std::string_view name) const;
  void validate() const;
};

struct SyntheticItem {
  std::string item_id;
  Track track = Track::T1;
  double accuracy = 0.0;
};

enum class AccuracyMode { FromNorms, Beta, Uniform };

struct AccuracyConfig {
  AccuracyMode mode = AccuracyMode::Beta;
  double beta_a = 7.0;
  double beta_b = 2.0;
  double uniform_lo = 0.5;
  double uniform_hi = 0.95;
  void validate() const;
};

// Track layout for n synthetic items: proportional to the full battery
// (98/90/116/60/88/72), ids "T<k>-<nnnn>".
std::vector<SyntheticItem> battery_layout(std::size_t n_items);

// Beta/Uniform draw per item on battery_layout(n_items).
std::vector<SyntheticItem> sample_item_accuracies(const AccuracyConfig& config, std::size_t n_items,
                                                  std::uint64_t seed);

// mean_accuracy of every normed item; the track comes from `item_tracks`
// when listed, otherwise from a "T<k>" id prefix, otherwise T1.
std::vector<SyntheticItem> items_from_norms(const ItemNorms& norms,
                                            const std::map<std::string, Track, std::less<>>& item_tracks = {});

// One record per item. T6 records carry ANSWER when kept, DECLINE otherwise.
std::vector<ProbeRecord> generate_policy_dataset(const PolicySpec& policy,
                                                 std::span<const SyntheticItem> items, CounterRng& rng,
                                                 std::string_view model_id = {});
std::vector<ProbeRecord> generate_policy_dataset(const PolicySpec& policy,
                                                 std::span<const SyntheticItem> items,
                                                 std::uint64_t seed);

// Stand-in consensus set when no real norms exist: items whose accuracy is
// at least the consensus threshold.
ConsensusSet consensus_from_accuracy(std::span<const SyntheticItem> items,
                                     double threshold = kConsensusThreshold);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // 0 with fewer than 2 defined values
  std::size_t n_defined = 0;
  double ci_low = 0.0;  // 2.5th / 97.5th percentile of the iteration values
  double ci_high = 0.0;
};

struct PolicyResult {
  PolicySpec spec;
  std::vector<std::pair<std::string, Summary>> summaries;  // fixed index order
  IndexSet mean_profile;       // verdict input (after Monte-Carlo snapping)
  std::vector<TriggeredRule> fired;
  std::vector<IndexId> snapped;  // indices whose mean sat within MC error of a threshold
  Verdict verdict = Verdict::Passed;
  Verdict expected = Verdict::Passed;
  double per_iteration_flag_rate = 0.0;
  bool pass() const noexcept { return verdict == expected; }
  const Summary* find(std::string_view name) const;
};

struct ValidationMatrix {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  TierThresholds thresholds;
  std::vector<PolicyResult> policies;
  std::vector<std::string> warnings;

  bool all_pass() const;
  const PolicyResult* find(Policy p) const;
};

struct ValidationOptions {
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  TierThresholds thresholds;
  // A bootstrap mean within this many Monte-Carlo standard errors of a Tier 1
  // threshold is treated as equal to it.
  double snap_standard_errors = 4.0;
  unsigned threads = 0;
};

ValidationMatrix run_policy_validation(std::span<const PolicySpec> policies,
                                       std::span<const SyntheticItem> items, const ConsensusSet& consensus,
                                       const ValidationOptions& options);

}  // namespace vscreen::synthetic
