#pragma once

// Two-tier validity classification and threshold-stability sweeps.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/indices.hpp"

namespace vscreen {

struct TierThresholds {
  double rbs_gt = 0.0;   // strict: RBS > rbs_gt
  double l_min = 0.95;   // inclusive
  double f_min = 0.50;   // inclusive
  double fp_min = 0.50;  // inclusive
  double tier2_elevated_sd = 1.5;
  double tier2_marked_sd = 2.0;

  // Throws ConfigError on out-of-range values or marked < elevated.
  void validate() const;
};

enum class Tier { Valid, Tier2Elevated, Tier2Marked, Tier1Invalid, Unclassifiable };
std::string_view to_string(Tier t);

struct TriggeredRule {
  IndexId index = IndexId::L;
  double value = 0.0;
  double threshold = 0.0;
  bool tier1 = true;
};

struct ReferenceStat {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;
};

struct TierAssignment {
  std::string model_id;
  Tier tier = Tier::Valid;
  std::vector<TriggeredRule> triggered_rules;
};

// Indices entering the sample-referenced tier.
inline constexpr std::array<IndexId, 5> kTier2Indices = {IndexId::L, IndexId::K, IndexId::F,
                                                         IndexId::Fp, IndexId::TRIN};

// Construct-level rules: RBS > rbs_gt; L >= l_min; F >= f_min; Fp >= fp_min.
// Undefined indices never fire.
std::vector<TriggeredRule> tier1_flags(const IndexSet& indices, const TierThresholds& thresholds);

struct Classification {
  std::vector<TierAssignment> assignments;  // same order as the input profiles
  std::map<IndexId, ReferenceStat> reference_stats;
  bool tier2_applied = false;
  std::vector<std::string> warnings;

  std::set<std::string> tier1_models() const;
  const TierAssignment* find(std::string_view model_id) const;
};

inline constexpr std::size_t kMinTier2Reference = 5;

// Tier 1 first; Tier 2 z-rules on the remaining models. Throws
// EmptyReferenceGroup when every model is Tier 1.
Classification classify_sample(std::span<const ValidityProfile> profiles, const TierThresholds& thresholds);

struct SweepPoint {
  double l_min = 0.0;
  double f_min = 0.0;  // F and Fp move together
  std::set<std::string> tier1;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  bool stable = true;  // identical Tier 1 set at every grid point
};

// Inclusive grid lo, lo + step, ..., hi.
std::vector<double> make_grid(double lo, double hi, double step);

SweepResult threshold_sweep(std::span<const ValidityProfile> profiles, std::span<const double> l_grid,
                            std::span<const double> f_grid, const TierThresholds& base = {});

}  // namespace vscreen
