#pragma once

// Validation battery over a sample of validity profiles.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vscreen/bootstrap.hpp"
#include "vscreen/classify.hpp"
#include "vscreen/indices.hpp"
#include "vscreen/stats.hpp"

namespace vscreen::psych {

// ---- reliability ---------------------------------------------------------

struct AlphaEntry {
  IndexId index = IndexId::L;
  std::optional<double> alpha;
  std::size_t n_models = 0;   // complete cases used
  std::size_t n_dropped = 0;  // models with an undefined track value
  std::size_t n_parts = 0;
  std::string note;
};

struct SplitHalfEntry {
  IndexId index = IndexId::L;
  Track track = Track::T1;
  std::optional<double> r;
  std::optional<double> r_sb;
  std::size_t n_models = 0;
  std::size_t n_dropped = 0;
};

struct ReliabilityReport {
  std::vector<AlphaEntry> alphas;
  std::vector<SplitHalfEntry> split_half;
};

// Alpha treats each model's per-track index values as parts. Split halves
// are odd/even positions of the lexicographic item_id order within a track.
ReliabilityReport reliability_suite(const Dataset& ds, std::span<const ValidityProfile> profiles,
                                    const ConsensusSet& consensus);

// ---- inter-scale structure -----------------------------------------------

struct PairCorrelation {
  IndexId a = IndexId::L;
  IndexId b = IndexId::K;
  std::optional<stats::CorrelationResult> result;
  std::size_t n_dropped = 0;
};

struct ScaleCorrelations {
  std::array<IndexId, 6> order = kCoreIndices;
  // 6 x 6, row-major; diagonal r = 1.
  std::vector<std::optional<stats::CorrelationResult>> matrix;
  std::vector<PairCorrelation> convergent;    // L-K, F-Fp, withdraw_delta-bet_delta
  std::vector<PairCorrelation> discriminant;  // L-F, L-accuracy

  const std::optional<stats::CorrelationResult>& at(std::size_t i, std::size_t j) const {
    return matrix[i * order.size() + j];
  }
};

PairCorrelation correlate_indices(std::span<const ValidityProfile> profiles, IndexId a, IndexId b);
ScaleCorrelations scale_correlations(std::span<const ValidityProfile> profiles);

struct PcaResult {
  std::vector<IndexId> variables;  // after dropping constant indices
  std::vector<IndexId> dropped;
  std::vector<double> eigenvalues;
  std::vector<double> variance_fractions;
  stats::Matrix loadings;       // variables x components
  stats::Matrix correlation;    // variables x variables
  std::size_t n_cases = 0;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinPcaCases = 7;

// Correlation-matrix PCA over the six core indices (listwise complete).
// Loadings are eigenvector * sqrt(eigenvalue), each component signed so its
// largest-magnitude loading is positive.
PcaResult pca_indices(std::span<const ValidityProfile> profiles);

// ---- item sensitivity and group comparison -------------------------------

struct ModelSensitivity {
  std::string model_id;
  std::optional<stats::CorrelationResult> result;  // r(KEEP, correct) over all items
};

std::vector<ModelSensitivity> item_sensitivity(const Dataset& ds);
std::optional<stats::CorrelationResult> item_sensitivity(std::span<const ProbeRecord> records);

enum class ResampleScheme { Stratified, Pooled };

struct GroupComparisonOptions {
  std::size_t bootstrap_iterations = 10000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  ResampleScheme scheme = ResampleScheme::Stratified;
  unsigned threads = 0;
};

struct LeaveOneOut {
  std::string model_id;
  std::optional<double> d;
  std::optional<double> p;
};

struct GroupComparison {
  std::vector<std::string> valid_models;    // Valid + Tier 2
  std::vector<std::string> invalid_models;  // Tier 1
  std::vector<std::string> excluded;        // undefined sensitivity or Unclassifiable
  stats::SampleStats valid_stats;
  stats::SampleStats invalid_stats;
  std::size_t valid_significant_positive = 0;
  std::size_t invalid_significant_positive = 0;
  double d = 0.0;
  stats::TTestResult t;
  std::optional<stats::BootstrapResult> ci;
  std::string ci_note;
  std::vector<LeaveOneOut> leave_one_out;
};

// Group-level comparison from raw per-group values.
GroupComparison compare_groups(std::span<const std::pair<std::string, double>> valid,
                               std::span<const std::pair<std::string, double>> invalid,
                               const GroupComparisonOptions& options);

GroupComparison group_comparison(std::span<const ModelSensitivity> sensitivities,
                                 const Classification& classification,
                                 const GroupComparisonOptions& options);

// ---- incremental regression ----------------------------------------------

struct IncrementalResult {
  std::string dependent;  // "withdraw_delta" or "item_sensitivity"
  std::optional<stats::RegressionResult> reduced;  // y ~ accuracy
  std::optional<stats::RegressionResult> full;     // y ~ accuracy + L
  double delta_r2 = 0.0;
  std::optional<stats::FTestResult> f_test;
  std::size_t n = 0;
  std::string note;
};

// Generic nested fit: y ~ base, then y ~ base + added.
IncrementalResult incremental_fit(std::string dependent, std::span<const double> y,
                                  std::span<const double> base, std::span<const double> added);

std::vector<IncrementalResult> incremental_regression(std::span<const ValidityProfile> profiles,
                                                      std::span<const ModelSensitivity> sensitivities);

// ---- item discriminators -------------------------------------------------

enum class DiscriminatorOutcome { Keep, Bet };

struct ItemDiscriminator {
  std::string item_id;
  Track track = Track::T1;
  std::optional<stats::CorrelationResult> result;
  std::string status;  // "ok", "zero_variance", "insufficient"
};

struct TrackDiscriminatorCount {
  std::size_t items = 0;
  std::size_t tested = 0;
  std::size_t significant = 0;
  std::size_t undefined = 0;
  std::size_t insufficient = 0;
};

struct DiscriminatorReport {
  std::vector<ItemDiscriminator> items;
  std::map<Track, TrackDiscriminatorCount> per_track;
  TrackDiscriminatorCount total;
  double alpha = 0.05;
};

inline constexpr std::size_t kMinModelsPerGroupPerItem = 3;

// Point-biserial between group membership (valid-side = 1, Tier 1 = 0) and
// the item's KEEP (or BET) indicator across models; uncorrected p.
DiscriminatorReport item_discriminators(const Dataset& ds, const Classification& classification,
                                        DiscriminatorOutcome outcome = DiscriminatorOutcome::Keep,
                                        double alpha = 0.05);

// ---- contingency, families, pairs ----------------------------------------

struct Contingency {
  std::size_t keep_bet = 0;
  std::size_t keep_no_bet = 0;
  std::size_t withdraw_bet = 0;
  std::size_t withdraw_no_bet = 0;

  std::size_t total() const noexcept { return keep_bet + keep_no_bet + withdraw_bet + withdraw_no_bet; }
};

Contingency contingency_table(std::span<const ProbeRecord> records);

struct ModelContingency {
  std::string model_id;
  Contingency all;
  std::map<Track, Contingency> per_track;
};

std::vector<ModelContingency> contingency_tables(const Dataset& ds);

inline constexpr std::array<IndexId, 12> kSummaryIndices = {
    IndexId::L,  IndexId::K,  IndexId::F,  IndexId::Fp,  IndexId::RBS,  IndexId::TRIN,
    IndexId::WithdrawDelta,   IndexId::BetDelta,         IndexId::Concordance,
    IndexId::ContradictionRate, IndexId::ContradictionRateCorrect, IndexId::Accuracy};

struct IndexSpread {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> sd;
  std::optional<double> min;
  std::optional<double> max;
};

struct FamilySummary {
  std::string family;
  std::vector<std::string> members;
  std::map<IndexId, IndexSpread> indices;
};

struct PairDelta {
  std::string model_a;
  std::string model_b;
  std::map<IndexId, std::optional<double>> deltas;  // b - a
};

struct FamilyPairSummaries {
  std::vector<FamilySummary> families;
  std::vector<PairDelta> pairs;
};

// Throws ConfigError when the map or a pair names a model not in `profiles`.
FamilyPairSummaries family_and_paired_summaries(std::span<const ValidityProfile> profiles,
                                                const std::map<std::string, std::string>& family_map,
                                                std::span<const std::pair<std::string, std::string>> pairs);

// ---- whole battery -------------------------------------------------------

struct PsychometricOptions {
  GroupComparisonOptions group;
  DiscriminatorOutcome discriminator_outcome = DiscriminatorOutcome::Keep;
  std::map<std::string, std::string> family_map;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct PsychometricReport {
  ReliabilityReport reliability;
  ScaleCorrelations correlations;
  std::optional<PcaResult> pca;
  std::vector<ModelSensitivity> sensitivity;
  std::optional<GroupComparison> group;
  std::vector<IncrementalResult> incremental;
  std::optional<DiscriminatorReport> discriminators;
  std::vector<ModelContingency> contingency;
  FamilyPairSummaries families;
  std::vector<std::string> warnings;
};

PsychometricReport run_psychometrics(const Dataset& ds, std::span<const ValidityProfile> profiles,
                                     const Classification& classification, const ConsensusSet& consensus,
                                     const PsychometricOptions& options);

}  // namespace vscreen::psych
