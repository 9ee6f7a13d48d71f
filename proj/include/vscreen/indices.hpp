#pragma once

// Validity indices for one model's probe responses.
//
// Every conditional rate is std::nullopt when its conditioning set is empty;
// an undefined index is never reported as 0.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/probe_data.hpp"

namespace vscreen {

enum class IndexId {
  L,
  K,
  F,
  Fp,
  RBS,
  TRIN,
  WithdrawDelta,
  BetDelta,
  Concordance,
  ContradictionRate,
  ContradictionRateCorrect,
  Accuracy,
};

inline constexpr std::array<IndexId, 6> kCoreIndices = {IndexId::L,  IndexId::K,   IndexId::F,
                                                        IndexId::Fp, IndexId::RBS, IndexId::TRIN};

std::string_view to_string(IndexId id);
std::optional<IndexId> parse_index(std::string_view name);

// Joint counts over a set of records; every index is a function of these.
struct ResponseTally {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t keep_correct = 0;
  std::size_t keep_incorrect = 0;
  std::size_t bet_correct = 0;
  std::size_t bet_incorrect = 0;
  std::size_t keep_and_bet = 0;
  std::size_t withdraw_bet_correct = 0;
  std::size_t withdraw_bet_incorrect = 0;
  std::size_t n_consensus = 0;
  std::size_t withdraw_consensus = 0;

  std::size_t n_incorrect() const noexcept { return n - n_correct; }
  std::size_t n_keep() const noexcept { return keep_correct + keep_incorrect; }
  std::size_t n_bet() const noexcept { return bet_correct + bet_incorrect; }

  void add(const ProbeRecord& r, bool consensus_item) noexcept;
};

using ConsensusSet = std::set<std::string, std::less<>>;

ResponseTally tally(std::span<const ProbeRecord> records, const ConsensusSet& consensus);

struct IndexSet {
  std::optional<double> L;
  std::optional<double> K;
  std::optional<double> F;
  std::optional<double> Fp;
  std::optional<double> RBS;
  std::optional<double> TRIN;
  std::optional<double> withdraw_delta;
  std::optional<double> bet_delta;
  std::optional<double> concordance;
  std::optional<double> contradiction_rate;
  std::optional<double> contradiction_rate_correct;
  std::optional<double> accuracy;
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
  std::size_t n_consensus = 0;

  std::optional<double> get(IndexId id) const;
  void set(IndexId id, std::optional<double> value);
};

IndexSet indices_from_tally(const ResponseTally& t);

// Single-index entry points over retrospective (T1-T5) records of one model.
std::optional<double> compute_L(std::span<const ProbeRecord> records);
std::optional<double> compute_K(std::span<const ProbeRecord> records);
std::optional<double> compute_F(std::span<const ProbeRecord> records, const ConsensusSet& consensus);
std::optional<double> compute_Fp(std::span<const ProbeRecord> records);
std::optional<double> compute_RBS(std::span<const ProbeRecord> records);
std::optional<double> compute_TRIN(std::span<const ProbeRecord> records);

struct Auxiliaries {
  std::optional<double> withdraw_delta;
  std::optional<double> bet_delta;
  std::optional<double> concordance;
  std::optional<double> contradiction_rate;
  std::optional<double> contradiction_rate_correct;
};
Auxiliaries compute_auxiliaries(std::span<const ProbeRecord> records);

enum class Phenotype { Monitor, Inverted, Fixed, Indeterminate };
std::string_view to_string(Phenotype p);

struct PhenotypeRule {
  double monitor_min_delta = 0.10;    // withdraw_delta >= this
  double inverted_max_delta = -0.10;  // withdraw_delta <= this
  double fixed_min_trin = 0.95;
};

std::optional<Phenotype> classify_phenotype(const IndexSet& track, const PhenotypeRule& rule = {});

struct IcnResult {
  std::optional<std::size_t> switches;  // undefined with < 2 labelable tracks
  std::map<Track, Phenotype> labels;
};

// Label changes across T1..T5 in order; tracks without a defined
// withdraw_delta are skipped.
IcnResult compute_ICN(const std::map<Track, IndexSet>& per_track, const PhenotypeRule& rule = {});

// Which prospective choices count as the KEEP-analogue.
struct ProspectiveMapping {
  bool answer_keeps = true;
  bool hint_keeps = false;
  bool decline_keeps = false;

  bool keeps(ProspectiveChoice c) const noexcept;
};

struct RetroProspective {
  std::optional<double> L_retro;
  std::optional<double> L_prosp;
};

RetroProspective retro_prospective_split(std::span<const ProbeRecord> records,
                                         const ProspectiveMapping& mapping = {});

struct ProfileOptions {
  PhenotypeRule phenotype;
  ProspectiveMapping prospective;
};

struct ValidityProfile {
  std::string model_id;
  IndexSet overall;  // T1-T5
  std::map<Track, IndexSet> per_track;
  IcnResult icn;
  RetroProspective split;

  std::optional<double> get(IndexId id) const { return overall.get(id); }
};

// `records` are one model's records (any tracks).
ValidityProfile compute_profile(std::string_view model_id, std::span<const ProbeRecord> records,
                                const ConsensusSet& consensus, const ProfileOptions& options = {});

struct DatasetProfileOptions {
  ProfileOptions profile;
  double consensus_threshold = kConsensusThreshold;
  bool leave_one_out_norms = false;
  unsigned threads = 0;
};

// One profile per model in model_id order. Consensus comes from `norms`, or
// from per-model leave-one-out norms when requested.
std::vector<ValidityProfile> compute_profiles(const Dataset& ds, const ItemNorms& norms,
                                              const DatasetProfileOptions& options = {});

}  // namespace vscreen
