#include "vscreen/indices.hpp"

#include <algorithm>
#include <cmath>

#include "vscreen/error.hpp"
#include "vscreen/parallel.hpp"

namespace vscreen {

std::string_view to_string(IndexId id) {
  switch (id) {
    case IndexId::L: return "L";
    case IndexId::K: return "K";
    case IndexId::F: return "F";
    case IndexId::Fp: return "Fp";
    case IndexId::RBS: return "RBS";
    case IndexId::TRIN: return "TRIN";
    case IndexId::WithdrawDelta: return "withdraw_delta";
    case IndexId::BetDelta: return "bet_delta";
    case IndexId::Concordance: return "concordance";
    case IndexId::ContradictionRate: return "contradiction_rate";
    case IndexId::ContradictionRateCorrect: return "contradiction_rate_correct";
    case IndexId::Accuracy: return "accuracy";
  }
  return "";
}

std::optional<IndexId> parse_index(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(IndexId::Accuracy); ++i) {
    const auto id = static_cast<IndexId>(i);
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

void ResponseTally::add(const ProbeRecord& r, bool consensus_item) noexcept {
  ++n;
  const bool keep = r.kept();
  const bool bet = r.bet_on();
  if (r.correct) {
    ++n_correct;
    keep_correct += keep;
    bet_correct += bet;
    withdraw_bet_correct += (!keep && bet);
  } else {
    keep_incorrect += keep;
    bet_incorrect += bet;
    withdraw_bet_incorrect += (!keep && bet);
  }
  keep_and_bet += (keep && bet);
  if (consensus_item) {
    ++n_consensus;
    withdraw_consensus += !keep;
  }
}

ResponseTally tally(std::span<const ProbeRecord> records, const ConsensusSet& consensus) {
  ResponseTally t;
  for (const auto& r : records) t.add(r, consensus.count(r.item_id) > 0);
  return t;
}

std::optional<double> IndexSet::get(IndexId id) const {
  switch (id) {
    case IndexId::L: return L;
    case IndexId::K: return K;
    case IndexId::F: return F;
    case IndexId::Fp: return Fp;
    case IndexId::RBS: return RBS;
    case IndexId::TRIN: return TRIN;
    case IndexId::WithdrawDelta: return withdraw_delta;
    case IndexId::BetDelta: return bet_delta;
    case IndexId::Concordance: return concordance;
    case IndexId::ContradictionRate: return contradiction_rate;
    case IndexId::ContradictionRateCorrect: return contradiction_rate_correct;
    case IndexId::Accuracy: return accuracy;
  }
  return std::nullopt;
}

void IndexSet::set(IndexId id, std::optional<double> value) {
  switch (id) {
    case IndexId::L: L = value; break;
    case IndexId::K: K = value; break;
    case IndexId::F: F = value; break;
    case IndexId::Fp: Fp = value; break;
    case IndexId::RBS: RBS = value; break;
    case IndexId::TRIN: TRIN = value; break;
    case IndexId::WithdrawDelta: withdraw_delta = value; break;
    case IndexId::BetDelta: bet_delta = value; break;
    case IndexId::Concordance: concordance = value; break;
    case IndexId::ContradictionRate: contradiction_rate = value; break;
    case IndexId::ContradictionRateCorrect: contradiction_rate_correct = value; break;
    case IndexId::Accuracy: accuracy = value; break;
  }
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<ProbeRecord> retrospective_only(std::span<const ProbeRecord> records) {
  std::vector<ProbeRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const ProbeRecord& r) { return is_retrospective(r.track); });
  return out;
}

IndexSet retrospective_indices(std::span<const ProbeRecord> records, const ConsensusSet& consensus) {
  return indices_from_tally(tally(retrospective_only(records), consensus));
}

}  // namespace

IndexSet indices_from_tally(const ResponseTally& t) {
  IndexSet s;
  s.n = t.n;
  s.n_correct = t.n_correct;
  s.n_incorrect = t.n_incorrect();
  s.n_consensus = t.n_consensus;

  const std::size_t wd_correct = t.n_correct - t.keep_correct;
  const std::size_t wd_incorrect = t.n_incorrect() - t.keep_incorrect;
  s.L = ratio(t.keep_incorrect, t.n_incorrect());
  s.K = ratio(t.bet_incorrect, t.n_incorrect());
  s.F = ratio(t.withdraw_consensus, t.n_consensus);
  s.Fp = ratio(wd_correct, t.n_correct);
  s.accuracy = ratio(t.n_correct, t.n);
  if (t.n > 0)
    s.TRIN = static_cast<double>(std::max(t.n_keep(), t.n - t.n_keep())) / static_cast<double>(t.n);

  const auto p_wd_incorrect = ratio(wd_incorrect, t.n_incorrect());
  if (s.Fp && p_wd_incorrect) {
    s.RBS = *s.Fp - *p_wd_incorrect;
    s.withdraw_delta = *p_wd_incorrect - *s.Fp;
  }
  const auto p_bet_correct = ratio(t.bet_correct, t.n_correct);
  if (p_bet_correct && s.K) s.bet_delta = *p_bet_correct - *s.K;

  // Phi coefficient of the KEEP and BET indicators.
  const double n = static_cast<double>(t.n);
  const double keeps = static_cast<double>(t.n_keep());
  const double bets = static_cast<double>(t.n_bet());
  const double denom = keeps * (n - keeps) * bets * (n - bets);
  if (denom > 0.0)
    s.concordance = std::clamp(
        (n * static_cast<double>(t.keep_and_bet) - keeps * bets) / std::sqrt(denom), -1.0, 1.0);

  s.contradiction_rate = ratio(t.withdraw_bet_correct + t.withdraw_bet_incorrect, t.n);
  s.contradiction_rate_correct = ratio(t.withdraw_bet_correct, t.n_correct);
  return s;
}

std::optional<double> compute_L(std::span<const ProbeRecord> records) {
  return retrospective_indices(records, {}).L;
}
std::optional<double> compute_K(std::span<const ProbeRecord> records) {
  return retrospective_indices(records, {}).K;
}
std::optional<double> compute_F(std::span<const ProbeRecord> records, const ConsensusSet& consensus) {
  return retrospective_indices(records, consensus).F;
}
std::optional<double> compute_Fp(std::span<const ProbeRecord> records) {
  return retrospective_indices(records, {}).Fp;
}
std::optional<double> compute_RBS(std::span<const ProbeRecord> records) {
  return retrospective_indices(records, {}).RBS;
}
std::optional<double> compute_TRIN(std::span<const ProbeRecord> records) {
  return retrospective_indices(records, {}).TRIN;
}

Auxiliaries compute_auxiliaries(std::span<const ProbeRecord> records) {
  const auto s = retrospective_indices(records, {});
  return {s.withdraw_delta, s.bet_delta, s.concordance, s.contradiction_rate,
          s.contradiction_rate_correct};
}

std::string_view to_string(Phenotype p) {
  switch (p) {
    case Phenotype::Monitor: return "monitor";
    case Phenotype::Inverted: return "inverted";
    case Phenotype::Fixed: return "fixed";
    case Phenotype::Indeterminate: return "indeterminate";
  }
  return "";
}

std::optional<Phenotype> classify_phenotype(const IndexSet& track, const PhenotypeRule& rule) {
  if (!track.withdraw_delta) return std::nullopt;
  const double dw = *track.withdraw_delta;
  if (dw >= rule.monitor_min_delta) return Phenotype::Monitor;
  if (dw <= rule.inverted_max_delta) return Phenotype::Inverted;
  if (track.TRIN && *track.TRIN >= rule.fixed_min_trin) return Phenotype::Fixed;
  return Phenotype::Indeterminate;
}

IcnResult compute_ICN(const std::map<Track, IndexSet>& per_track, const PhenotypeRule& rule) {
  IcnResult out;
  std::vector<Phenotype> sequence;
  for (Track t : kRetrospectiveTracks) {
    const auto it = per_track.find(t);
    if (it == per_track.end()) continue;
    if (const auto label = classify_phenotype(it->second, rule)) {
      out.labels.emplace(t, *label);
      sequence.push_back(*label);
    }
  }
  if (sequence.size() < 2) return out;
  std::size_t switches = 0;
  for (std::size_t i = 1; i < sequence.size(); ++i) switches += sequence[i] != sequence[i - 1];
  out.switches = switches;
  return out;
}

bool ProspectiveMapping::keeps(ProspectiveChoice c) const noexcept {
  switch (c) {
    case ProspectiveChoice::Answer: return answer_keeps;
    case ProspectiveChoice::Hint: return hint_keeps;
    case ProspectiveChoice::Decline: return decline_keeps;
  }
  return false;
}

RetroProspective retro_prospective_split(std::span<const ProbeRecord> records,
                                         const ProspectiveMapping& mapping) {
  RetroProspective out;
  std::size_t retro_incorrect = 0, retro_keep = 0, prosp_incorrect = 0, prosp_keep = 0;
  for (const auto& r : records) {
    if (r.correct) continue;
    if (is_retrospective(r.track)) {
      ++retro_incorrect;
      retro_keep += r.kept();
    } else if (r.prospective) {
      ++prosp_incorrect;
      prosp_keep += mapping.keeps(*r.prospective);
    }
  }
  out.L_retro = ratio(retro_keep, retro_incorrect);
  out.L_prosp = ratio(prosp_keep, prosp_incorrect);
  return out;
}

ValidityProfile compute_profile(std::string_view model_id, std::span<const ProbeRecord> records,
                                const ConsensusSet& consensus, const ProfileOptions& options) {
  ValidityProfile p;
  p.model_id = std::string(model_id);
  std::map<Track, ResponseTally> tallies;
  ResponseTally overall;
  for (const auto& r : records) {
    const bool in_consensus = consensus.count(r.item_id) > 0;
    tallies[r.track].add(r, in_consensus);
    if (is_retrospective(r.track)) overall.add(r, in_consensus);
  }
  p.overall = indices_from_tally(overall);
  for (const auto& [track, t] : tallies) p.per_track.emplace(track, indices_from_tally(t));
  p.icn = compute_ICN(p.per_track, options.phenotype);
  p.split = retro_prospective_split(records, options.prospective);
  return p;
}

std::vector<ValidityProfile> compute_profiles(const Dataset& ds, const ItemNorms& norms,
                                              const DatasetProfileOptions& options) {
  const auto& models = ds.models();
  std::vector<ValidityProfile> out(models.size());
  const ConsensusSet shared =
      options.leave_one_out_norms ? ConsensusSet{} : consensus_items(norms, options.consensus_threshold);
  parallel_for(models.size(), options.threads, [&](std::size_t i) {
    if (options.leave_one_out_norms) {
      const auto loo = compute_item_norms(ds, models[i]);
      out[i] = compute_profile(models[i], ds.records_for(models[i]),
                               consensus_items(loo, options.consensus_threshold), options.profile);
    } else {
      out[i] = compute_profile(models[i], ds.records_for(models[i]), shared, options.profile);
    }
  });
  return out;
}

}  // namespace vscreen
