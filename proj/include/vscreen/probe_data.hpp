#pragma once

// Probe CSV ingestion, dataset indexing, and derivation-sample item norms.

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vscreen {

enum class Track { T1, T2, T3, T4, T5, T6 };
enum class KeepChoice { Keep, Withdraw };
enum class BetChoice { Bet, NoBet };
enum class ProspectiveChoice { Answer, Hint, Decline };

inline constexpr std::array<Track, 6> kAllTracks = {Track::T1, Track::T2, Track::T3,
                                                    Track::T4, Track::T5, Track::T6};
inline constexpr std::array<Track, 5> kRetrospectiveTracks = {Track::T1, Track::T2, Track::T3,
                                                              Track::T4, Track::T5};
// Full battery layout: 524 items.
inline constexpr std::array<std::size_t, 6> kExpectedTrackSizes = {98, 90, 116, 60, 88, 72};

std::string_view to_string(Track t);
std::string_view to_string(KeepChoice k);
std::string_view to_string(BetChoice b);
std::string_view to_string(ProspectiveChoice p);
std::optional<Track> parse_track(std::string_view s);

inline bool is_retrospective(Track t) { return t != Track::T6; }

struct ProbeRecord {
  std::string model_id;
  Track track = Track::T1;
  std::string item_id;
  std::string domain;
  bool correct = false;
  KeepChoice keep = KeepChoice::Keep;
  BetChoice bet = BetChoice::Bet;
  std::optional<ProspectiveChoice> prospective;  // present iff track == T6

  bool kept() const noexcept { return keep == KeepChoice::Keep; }
  bool withdrew() const noexcept { return keep == KeepChoice::Withdraw; }
  bool bet_on() const noexcept { return bet == BetChoice::Bet; }

  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

inline constexpr std::string_view kProbeCsvHeader =
    "model,track,item_id,domain,correct,keep,bet,prospective_choice";

// Throws ParseError (with row and column) or SchemaError.
std::vector<ProbeRecord> parse_probe_csv(std::istream& in, std::string_view source = "<stream>");
std::vector<ProbeRecord> parse_probe_csv(std::string_view text, std::string_view source = "<string>");
void write_probe_csv(std::ostream& out, std::span<const ProbeRecord> records);

// Every *.csv under `dir` (non-recursive), parsed in parallel and merged in
// (model_id, item_id) order.
std::vector<ProbeRecord> load_probe_directory(const std::filesystem::path& dir, unsigned threads = 0);

class Dataset {
 public:
  // Sorts by (model_id, item_id). Throws EmptyInput, DuplicateRecord, or
  // SchemaError when one item_id appears under two tracks.
  static Dataset build(std::vector<ProbeRecord> records);

  std::span<const ProbeRecord> records() const { return records_; }
  std::span<const ProbeRecord> records_for(std::string_view model_id) const;
  const std::vector<std::string>& models() const { return models_; }
  const std::vector<std::string>& items() const { return items_; }  // sorted
  Track track_of(std::string_view item_id) const;
  const std::map<Track, std::size_t>& track_sizes() const { return track_sizes_; }
  const std::map<std::string, std::size_t>& coverage() const { return coverage_; }
  // Deviations from the full-battery layout and partial per-model coverage.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<ProbeRecord> records_;
  std::vector<std::string> models_;
  std::vector<std::string> items_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> model_ranges_;
  std::map<std::string, Track, std::less<>> item_tracks_;
  std::map<Track, std::size_t> track_sizes_;
  std::map<std::string, std::size_t> coverage_;
  std::vector<std::string> warnings_;
};

inline Dataset build_dataset(std::vector<ProbeRecord> records) {
  return Dataset::build(std::move(records));
}

struct ItemNorm {
  std::size_t n_models = 0;
  double p_keep = 0.0;
  double p_bet = 0.0;
  double mean_accuracy = 0.0;

  friend bool operator==(const ItemNorm&, const ItemNorm&) = default;
};

using ItemNorms = std::map<std::string, ItemNorm, std::less<>>;

// Rates over every model that saw the item. With `exclude_model`, that
// model's records are left out (leave-one-out norms); items it alone saw are
// then absent from the result.
ItemNorms compute_item_norms(const Dataset& ds, std::optional<std::string_view> exclude_model = {});

inline constexpr double kConsensusThreshold = 0.85;

// Items with p_keep >= threshold (inclusive).
std::set<std::string, std::less<>> consensus_items(const ItemNorms& norms,
                                                   double threshold = kConsensusThreshold);

// JSON: item_id -> {n, p_keep, p_bet, mean_accuracy}.
std::string norms_to_json(const ItemNorms& norms);
ItemNorms norms_from_json(std::string_view text);
ItemNorms load_norms(const std::filesystem::path& path);

}  // namespace vscreen
