#include "vscreen/probe_data.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "vscreen/error.hpp"
#include "vscreen/parallel.hpp"

namespace vscreen {

std::string_view to_string(Track t) {
  static constexpr std::array<std::string_view, 6> names = {"T1", "T2", "T3", "T4", "T5", "T6"};
  return names[static_cast<std::size_t>(t)];
}
std::string_view to_string(KeepChoice k) { return k == KeepChoice::Keep ? "KEEP" : "WITHDRAW"; }
std::string_view to_string(BetChoice b) { return b == BetChoice::Bet ? "BET" : "NO_BET"; }
std::string_view to_string(ProspectiveChoice p) {
  switch (p) {
    case ProspectiveChoice::Answer: return "ANSWER";
    case ProspectiveChoice::Hint: return "HINT";
    case ProspectiveChoice::Decline: return "DECLINE";
  }
  return "";
}

std::optional<Track> parse_track(std::string_view s) {
  for (Track t : kAllTracks)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 8> kColumns = {
    "model", "track", "item_id", "domain", "correct", "keep", "bet", "prospective_choice"};

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

[[noreturn]] void bad_token(std::string_view source, std::size_t row, std::string_view column,
                            std::string_view token, std::string_view legal) {
  throw Error(ErrorCode::ParseError, std::string(source) + " row " + std::to_string(row) +
                                         ", column '" + std::string(column) + "': token '" +
                                         std::string(token) + "' not in {" + std::string(legal) +
                                         "}");
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

bool record_less(const ProbeRecord& a, const ProbeRecord& b) {
  if (a.model_id != b.model_id) return a.model_id < b.model_id;
  return a.item_id < b.item_id;
}

}  // namespace

std::vector<ProbeRecord> parse_probe_csv(std::istream& in, std::string_view source) {
  std::vector<ProbeRecord> records;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!header_seen) {
      if (line != kProbeCsvHeader)
        throw Error(ErrorCode::SchemaError, std::string(source) + ": header must be exactly '" +
                                                std::string(kProbeCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, row);
    if (fields.size() != kColumns.size())
      throw Error(ErrorCode::ParseError, std::string(source) + " row " + std::to_string(row) +
                                             ": expected 8 columns, found " +
                                             std::to_string(fields.size()));
    ProbeRecord r;
    r.model_id = fields[0];
    if (r.model_id.empty())
      throw Error(ErrorCode::ParseError, std::string(source) + " row " + std::to_string(row) +
                                             ", column 'model': empty model id");
    const auto track = parse_track(fields[1]);
    if (!track) bad_token(source, row, kColumns[1], fields[1], "T1,T2,T3,T4,T5,T6");
    r.track = *track;
    r.item_id = fields[2];
    if (r.item_id.empty())
      throw Error(ErrorCode::ParseError, std::string(source) + " row " + std::to_string(row) +
                                             ", column 'item_id': empty item id");
    r.domain = fields[3];
    if (fields[4] == "1") r.correct = true;
    else if (fields[4] == "0") r.correct = false;
    else bad_token(source, row, kColumns[4], fields[4], "0,1");
    if (fields[5] == "KEEP") r.keep = KeepChoice::Keep;
    else if (fields[5] == "WITHDRAW") r.keep = KeepChoice::Withdraw;
    else bad_token(source, row, kColumns[5], fields[5], "KEEP,WITHDRAW");
    if (fields[6] == "BET") r.bet = BetChoice::Bet;
    else if (fields[6] == "NO_BET") r.bet = BetChoice::NoBet;
    else bad_token(source, row, kColumns[6], fields[6], "BET,NO_BET");
    const std::string& pc = fields[7];
    if (pc == "ANSWER") r.prospective = ProspectiveChoice::Answer;
    else if (pc == "HINT") r.prospective = ProspectiveChoice::Hint;
    else if (pc == "DECLINE") r.prospective = ProspectiveChoice::Decline;
    else if (!pc.empty()) bad_token(source, row, kColumns[7], pc, "ANSWER,HINT,DECLINE,<empty>");
    if (r.track == Track::T6 && !r.prospective)
      throw Error(ErrorCode::SchemaError, std::string(source) + " row " + std::to_string(row) +
                                              ": T6 record without prospective_choice");
    if (r.track != Track::T6 && r.prospective)
      throw Error(ErrorCode::SchemaError, std::string(source) + " row " + std::to_string(row) +
                                              ": prospective_choice only allowed on T6");
    records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::SchemaError, std::string(source) + ": missing header row");
  return records;
}

std::vector<ProbeRecord> parse_probe_csv(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  return parse_probe_csv(in, source);
}

void write_probe_csv(std::ostream& out, std::span<const ProbeRecord> records) {
  out << kProbeCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_escape(r.model_id) << ',' << to_string(r.track) << ',' << csv_escape(r.item_id) << ','
        << csv_escape(r.domain) << ',' << (r.correct ? '1' : '0') << ',' << to_string(r.keep) << ','
        << to_string(r.bet) << ',';
    if (r.prospective) out << to_string(*r.prospective);
    out << '\n';
  }
}

std::vector<ProbeRecord> load_probe_directory(const std::filesystem::path& dir, unsigned threads) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(ErrorCode::IoError, "data directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::EmptyInput, "no .csv files in '" + dir.string() + "'");

  std::vector<std::vector<ProbeRecord>> parsed(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) {
    std::ifstream in(files[i], std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + files[i].string() + "'");
    parsed[i] = parse_probe_csv(in, files[i].filename().string());
  });
  std::vector<ProbeRecord> merged;
  for (auto& p : parsed) std::move(p.begin(), p.end(), std::back_inserter(merged));
  std::stable_sort(merged.begin(), merged.end(), record_less);
  return merged;
}

Dataset Dataset::build(std::vector<ProbeRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyInput, "dataset has no records");
  std::stable_sort(records.begin(), records.end(), record_less);
  Dataset ds;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].model_id == records[i - 1].model_id && records[i].item_id == records[i - 1].item_id)
      throw Error(ErrorCode::DuplicateRecord, "duplicate record for model '" + records[i].model_id +
                                                  "', item '" + records[i].item_id + "'");
  ds.records_ = std::move(records);

  std::size_t begin = 0;
  for (std::size_t i = 0; i <= ds.records_.size(); ++i) {
    if (i == ds.records_.size() || ds.records_[i].model_id != ds.records_[begin].model_id) {
      const auto& id = ds.records_[begin].model_id;
      ds.models_.push_back(id);
      ds.model_ranges_.emplace(id, std::make_pair(begin, i - begin));
      ds.coverage_[id] = i - begin;
      begin = i;
    }
  }
  for (const auto& r : ds.records_) {
    auto [it, inserted] = ds.item_tracks_.emplace(r.item_id, r.track);
    if (!inserted && it->second != r.track)
      throw Error(ErrorCode::SchemaError, "item '" + r.item_id + "' appears under tracks " +
                                              std::string(to_string(it->second)) + " and " +
                                              std::string(to_string(r.track)));
  }
  for (const auto& [item, track] : ds.item_tracks_) {
    ds.items_.push_back(item);
    ++ds.track_sizes_[track];
  }

  std::size_t total = 0;
  for (Track t : kAllTracks) {
    const std::size_t n = ds.track_sizes_.count(t) ? ds.track_sizes_.at(t) : 0;
    total += n;
    const std::size_t expected = kExpectedTrackSizes[static_cast<std::size_t>(t)];
    if (n != expected)
      ds.warnings_.push_back(std::string(to_string(t)) + " has " + std::to_string(n) +
                             " items (full battery: " + std::to_string(expected) + ")");
  }
  if (total != 524)
    ds.warnings_.push_back("battery has " + std::to_string(total) + " items (full battery: 524)");
  for (const auto& [model, n] : ds.coverage_)
    if (n != ds.items_.size())
      ds.warnings_.push_back("model '" + model + "' covers " + std::to_string(n) + " of " +
                             std::to_string(ds.items_.size()) + " items");
  return ds;
}

std::span<const ProbeRecord> Dataset::records_for(std::string_view model_id) const {
  const auto it = model_ranges_.find(model_id);
  if (it == model_ranges_.end()) return {};
  return std::span<const ProbeRecord>(records_).subspan(it->second.first, it->second.second);
}

Track Dataset::track_of(std::string_view item_id) const {
  const auto it = item_tracks_.find(item_id);
  if (it == item_tracks_.end())
    throw Error(ErrorCode::MissingData, "unknown item '" + std::string(item_id) + "'");
  return it->second;
}

ItemNorms compute_item_norms(const Dataset& ds, std::optional<std::string_view> exclude_model) {
  struct Counts {
    std::size_t n = 0, keep = 0, bet = 0, correct = 0;
  };
  std::map<std::string, Counts, std::less<>> counts;
  for (const auto& r : ds.records()) {
    if (exclude_model && r.model_id == *exclude_model) continue;
    auto& c = counts[r.item_id];
    ++c.n;
    c.keep += r.kept() ? 1 : 0;
    c.bet += r.bet_on() ? 1 : 0;
    c.correct += r.correct ? 1 : 0;
  }
  ItemNorms norms;
  for (const auto& [item, c] : counts) {
    const double n = static_cast<double>(c.n);
    norms.emplace(item, ItemNorm{c.n, static_cast<double>(c.keep) / n, static_cast<double>(c.bet) / n,
                                 static_cast<double>(c.correct) / n});
  }
  return norms;
}

std::set<std::string, std::less<>> consensus_items(const ItemNorms& norms, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::ConfigError, "consensus threshold must lie in (0, 1]");
  // Rates are count / n; the slack keeps 17/20 >= .85 exact despite rounding.
  constexpr double kSlack = 1e-12;
  std::set<std::string, std::less<>> out;
  for (const auto& [item, norm] : norms)
    if (norm.p_keep >= threshold - kSlack) out.insert(item);
  return out;
}

std::string norms_to_json(const ItemNorms& norms) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [item, n] : norms)
    j[item] = {{"n", n.n_models}, {"p_keep", n.p_keep}, {"p_bet", n.p_bet}, {"mean_accuracy", n.mean_accuracy}};
  return j.dump(2) + "\n";
}

ItemNorms norms_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("norms file: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "norms file: top level must be an object");
  ItemNorms norms;
  for (const auto& [item, v] : j.items()) {
    try {
      ItemNorm n;
      n.n_models = v.at("n").get<std::size_t>();
      n.p_keep = v.at("p_keep").get<double>();
      n.p_bet = v.at("p_bet").get<double>();
      n.mean_accuracy = v.at("mean_accuracy").get<double>();
      if (n.n_models == 0) throw Error(ErrorCode::SchemaError, "norms file: item '" + item + "' has n = 0");
      for (double rate : {n.p_keep, n.p_bet, n.mean_accuracy})
        if (!(rate >= 0.0 && rate <= 1.0))
          throw Error(ErrorCode::SchemaError, "norms file: item '" + item + "' has a rate outside [0, 1]");
      norms.emplace(item, n);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::SchemaError, "norms file: item '" + item + "': " + e.what());
    }
  }
  return norms;
}

ItemNorms load_norms(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open norms file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return norms_from_json(buf.str());
}

}  // namespace vscreen
