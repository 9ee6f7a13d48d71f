#pragma once

// Serialization of analysis results: JSON (canonical), Markdown summaries,
// and CSV tables. All emitters are deterministic for identical inputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vscreen/classify.hpp"
#include "vscreen/indices.hpp"
#include "vscreen/psychometrics.hpp"
#include "vscreen/synthetic.hpp"

namespace vscreen::report {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolName = "vscreen";
std::string_view tool_version();

struct ArtifactMeta {
  std::string command;
  std::uint64_t seed = 0;
  TierThresholds thresholds;
  std::string input_digest;  // fnv1a-64 hex over the inputs
};

// FNV-1a 64 over file names and contents, in the given order.
class Digest {
 public:
  void update(std::string_view bytes);
  void update_file(const std::filesystem::path& path);
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string digest_inputs(const std::filesystem::path& data_dir,
                          const std::optional<std::filesystem::path>& norms_path);

// Fixed-point text used by Markdown, CSV and SVG ("-" for undefined).
std::string fixed(std::optional<double> v, int precision = 3);

Json meta_json(const ArtifactMeta& meta);
Json thresholds_json(const TierThresholds& th);
Json optional_json(std::optional<double> v);
Json correlation_json(const std::optional<stats::CorrelationResult>& c);

Json index_set_json(const IndexSet& s);
Json profile_json(const ValidityProfile& p);
Json profiles_json(std::span<const ValidityProfile> profiles);
Json classification_json(const Classification& c);
Json sweep_json(const SweepResult& sweep);
Json validation_json(const synthetic::ValidationMatrix& vm);

struct RetroProspectiveRow {
  std::string model_id;
  std::optional<double> L_retro;
  std::optional<double> L_prosp;
  std::optional<bool> consistent;  // same side of the L threshold in both formats
};
std::vector<RetroProspectiveRow> retro_prospective_rows(std::span<const ValidityProfile> profiles,
                                                        const TierThresholds& th);

Json psych_json(const psych::PsychometricReport& rep, std::span<const ValidityProfile> profiles,
                const Classification& classification, const TierThresholds& th);

// Complete documents.
std::string screen_json_document(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                                 const Classification& c, std::span<const std::string> dataset_warnings);
std::string screen_markdown(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                            const Classification& c);
std::string profiles_csv(const ArtifactMeta& meta, std::span<const ValidityProfile> profiles,
                         const Classification& c);

std::string validation_json_document(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm);
std::string validation_csv(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm);
std::string validation_markdown(const ArtifactMeta& meta, const synthetic::ValidationMatrix& vm);

std::string psych_json_document(const ArtifactMeta& meta, const psych::PsychometricReport& rep,
                                std::span<const ValidityProfile> profiles, const Classification& c);
std::string psych_markdown(const ArtifactMeta& meta, const psych::PsychometricReport& rep,
                           std::span<const ValidityProfile> profiles, const Classification& c);

std::string sweep_json_document(const ArtifactMeta& meta, const SweepResult& sweep,
                                std::span<const ValidityProfile> profiles);
std::string sweep_csv(const ArtifactMeta& meta, const SweepResult& sweep);
std::string sweep_markdown(const ArtifactMeta& meta, const SweepResult& sweep);

}  // namespace vscreen::report
