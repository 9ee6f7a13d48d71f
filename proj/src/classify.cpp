#include "vscreen/classify.hpp"

#include <cmath>
#include <string>

#include "vscreen/error.hpp"
#include "vscreen/stats.hpp"

namespace vscreen {

void TierThresholds::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!(rbs_gt > -1.0 && rbs_gt < 1.0)) throw Error(ErrorCode::ConfigError, "rbs_gt must lie in (-1, 1)");
  if (!in_unit(l_min)) throw Error(ErrorCode::ConfigError, "l_min must lie in (0, 1]");
  if (!in_unit(f_min)) throw Error(ErrorCode::ConfigError, "f_min must lie in (0, 1]");
  if (!in_unit(fp_min)) throw Error(ErrorCode::ConfigError, "fp_min must lie in (0, 1]");
  if (!(tier2_elevated_sd > 0.0)) throw Error(ErrorCode::ConfigError, "tier2_elevated_sd must be positive");
  if (!(tier2_marked_sd >= tier2_elevated_sd))
    throw Error(ErrorCode::ConfigError, "tier2_marked_sd must be >= tier2_elevated_sd");
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::Valid: return "Valid";
    case Tier::Tier2Elevated: return "Tier2Elevated";
    case Tier::Tier2Marked: return "Tier2Marked";
    case Tier::Tier1Invalid: return "Tier1Invalid";
    case Tier::Unclassifiable: return "Unclassifiable";
  }
  return "";
}

std::vector<TriggeredRule> tier1_flags(const IndexSet& s, const TierThresholds& th) {
  std::vector<TriggeredRule> fired;
  if (s.RBS && *s.RBS > th.rbs_gt) fired.push_back({IndexId::RBS, *s.RBS, th.rbs_gt, true});
  if (s.L && *s.L >= th.l_min) fired.push_back({IndexId::L, *s.L, th.l_min, true});
  if (s.F && *s.F >= th.f_min) fired.push_back({IndexId::F, *s.F, th.f_min, true});
  if (s.Fp && *s.Fp >= th.fp_min) fired.push_back({IndexId::Fp, *s.Fp, th.fp_min, true});
  return fired;
}

std::set<std::string> Classification::tier1_models() const {
  std::set<std::string> out;
  for (const auto& a : assignments)
    if (a.tier == Tier::Tier1Invalid) out.insert(a.model_id);
  return out;
}

const TierAssignment* Classification::find(std::string_view model_id) const {
  for (const auto& a : assignments)
    if (a.model_id == model_id) return &a;
  return nullptr;
}

namespace {

bool all_core_undefined(const IndexSet& s) {
  for (IndexId id : kCoreIndices)
    if (s.get(id)) return false;
  return true;
}

}  // namespace

Classification classify_sample(std::span<const ValidityProfile> profiles, const TierThresholds& th) {
  th.validate();
  Classification out;
  out.assignments.resize(profiles.size());
  std::vector<std::size_t> reference;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    auto& a = out.assignments[i];
    a.model_id = profiles[i].model_id;
    if (all_core_undefined(profiles[i].overall)) {
      a.tier = Tier::Unclassifiable;
      out.warnings.push_back("model '" + a.model_id + "' has no defined core index; Unclassifiable");
      continue;
    }
    a.triggered_rules = tier1_flags(profiles[i].overall, th);
    if (!a.triggered_rules.empty()) a.tier = Tier::Tier1Invalid;
    else reference.push_back(i);
  }
  if (reference.empty() && !profiles.empty())
    throw Error(ErrorCode::EmptyReferenceGroup, "every model is Tier 1 or Unclassifiable");

  if (reference.size() < kMinTier2Reference) {
    out.warnings.push_back("Tier 2 skipped: " + std::to_string(reference.size()) +
                           " non-Tier-1 models (need " + std::to_string(kMinTier2Reference) + ")");
    return out;
  }
  out.tier2_applied = true;

  for (IndexId id : kTier2Indices) {
    std::vector<double> values;
    for (std::size_t i : reference)
      if (const auto v = profiles[i].get(id)) values.push_back(*v);
    if (values.size() < 2) {
      out.warnings.push_back("Tier 2 skipped for " + std::string(to_string(id)) + ": fewer than 2 defined values");
      continue;
    }
    if (values.size() < reference.size())
      out.warnings.push_back(std::string(to_string(id)) + ": " +
                             std::to_string(reference.size() - values.size()) +
                             " reference model(s) undefined and excluded");
    const auto st = stats::sample_stats(values);
    out.reference_stats[id] = {st.mean, st.sd.value_or(0.0), st.n};
  }

  for (std::size_t i : reference) {
    auto& a = out.assignments[i];
    for (const auto& [id, ref] : out.reference_stats) {
      const auto v = profiles[i].get(id);
      // A value tied with the mean never flags, even when SD = 0.
      if (!v || !(*v > ref.mean)) continue;
      const double marked = ref.mean + th.tier2_marked_sd * ref.sd;
      const double elevated = ref.mean + th.tier2_elevated_sd * ref.sd;
      if (*v >= marked) {
        a.triggered_rules.push_back({id, *v, marked, false});
        a.tier = Tier::Tier2Marked;
      } else if (*v >= elevated) {
        a.triggered_rules.push_back({id, *v, elevated, false});
        if (a.tier != Tier::Tier2Marked) a.tier = Tier::Tier2Elevated;
      }
    }
  }
  return out;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::ConfigError, "grid needs lo <= hi and step > 0");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    // Round to 1e-12 so 0.93 + 2 * 0.01 prints and compares as 0.95.
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

SweepResult threshold_sweep(std::span<const ValidityProfile> profiles, std::span<const double> l_grid,
                            std::span<const double> f_grid, const TierThresholds& base) {
  if (l_grid.empty() || f_grid.empty()) throw Error(ErrorCode::ConfigError, "sweep grids must be non-empty");
  for (double v : l_grid)
    if (!(v > 0.0 && v < 1.0 + 1e-12)) throw Error(ErrorCode::ConfigError, "L grid value outside (0, 1]");
  for (double v : f_grid)
    if (!(v > 0.0 && v < 1.0 + 1e-12)) throw Error(ErrorCode::ConfigError, "F grid value outside (0, 1]");
  SweepResult out;
  for (double l : l_grid) {
    for (double f : f_grid) {
      TierThresholds th = base;
      th.l_min = l;
      th.f_min = f;
      th.fp_min = f;
      SweepPoint pt{l, f, {}};
      for (const auto& p : profiles)
        if (!tier1_flags(p.overall, th).empty()) pt.tier1.insert(p.model_id);
      if (!out.points.empty() && pt.tier1 != out.points.front().tier1) out.stable = false;
      out.points.push_back(std::move(pt));
    }
  }
  return out;
}

}  // namespace vscreen
