#pragma once

// Shared test data builders.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "vscreen/probe_data.hpp"
#include "vscreen/rng.hpp"
#include "vscreen/synthetic.hpp"

namespace fixtures {

inline vscreen::ProbeRecord rec(std::string model, std::string item, bool correct, bool keep, bool bet,
                                vscreen::Track track = vscreen::Track::T1) {
  vscreen::ProbeRecord r;
  r.model_id = std::move(model);
  r.item_id = std::move(item);
  r.track = track;
  r.domain = "general";
  r.correct = correct;
  r.keep = keep ? vscreen::KeepChoice::Keep : vscreen::KeepChoice::Withdraw;
  r.bet = bet ? vscreen::BetChoice::Bet : vscreen::BetChoice::NoBet;
  if (track == vscreen::Track::T6)
    r.prospective = keep ? vscreen::ProspectiveChoice::Answer : vscreen::ProspectiveChoice::Decline;
  return r;
}

// Random model over T1-T5 with independent coin flips per field.
inline std::vector<vscreen::ProbeRecord> random_model(std::uint64_t seed, std::size_t n_items,
                                                      std::string model = "m") {
  vscreen::CounterRng rng(seed, 99);
  std::vector<vscreen::ProbeRecord> out;
  const double p_correct = 0.2 + 0.6 * rng.uniform();
  const double p_keep = rng.uniform();
  const double p_bet = rng.uniform();
  for (std::size_t i = 0; i < n_items; ++i) {
    const auto track = static_cast<vscreen::Track>(i % 5);
    out.push_back(rec(model, "i" + std::to_string(10000 + i), rng.bernoulli(p_correct), rng.bernoulli(p_keep),
                      rng.bernoulli(p_bet), track));
  }
  return out;
}

// Values with an exact sample mean and SD (n - 1 denominator).
inline std::vector<double> with_moments(std::size_t n, double mean, double sd) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (i % 2 == 0) ? 1.0 : -1.0;
  if (n % 2 == 1) z[n - 1] = 0.0;
  double ss = 0.0;
  for (double v : z) ss += v * v;
  const double scale = std::sqrt((n - 1) / ss);
  std::vector<double> out;
  for (double v : z) out.push_back(mean + sd * scale * v);
  return out;
}

// Per-model sensitivities of the four construct-invalid models.
inline const std::vector<double> kInvalidSensitivities = {-0.798, -0.001, -0.031, 0.047};
inline std::vector<double> valid_sensitivities() { return with_moments(16, 0.180, 0.058); }

// Orthonormal, mean-zero vectors in R^n (Gram-Schmidt on fixed seeds).
inline std::vector<std::vector<double>> centered_orthonormal(std::size_t n, std::size_t k, std::uint64_t seed) {
  vscreen::CounterRng rng(seed, 5);
  std::vector<std::vector<double>> basis;
  std::vector<double> ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
  basis.push_back(ones);
  while (basis.size() < k + 1) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    basis.push_back(v);
  }
  basis.erase(basis.begin());
  return basis;
}

struct RegressionFixture {
  std::vector<double> accuracy;
  std::vector<double> l;
  std::vector<double> y;
};

// R^2(y ~ acc) = r2_base and R^2(y ~ acc + L) = r2_full, exactly.
inline RegressionFixture nested_r2_fixture(std::size_t n, double r2_base, double r2_full) {
  const auto e = centered_orthonormal(n, 3, 2024);
  RegressionFixture f;
  const double a = std::sqrt(r2_base), b = std::sqrt(r2_full - r2_base), c = std::sqrt(1.0 - r2_full);
  for (std::size_t i = 0; i < n; ++i) {
    f.accuracy.push_back(0.7 + e[0][i]);
    f.l.push_back(0.5 + 0.3 * e[0][i] + 0.8 * e[1][i]);
    f.y.push_back(0.2 + a * e[0][i] + b * e[1][i] + c * e[2][i]);
  }
  return f;
}

// A scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(std::string_view tag) {
    path = std::filesystem::temp_directory_path() /
           ("vscreen-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// One CSV per model under dir.
inline void write_battery(const std::filesystem::path& dir,
                          const std::vector<std::vector<vscreen::ProbeRecord>>& models) {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) {
    std::ofstream out(dir / (m.front().model_id + ".csv"), std::ios::binary);
    vscreen::write_probe_csv(out, m);
  }
}

// Model `name` following `policy` on a shared sampled battery.
inline std::vector<vscreen::ProbeRecord> policy_model(vscreen::synthetic::Policy policy, std::string name,
                                                      std::span<const vscreen::synthetic::SyntheticItem> items,
                                                      std::uint64_t seed) {
  std::uint64_t stream = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) stream = (stream ^ c) * 0x100000001b3ULL;
  vscreen::CounterRng rng(seed, stream);
  return vscreen::synthetic::generate_policy_dataset(vscreen::synthetic::PolicySpec::defaults(policy), items, rng,
                                                     name);
}

}  // namespace fixtures
