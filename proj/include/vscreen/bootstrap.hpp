#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vscreen/rng.hpp"

namespace vscreen::stats {

struct BootstrapOptions {
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  unsigned threads = 1;  // 0 = hardware concurrency
};

struct BootstrapResult {
  double point_estimate = 0.0;
  std::vector<double> replicates;  // successful replicates, in replicate-index order
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t skipped = 0;  // replicates where the statistic was undefined
};

// One replicate: draw with the supplied generator and evaluate. Replicate i
// always receives CounterRng(seed, i). More than 10% undefined replicates
// raises UnstableStatistic.
using ReplicateFn = std::function<std::optional<double>(CounterRng&)>;

BootstrapResult bootstrap(const ReplicateFn& replicate, double point_estimate,
                          const BootstrapOptions& options);

template <class Sample>
BootstrapResult bootstrap(const std::function<Sample(CounterRng&)>& resampler,
                          const std::function<std::optional<double>(const Sample&)>& statistic,
                          double point_estimate, const BootstrapOptions& options) {
  return bootstrap(
      ReplicateFn([&](CounterRng& rng) { return statistic(resampler(rng)); }), point_estimate,
      options);
}

// Draw xs.size() values with replacement.
std::vector<double> resample(std::span<const double> xs, CounterRng& rng);

}  // namespace vscreen::stats
