#include "vscreen/bootstrap.hpp"

#include <string>

#include "vscreen/error.hpp"
#include "vscreen/parallel.hpp"
#include "vscreen/stats.hpp"

namespace vscreen::stats {

BootstrapResult bootstrap(const ReplicateFn& replicate, double point_estimate,
                          const BootstrapOptions& options) {
  if (options.iterations < 100)
    throw Error(ErrorCode::InsufficientSample, "bootstrap needs >= 100 iterations");
  if (!(options.ci_level > 0.0 && options.ci_level < 1.0))
    throw Error(ErrorCode::ConfigError, "bootstrap ci_level must lie in (0, 1)");

  std::vector<std::optional<double>> slots(options.iterations);
  parallel_for(options.iterations, options.threads, [&](std::size_t i) {
    CounterRng rng(options.seed, i);
    slots[i] = replicate(rng);
  });

  BootstrapResult out;
  out.point_estimate = point_estimate;
  out.seed = options.seed;
  out.iterations = options.iterations;
  out.replicates.reserve(slots.size());
  for (const auto& s : slots) {
    if (s) out.replicates.push_back(*s);
    else ++out.skipped;
  }
  if (out.skipped * 10 > options.iterations)
    throw Error(ErrorCode::UnstableStatistic, std::to_string(out.skipped) + " of " +
                                                  std::to_string(options.iterations) +
                                                  " bootstrap replicates undefined");
  const double tail = (1.0 - options.ci_level) / 2.0;
  out.ci_low = quantile(out.replicates, tail);
  out.ci_high = quantile(out.replicates, 1.0 - tail);
  return out;
}

std::vector<double> resample(std::span<const double> xs, CounterRng& rng) {
  std::vector<double> out(xs.size());
  for (auto& v : out) v = xs[rng.below(xs.size())];
  return out;
}

}  // namespace vscreen::stats
