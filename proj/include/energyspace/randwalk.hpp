#pragma once

#include <cstdint>
#include <optional>

#include "energyspace/network.hpp"

namespace energyspace {

/// p(x,y) = c_xy / c(x).
double transition_prob(const Network& net, Vertex x, Vertex y);

/// Probability that the walk started at x reaches the origin before it
/// returns to x. Computed from the harmonic extension h on G∖{o,x} with
/// h(o) = 1, h(x) = 0, then averaged over the first step.
double escape_prob_exact(const Network& net, Vertex x);

struct WalkEstimate {
  Vertex x = 0;
  double exact = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  /// Excursions stopped at the step cap. They count as neither success nor
  /// failure and are left out of the denominator.
  std::uint64_t cap_hits = 0;
  std::uint64_t step_cap = 0;

  /// |mc − exact| / stderr; 0 when both agree exactly.
  double z_score() const;
};

struct WalkOptions {
  std::uint64_t step_cap = 1'000'000'000;
  /// Worker count; defaults to worker_threads().
  std::optional<unsigned> threads;
};

/// Hardware concurrency, capped by ENERGY_SPACE_THREADS when set.
unsigned worker_threads();

/// Monte Carlo escape estimate. Excursions are split into at most 1024 fixed
/// chunks, each drawing from a generator seeded by mixing (seed, chunk), so
/// the result does not depend on the number of threads.
WalkEstimate escape_prob_mc(const Network& net, Vertex x, std::uint64_t samples, std::uint64_t seed,
                            const WalkOptions& options = {});

}  // namespace energyspace
