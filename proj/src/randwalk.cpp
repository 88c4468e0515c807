#include "energyspace/randwalk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "energyspace/error.hpp"
#include "energyspace/numkernel.hpp"

namespace energyspace {

double transition_prob(const Network& net, Vertex x, Vertex y) {
  net.require_vertex(x);
  net.require_vertex(y);
  return net.conductance(x, y) / net.total_conductance(x);
}

double escape_prob_exact(const Network& net, Vertex x) {
  net.require_vertex(x);
  const Vertex o = net.origin();
  if (x == o) fail(ErrorCode::InvalidArgument, "escape probability needs x distinct from the origin");

  // Free vertices: everything except o and x.
  std::vector<std::size_t> position(net.size(), npos);
  std::vector<Vertex> free;
  for (Vertex z = 0; z < net.size(); ++z) {
    if (z != o && z != x) {
      position[z] = free.size();
      free.push_back(z);
    }
  }

  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  h[static_cast<Eigen::Index>(o)] = 1.0;
  if (!free.empty()) {
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const Vertex z = free[static_cast<std::size_t>(i)];
      a(i, i) = net.total_conductance(z);
      for (const auto& nb : net.neighbors(z)) {
        if (nb.vertex == o) {
          rhs[i] += nb.conductance;
        } else if (nb.vertex != x) {
          a(i, static_cast<Eigen::Index>(position[nb.vertex])) -= nb.conductance;
        }
      }
    }
    // Every component of G∖{o,x} touches o or x, so the system is definite.
    const Eigen::VectorXd sol = numkernel::spd_solve(numkernel::RealSymMatrix(std::move(a)), rhs);
    for (Eigen::Index i = 0; i < k; ++i) h[static_cast<Eigen::Index>(free[static_cast<std::size_t>(i)])] = sol[i];
  }

  double p = 0.0;
  for (const auto& nb : net.neighbors(x)) p += nb.conductance * h[static_cast<Eigen::Index>(nb.vertex)];
  return p / net.total_conductance(x);
}

double WalkEstimate::z_score() const {
  const double diff = std::abs(mc_estimate - exact);
  if (diff == 0.0) return 0.0;
  return mc_stderr > 0.0 ? diff / mc_stderr : std::numeric_limits<double>::infinity();
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENERGY_SPACE_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // Unparsable values leave the default in place.
    }
  }
  return n;
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) { return splitmix(splitmix(seed) ^ chunk); }

// Excursions are grouped into a fixed number of chunks, each with its own
// engine, so the result does not depend on how chunks map to threads.
constexpr std::uint64_t kChunks = 1024;

enum class Outcome { Escaped, Returned, Capped };

class Walker {
 public:
  explicit Walker(const Network& net) : net_(net), cumulative_(net.size()) {
    for (Vertex z = 0; z < net.size(); ++z) {
      double sum = 0.0;
      for (const auto& nb : net.neighbors(z)) cumulative_[z].push_back(sum += nb.conductance);
    }
  }

  Outcome excursion(Vertex x, std::mt19937_64& rng, std::uint64_t cap) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vertex at = x;
    for (std::uint64_t n = 0; n < cap; ++n) {
      const auto& cum = cumulative_[at];
      const double target = unit(rng) * cum.back();
      auto it = std::upper_bound(cum.begin(), cum.end(), target);
      if (it == cum.end()) --it;
      at = net_.neighbors(at)[static_cast<std::size_t>(it - cum.begin())].vertex;
      if (at == net_.origin()) return Outcome::Escaped;
      if (at == x) return Outcome::Returned;
    }
    return Outcome::Capped;
  }

 private:
  const Network& net_;
  std::vector<std::vector<double>> cumulative_;  // running sums of neighbour conductances
};

}  // namespace

WalkEstimate escape_prob_mc(const Network& net, Vertex x, std::uint64_t samples, std::uint64_t seed,
                            const WalkOptions& options) {
  net.require_vertex(x);
  if (x == net.origin()) fail(ErrorCode::InvalidArgument, "escape probability needs x distinct from the origin");
  if (samples == 0) fail(ErrorCode::InvalidArgument, "samples must be at least 1");
  if (options.step_cap == 0) fail(ErrorCode::InvalidArgument, "step cap must be at least 1");

  const Walker walker(net);
  const std::uint64_t chunks = std::min(samples, kChunks);
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads.value_or(worker_threads()), static_cast<unsigned>(chunks)));
  std::vector<std::uint64_t> escaped(threads, 0), capped(threads, 0);
  auto work = [&](unsigned t) {
    for (std::uint64_t c = t; c < chunks; c += threads) {
      std::mt19937_64 rng(chunk_seed(seed, c));
      const std::uint64_t end = samples * (c + 1) / chunks;
      for (std::uint64_t i = samples * c / chunks; i < end; ++i) {
        switch (walker.excursion(x, rng, options.step_cap)) {
          case Outcome::Escaped: ++escaped[t]; break;
          case Outcome::Capped: ++capped[t]; break;
          case Outcome::Returned: break;
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  WalkEstimate est;
  est.x = x;
  est.exact = escape_prob_exact(net, x);
  est.samples = samples;
  est.seed = seed;
  est.step_cap = options.step_cap;
  std::uint64_t hits = 0;
  for (unsigned t = 0; t < threads; ++t) {
    hits += escaped[t];
    est.cap_hits += capped[t];
  }
  const std::uint64_t finished = samples - est.cap_hits;
  if (finished > 0) {
    const double p = static_cast<double>(hits) / static_cast<double>(finished);
    est.mc_estimate = p;
    est.mc_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(finished));
  }
  return est;
}

}  // namespace energyspace
