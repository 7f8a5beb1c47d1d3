#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "qamht/graph.hpp"
#include "qamht/ising.hpp"

namespace testing_support {

/// Erdos-Renyi graph with weights uniform in [lo, hi].
inline qamht::WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, double lo = 0.5,
                                         double hi = 5.0) {
  std::uniform_real_distribution<double> w(lo, hi);
  std::bernoulli_distribution edge(p);
  std::vector<double> weights(n);
  for (auto& x : weights) x = w(rng);
  std::vector<qamht::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (edge(rng)) edges.emplace_back(i, j);
    }
  }
  return qamht::WeightedGraph(std::move(weights), std::move(edges));
}

/// Bitmask brute force, written independently of the library.
inline double brute_force_mwis_weight(const qamht::WeightedGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> nbr(n, 0);
  for (const auto& [a, b] : g.edges()) {
    nbr[a] |= 1u << b;
    nbr[b] |= 1u << a;
  }
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    double w = 0.0;
    for (std::size_t v = 0; v < n && ok; ++v) {
      if (!(mask >> v & 1u)) continue;
      ok = (nbr[v] & mask) == 0;
      w += g.weight(v);
    }
    if (ok && w > best) best = w;
  }
  return best;
}

/// Minimum energy over all 2^n spin assignments, by direct summation.
inline double brute_force_ground_energy(const qamht::IsingProblem& p) {
  const std::size_t n = p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double e = p.offset();
    for (std::size_t i = 0; i < n; ++i) {
      const int si = (mask >> i & 1u) ? 1 : -1;
      e += p.field(i) * si;
      for (std::size_t j = i + 1; j < n; ++j) e += p.coupling(i, j) * si * ((mask >> j & 1u) ? 1 : -1);
    }
    best = std::min(best, e);
  }
  return best;
}

}  // namespace testing_support
