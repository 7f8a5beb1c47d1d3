#include "qamht/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "qamht/errors.hpp"

namespace qamht {

WeightedGraph::WeightedGraph(std::vector<double> weights, std::vector<Edge> edges)
    : weights_(std::move(weights)), adjacency_(weights_.size()) {
  const std::size_t n = weights_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(weights_[i])) {
      throw InputError("weight of vertex " + std::to_string(i) + " is not finite");
    }
  }
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InputError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                       ") references a vertex outside [0," + std::to_string(n) + ")");
    }
    if (a == b) {
      throw InputError("self-loop on vertex " + std::to_string(a));
    }
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw InputError("duplicate edge (" + std::to_string(dup->first) + "," +
                     std::to_string(dup->second) + ")");
  }
  edges_ = std::move(edges);
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

bool WeightedGraph::adjacent(Vertex a, Vertex b) const {
  const auto& nb = adjacency_.at(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

double WeightedGraph::max_weight() const {
  if (weights_.empty()) return 0.0;
  return *std::max_element(weights_.begin(), weights_.end());
}

VertexSet make_vertex_set(std::vector<Vertex> vertices, std::size_t n) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (!vertices.empty() && vertices.back() >= n) {
    throw InputError("vertex " + std::to_string(vertices.back()) + " outside [0," +
                     std::to_string(n) + ")");
  }
  return vertices;
}

bool lex_less(const VertexSet& a, const VertexSet& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

void check_members(const WeightedGraph& g, const VertexSet& s) {
  for (Vertex v : s) {
    if (v >= g.size()) {
      throw InputError("vertex " + std::to_string(v) + " outside [0," + std::to_string(g.size()) +
                       ")");
    }
  }
}

}  // namespace

bool is_independent(const WeightedGraph& g, const VertexSet& s) {
  check_members(g, s);
  std::vector<char> chosen(g.size(), 0);
  for (Vertex v : s) chosen[v] = 1;
  return std::none_of(g.edges().begin(), g.edges().end(),
                      [&](const Edge& e) { return chosen[e.first] && chosen[e.second]; });
}

double total_weight(const WeightedGraph& g, const VertexSet& s) {
  check_members(g, s);
  double sum = 0.0;
  for (Vertex v : s) sum += g.weight(v);
  return sum;
}

VertexSet SubGraph::lift(const VertexSet& local) const {
  VertexSet out;
  out.reserve(local.size());
  for (Vertex v : local) out.push_back(index_map.at(v));
  std::sort(out.begin(), out.end());
  return out;
}

SubGraph induced_subgraph(const WeightedGraph& g, const VertexSet& keep) {
  const VertexSet sorted = make_vertex_set(keep, g.size());
  constexpr auto kAbsent = static_cast<Vertex>(-1);
  std::vector<Vertex> local(g.size(), kAbsent);
  std::vector<double> w;
  w.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    local[sorted[i]] = i;
    w.push_back(g.weight(sorted[i]));
  }
  std::vector<Edge> e;
  for (const auto& [a, b] : g.edges()) {
    if (local[a] != kAbsent && local[b] != kAbsent) e.emplace_back(local[a], local[b]);
  }
  return {WeightedGraph(std::move(w), std::move(e)), sorted};
}

SubGraph drop_nonpositive(const WeightedGraph& g) {
  VertexSet keep;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (g.weight(v) > 0.0) keep.push_back(v);
  }
  return induced_subgraph(g, keep);
}

std::vector<VertexSet> connected_components(const WeightedGraph& g) {
  std::vector<Vertex> parent(g.size());
  std::iota(parent.begin(), parent.end(), Vertex{0});
  auto find = [&](Vertex v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& [a, b] : g.edges()) {
    const Vertex ra = find(a);
    const Vertex rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<VertexSet> comps;
  std::vector<std::size_t> slot(g.size(), static_cast<std::size_t>(-1));
  for (Vertex v = 0; v < g.size(); ++v) {
    const Vertex r = find(v);
    if (slot[r] == static_cast<std::size_t>(-1)) {
      slot[r] = comps.size();
      comps.emplace_back();
    }
    comps[slot[r]].push_back(v);
  }
  return comps;
}

namespace {

// Fixed-capacity bitset sized at runtime; components are small.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  [[nodiscard]] bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  [[nodiscard]] bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  void and_not(const Bits& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
  }
  /// Lowest set index; requires !none().
  [[nodiscard]] std::size_t first() const {
    for (std::size_t k = 0;; ++k) {
      if (words_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Depth-first include-first search in index order: leaves are visited in
// lexicographic order of the selected set, so the first optimum found is the
// lexicographically smallest one and later ties are rejected.
class BranchAndBound {
 public:
  BranchAndBound(const WeightedGraph& g, std::uint64_t node_budget)
      : g_(g), n_(g.size()), budget_(node_budget), adj_(n_, Bits(n_)) {
    for (const auto& [a, b] : g.edges()) {
      adj_[a].set(b);
      adj_[b].set(a);
    }
  }

  MwisSolution run() {
    Bits cand(n_);
    for (std::size_t i = 0; i < n_; ++i) cand.set(i);
    std::vector<Vertex> chosen;
    search(cand, 0.0, chosen);
    return {best_, best_weight_, nodes_};
  }

 private:
  // Greedy clique cover of the candidates: each clique contributes its
  // heaviest member. Valid because an independent set meets a clique at most once.
  double clique_cover_bound(const Bits& cand) const {
    std::vector<std::size_t> verts;
    cand.for_each([&](std::size_t v) { verts.push_back(v); });
    std::stable_sort(verts.begin(), verts.end(),
                     [&](std::size_t a, std::size_t b) { return g_.weight(a) > g_.weight(b); });
    std::vector<std::vector<std::size_t>> cliques;
    double bound = 0.0;
    for (std::size_t v : verts) {
      bool placed = false;
      for (auto& clique : cliques) {
        const bool fits = std::all_of(clique.begin(), clique.end(),
                                      [&](std::size_t u) { return adj_[v].test(u); });
        if (fits) {
          clique.push_back(v);
          placed = true;
          break;
        }
      }
      if (!placed) {
        cliques.push_back({v});
        bound += g_.weight(v);
      }
    }
    return bound;
  }

  void search(const Bits& cand, double weight, std::vector<Vertex>& chosen) {
    if (++nodes_ > budget_) {
      throw CapacityError("mwis_exact exceeded its search-node budget of " +
                          std::to_string(budget_) + "; use the sqa backend for this instance");
    }
    if (cand.none()) {
      if (!have_best_ || weight > best_weight_ + kWeightTieTolerance) {
        best_ = chosen;
        best_weight_ = weight;
        have_best_ = true;
      }
      return;
    }
    if (have_best_) {
      double sum = 0.0;
      cand.for_each([&](std::size_t v) { sum += g_.weight(v); });
      if (weight + sum <= best_weight_ + kWeightTieTolerance) return;
      if (weight + clique_cover_bound(cand) <= best_weight_ + kWeightTieTolerance) return;
    }

    const std::size_t v = cand.first();
    Bits with = cand;
    with.reset(v);
    with.and_not(adj_[v]);
    chosen.push_back(v);
    search(with, weight + g_.weight(v), chosen);
    chosen.pop_back();

    Bits without = cand;
    without.reset(v);
    search(without, weight, chosen);
  }

  const WeightedGraph& g_;
  std::size_t n_;
  std::uint64_t budget_;
  std::vector<Bits> adj_;
  VertexSet best_;
  double best_weight_ = 0.0;
  bool have_best_ = false;
  std::uint64_t nodes_ = 0;
};

void require_positive(const WeightedGraph& g, const char* who) {
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!(g.weight(v) > 0.0)) {
      throw InputError(std::string(who) + " requires positive weights (vertex " +
                       std::to_string(v) + " has " + std::to_string(g.weight(v)) +
                       "); apply drop_nonpositive first");
    }
  }
}

}  // namespace

MwisSolution mwis_exact(const WeightedGraph& g, const MwisOptions& options) {
  require_positive(g, "mwis_exact");
  MwisSolution total;
  for (const VertexSet& comp : connected_components(g)) {
    if (comp.size() > options.max_component_vertices) {
      throw CapacityError("connected component with " + std::to_string(comp.size()) +
                          " vertices exceeds the exact-solver budget of " +
                          std::to_string(options.max_component_vertices) +
                          "; use the sqa backend");
    }
    if (comp.size() == 1) {
      total.set.push_back(comp.front());
      total.weight += g.weight(comp.front());
      ++total.nodes;
      continue;
    }
    const SubGraph sub = induced_subgraph(g, comp);
    BranchAndBound bb(sub.graph, options.max_nodes - std::min(options.max_nodes, total.nodes));
    const MwisSolution part = bb.run();
    for (Vertex v : sub.lift(part.set)) total.set.push_back(v);
    total.weight += part.weight;
    total.nodes += part.nodes;
  }
  std::sort(total.set.begin(), total.set.end());
  // Recompute in index order so the value does not depend on component order.
  total.weight = total_weight(g, total.set);
  return total;
}

MwisSolution mwis_exhaustive(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (n > kExhaustiveMaxVertices) {
    throw CapacityError("mwis_exhaustive supports at most " +
                        std::to_string(kExhaustiveMaxVertices) + " vertices, got " +
                        std::to_string(n));
  }
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [a, b] : g.edges()) {
    adj[a] |= 1U << b;
    adj[b] |= 1U << a;
  }
  MwisSolution best;
  best.weight = 0.0;
  bool have = false;
  VertexSet current;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    bool independent = true;
    double w = 0.0;
    current.clear();
    for (std::size_t v = 0; v < n && independent; ++v) {
      if (mask & (1U << v)) {
        if (mask & adj[v]) independent = false;
        w += g.weight(v);
        current.push_back(v);
      }
    }
    if (!independent) continue;
    if (!have || w > best.weight + kWeightTieTolerance ||
        (std::abs(w - best.weight) <= kWeightTieTolerance && lex_less(current, best.set))) {
      best.set = current;
      best.weight = w;
      have = true;
    }
  }
  return best;
}

}  // namespace qamht
