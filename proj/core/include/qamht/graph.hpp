#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace qamht {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Sorted, duplicate-free list of selected vertices (x_i = 1).
using VertexSet = std::vector<Vertex>;

/// Absolute tolerance used when comparing objective values for ties.
inline constexpr double kWeightTieTolerance = 1e-12;

/// Vertex-weighted undirected simple graph. Immutable after construction.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Edges may be given in either orientation; they are normalized to (i < j)
  /// and sorted. Throws InputError on self-loops, duplicates, out-of-range
  /// endpoints or non-finite weights.
  explicit WeightedGraph(std::vector<double> weights, std::vector<Edge> edges = {});

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] bool empty() const noexcept { return weights_.empty(); }
  [[nodiscard]] double weight(Vertex v) const { return weights_.at(v); }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  [[nodiscard]] std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  [[nodiscard]] bool adjacent(Vertex a, Vertex b) const;
  [[nodiscard]] double max_weight() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::vector<double> weights_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Sorts and deduplicates; throws InputError for indices >= n.
VertexSet make_vertex_set(std::vector<Vertex> vertices, std::size_t n);

/// Lexicographic order on sorted vertex lists.
bool lex_less(const VertexSet& a, const VertexSet& b);

bool is_independent(const WeightedGraph& g, const VertexSet& s);
double total_weight(const WeightedGraph& g, const VertexSet& s);

/// A subgraph together with the original index of each of its vertices.
struct SubGraph {
  WeightedGraph graph;
  std::vector<Vertex> index_map;

  /// Maps a vertex set of `graph` back to original indices (sorted).
  [[nodiscard]] VertexSet lift(const VertexSet& local) const;
};

SubGraph induced_subgraph(const WeightedGraph& g, const VertexSet& keep);

/// Removes every vertex with w_i <= 0; such vertices never improve an MWIS.
SubGraph drop_nonpositive(const WeightedGraph& g);

/// Connected components, each sorted, ordered by smallest member.
std::vector<VertexSet> connected_components(const WeightedGraph& g);

struct MwisSolution {
  VertexSet set;
  double weight = 0.0;
  std::uint64_t nodes = 0;  ///< search nodes visited (0 for exhaustive)
};

struct MwisOptions {
  /// Largest connected component the branch-and-bound accepts.
  std::size_t max_component_vertices = 256;
  /// Search-node budget across all components.
  std::uint64_t max_nodes = 200'000'000;
};

/// Exact maximum-weight independent set by branch and bound over each
/// connected component. Requires strictly positive weights. Among optimal
/// sets (within kWeightTieTolerance) returns the lexicographically smallest.
MwisSolution mwis_exact(const WeightedGraph& g, const MwisOptions& options = {});

inline constexpr std::size_t kExhaustiveMaxVertices = 20;

/// Plain enumeration of all 2^n subsets (n <= 20). Same tie-break as
/// mwis_exact; used as the reference oracle.
MwisSolution mwis_exhaustive(const WeightedGraph& g);

// Serialization. JSON: {"n": int, "weights": [real], "edges": [[i, j]]}.
// Text: DIMACS-like `p`, `n <i> <w>`, `e <i> <j>` lines, 1-indexed.
nlohmann::json to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const nlohmann::json& j);
WeightedGraph parse_graph_dimacs(std::string_view text);
/// Detects the format from the first non-blank character ('{' means JSON).
WeightedGraph parse_graph(std::string_view text);
std::string to_dimacs(const WeightedGraph& g);

}  // namespace qamht
