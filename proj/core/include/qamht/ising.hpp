#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamht/graph.hpp"

namespace qamht {

/// Spin configuration, each entry +1 or -1 (eigenvalue of the target-basis Pauli).
using Spins = std::vector<int>;

struct Coupling {
  std::size_t i;
  std::size_t j;
  double value;
};

/// Classical Ising target: sum_{k<j} J_kj s_k s_j + sum_k Omega_k s_k + offset.
/// Couplings are kept as a dense symmetric matrix with an exactly zero diagonal.
class IsingProblem {
 public:
  IsingProblem() = default;
  explicit IsingProblem(std::size_t n);
  IsingProblem(std::vector<double> fields, const std::vector<Coupling>& couplings, double offset = 0.0);

  [[nodiscard]] std::size_t size() const noexcept { return fields_.size(); }
  [[nodiscard]] double field(std::size_t k) const { return fields_.at(k); }
  [[nodiscard]] const std::vector<double>& fields() const noexcept { return fields_; }
  [[nodiscard]] double coupling(std::size_t i, std::size_t j) const;
  [[nodiscard]] double offset() const noexcept { return offset_; }

  void set_field(std::size_t k, double value);
  /// Sets J_ij = J_ji. Throws InputError for i == j or non-finite values.
  void set_coupling(std::size_t i, std::size_t j, double value);
  void set_offset(double value);

  /// Non-zero couplings with i < j, row-major order.
  [[nodiscard]] std::vector<Coupling> couplings() const;
  /// Row i of J (length n), zero on the diagonal.
  [[nodiscard]] const double* row(std::size_t i) const { return &couplings_[i * size()]; }
  /// sum |Omega| + sum_{i<j} |J|; a crude energy scale of the problem.
  [[nodiscard]] double energy_scale() const;
  [[nodiscard]] IsingProblem scaled(double factor) const;

  friend bool operator==(const IsingProblem&, const IsingProblem&) = default;

 private:
  std::vector<double> fields_;
  std::vector<double> couplings_;  // n x n row-major
  double offset_ = 0.0;
};

double ising_energy(const IsingProblem& p, const Spins& spins);

inline constexpr std::size_t kExhaustiveMaxSpins = 24;

struct GroundState {
  Spins spins;
  double energy = 0.0;
};

/// Global minimizer by enumeration (n <= 24). Configurations are indexed by
/// sum_k [s_k = +1] 2^k; ties go to the lowest index.
GroundState ground_state_exhaustive(const IsingProblem& p);

/// All configurations within `tolerance` of the ground energy (n <= 24).
std::vector<Spins> degenerate_ground_states(const IsingProblem& p, double tolerance = 1e-9);

/// Spin k represents vertex spin_to_vertex[k]; a spin equal to
/// `selected_value` means the vertex is in the set.
struct DecodeMap {
  std::vector<Vertex> spin_to_vertex;
  std::size_t vertex_count = 0;
  int selected_value = +1;
};

struct Encoding {
  IsingProblem problem;
  DecodeMap map;
};

/// Penalty used when none is given: twice the largest weight.
double default_penalty(const WeightedGraph& g);

/// Minimizes -sum w_i x_i + M sum_{(i,j) in E} x_i x_j over x_i = (1 + s_i)/2:
/// J_ij = M/4 on edges, Omega_i = -w_i/2 + (M/4) deg(i), offset = -sum w/2 + M|E|/4.
/// The energy of an independent set equals minus its weight.
/// Requires all w_i > 0 and M > max w_i.
Encoding encode_mwis(const WeightedGraph& g, double penalty);
inline Encoding encode_mwis(const WeightedGraph& g) { return encode_mwis(g, default_penalty(g)); }

/// Drops non-positive vertices and encodes the rest; the map refers to the
/// original graph's vertex indices.
Encoding encode_mwis_positive_part(const WeightedGraph& g);

VertexSet decode_spins(const Spins& spins, const DecodeMap& map);
Spins encode_set(const VertexSet& set, const DecodeMap& map);

/// Removes, for each violated edge in edge order, the lighter endpoint
/// (the higher index on equal weight) until the set is independent.
VertexSet repair_independent(const WeightedGraph& g, VertexSet set);

enum class ScheduleShape { linear, smooth };

/// Annealing schedule H(t) = f(t) H_d + h(t) H_t on [0, t_final].
struct Schedule {
  double t_final = 1.0;
  ScheduleShape shape = ScheduleShape::linear;
  /// Driver scale omega_0 (rad/s): H_d = (omega_0 / 2) sum_k sigma_z.
  double driver_scale = 1.0;
};

struct Envelope {
  double driver;  ///< f(t)
  double target;  ///< h(t)
};

/// linear: f = 1 - t/tf, h = t/tf. smooth: f = cos^2(pi t / 2tf), h = sin^2(pi t / 2tf).
/// Throws InputError for t outside [0, t_final].
Envelope schedule_eval(const Schedule& s, double t);
/// Time derivatives (df/dt, dh/dt).
Envelope schedule_rate(const Schedule& s, double t);

const char* to_string(ScheduleShape shape);
ScheduleShape schedule_shape_from_string(const std::string& name);

nlohmann::json to_json(const IsingProblem& p);
IsingProblem ising_from_json(const nlohmann::json& j);

}  // namespace qamht
