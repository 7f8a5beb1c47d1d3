#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamht/device.hpp"
#include "qamht/dynamics.hpp"
#include "qamht/graph.hpp"
#include "qamht/ising.hpp"

namespace qamht {

/// Outcome of a batch of annealing shots, shared by the exact-dynamics and
/// Monte Carlo backends.
struct AnnealResult {
  std::string backend;
  double t_final = 0.0;
  std::size_t shots = 0;
  std::vector<Spins> samples;
  std::vector<double> energies;  ///< Ising energy of each sample
  Spins best_spins;
  double best_energy = std::numeric_limits<double>::infinity();
  /// Probability of the exact ground-state manifold, NaN when not computed.
  double p_ground = std::numeric_limits<double>::quiet_NaN();

  // Filled when the run solves a graph.
  std::vector<VertexSet> raw_sets;  ///< decoded sets, possibly violating edges
  std::vector<VertexSet> sets;      ///< repaired sets, always independent
  std::vector<bool> feasible;       ///< raw set independent
  std::vector<double> weights;      ///< weight of the raw set
  std::size_t infeasible = 0;
  VertexSet best_set;
  double best_weight = 0.0;
  /// Fraction of shots whose raw set equals best_set.
  double best_frequency = 0.0;

  nlohmann::json details = nlohmann::json::object();
};

/// Fraction of shots whose raw decoded set is independent with optimal weight.
double success_probability(const AnnealResult& r, double optimum_weight);
double success_probability(const AnnealResult& r, const MwisSolution& oracle);

/// Decodes samples against a graph: raw sets, repairs, best set.
void attach_mwis_decoding(AnnealResult& r, const WeightedGraph& g, const DecodeMap& map);

/// Records the best sample by energy (lowest index on ties).
void attach_best_energy(AnnealResult& r, const IsingProblem& p);

enum class AnnealMode {
  ideal,   ///< target couplings, no diabatic term
  device,  ///< adds the (Theta_k / 2) sigma_y terms of the device trajectory
};

enum class CouplingSource {
  target,  ///< J_kj(t) = h(t) E_p J_target
  device,  ///< J_kj(t) from the dispersive couplings of the device trajectory
};

struct AnnealConfig {
  Schedule schedule{100e-6, ScheduleShape::linear, kTwoPi * 2e6};
  /// Problem energy scale E_p (rad/s): H_t is E_p times the encoded problem.
  double energy_scale = kTwoPi * 200e3;
  bool noise = false;
  std::size_t shots = 1000;
  std::uint64_t seed = 1;
  /// Largest register evolved as a dense density matrix.
  std::size_t dense_limit = 8;
  /// Largest register accepted at all (jump trajectories above dense_limit).
  std::size_t max_qubits = 16;
  std::size_t trajectories = 200;
  EvolveOptions evolve;
  AnnealMode mode = AnnealMode::ideal;
  CouplingSource coupling_source = CouplingSource::target;
  DeviceConfig device = default_device_config();
  /// Penalty M as a multiple of the (normalized) largest weight.
  double penalty_factor = 2.0;

  void validate() const;
};

/// Device trajectory driven by the schedule: eps_k(t) = eps_max (1 - h(t)).
DeviceTrajectory anneal_device_trajectory(const AnnealConfig& cfg, std::size_t qubits);

/// H(t) = f(t) (w0/2) sum Z + h(t) E_p (sum_{k<j} J X X + sum Omega X) [+ sum (Theta/2) Y],
/// with rates from `dev` when cfg.noise is set. `dev` may be null in the
/// ideal noiseless case.
QuantumModel build_anneal_model(const IsingProblem& p, const AnnealConfig& cfg, const DeviceTrajectory* dev);

/// Starts in the driver ground state (all bits 1), evolves and samples in the target basis.
AnnealResult anneal_ising(const IsingProblem& p, const AnnealConfig& cfg);

/// Encodes the graph with weights divided by the largest weight, anneals and decodes.
AnnealResult anneal(const WeightedGraph& g, const AnnealConfig& cfg);

/// Relative Frobenius distance between the device couplings at t_f and the
/// target E_p J, before and after the best uniform rescaling of the device matrix.
struct CouplingDiscrepancy {
  double relative = 0.0;
  double relative_after_rescale = 0.0;
  double best_scale = 0.0;
};
CouplingDiscrepancy coupling_discrepancy(const IsingProblem& p, const DeviceTrajectory& d, double energy_scale);

const char* to_string(AnnealMode m);
const char* to_string(CouplingSource c);
AnnealMode anneal_mode_from_string(const std::string& s);
CouplingSource coupling_source_from_string(const std::string& s);

nlohmann::json to_json(const AnnealConfig& c);
AnnealConfig anneal_config_from_json(const nlohmann::json& j);
/// Summary plus, if requested, the per-shot samples as strings of '+'/'-'.
nlohmann::json to_json(const AnnealResult& r, bool with_samples = false);
std::string spins_string(const Spins& s);

}  // namespace qamht
