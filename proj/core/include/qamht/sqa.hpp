#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "qamht/anneal.hpp"
#include "qamht/graph.hpp"
#include "qamht/ising.hpp"

namespace qamht {

enum class ReadoutPolicy { final_slice, best_slice };

/// Path-integral Monte Carlo annealer. Energies are in units of the problem
/// scale E_p, so `beta` is the dimensionless product beta * E_p.
struct QmcConfig {
  std::size_t slices = 32;
  double beta = 10.0;
  std::size_t schedule_points = 64;
  std::size_t sweeps_per_point = 50;
  std::size_t restarts = 20;
  std::uint64_t seed = 1;
  ReadoutPolicy readout = ReadoutPolicy::final_slice;
  /// Driver scale omega_0 / E_p; the transverse field is f(t) omega_0 / 2.
  double driver_ratio = 10.0;
  ScheduleShape shape = ScheduleShape::linear;
  std::size_t max_spins = 256;

  void validate() const;
};

/// Ferromagnetic coupling between neighbouring Trotter slices for transverse
/// field `gamma`: -(1 / 2 beta) ln tanh(beta gamma / P).
double interslice_coupling(double gamma, double beta, std::size_t slices);

/// Transverse field at schedule position s in [0, 1], clamped below at
/// 1e-6 of its initial value.
double qmc_transverse_field(const QmcConfig& cfg, double s);

/// One restart per shot; restart r uses stream (seed, r) only.
AnnealResult sqa_anneal(const IsingProblem& p, const QmcConfig& cfg);

/// Encodes (weights divided by the largest), anneals and decodes; infeasible
/// samples are repaired and counted.
AnnealResult sqa_anneal(const WeightedGraph& g, const QmcConfig& cfg, double penalty_factor = 2.0);

double classical_energy(const IsingProblem& p, const Spins& slice);

struct AgreementReport {
  double success_rate = 0.0;
  double mean_residual = 0.0;
  /// Restarts needed for 99% confidence of one success; infinity if none succeeded.
  double restarts_to_solution = 0.0;
  bool best_matches = false;
  double best_energy = 0.0;
  double ground_energy = 0.0;
};

AgreementReport agreement_report(const IsingProblem& p, const QmcConfig& cfg, const GroundState& oracle);
/// Summary statistics of a finished run against a known ground energy.
AgreementReport agreement_report(const AnnealResult& r, double ground_energy);

const char* to_string(ReadoutPolicy r);
ReadoutPolicy readout_policy_from_string(const std::string& s);
nlohmann::json to_json(const QmcConfig& c);
QmcConfig qmc_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgreementReport& a);

}  // namespace qamht
