#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qamht/ising.hpp"
#include "qamht/quantum_model.hpp"

namespace qamht {

struct EvolveOptions {
  /// Step = step_factor / omega_scale (fourth-order Runge-Kutta).
  double step_factor = 0.01;
  std::size_t max_steps = 200'000'000;
};

/// Number of fixed steps used for a model.
std::size_t step_count(const QuantumModel& m, const EvolveOptions& opt);

StateVector basis_state(std::size_t qubits, std::uint64_t index);
DensityMatrix pure_density(const StateVector& psi);

/// Called after every step with (time, state).
using PureObserver = std::function<void(double, const StateVector&)>;
using DensityObserver = std::function<void(double, const DensityMatrix&)>;

/// Schrodinger evolution, ignoring any rates.
StateVector evolve_pure(const QuantumModel& m, StateVector psi, const EvolveOptions& opt = {},
                        const PureObserver& observe = {});

struct EvolveStats {
  std::size_t steps = 0;
  double trace_drift = 0.0;      ///< |tr rho(t) - tr rho(0)| maximized over the steps
  double hermiticity = 0.0;      ///< max |rho - rho^dagger| at the end
  double min_eigenvalue = 0.0;   ///< at the end
};

inline constexpr double kPositivityTolerance = 1e-6;

/// Lindblad master equation. Throws NumericalError if rho(t_f) has an
/// eigenvalue below -1e-6.
DensityMatrix evolve_lindblad(const QuantumModel& m, DensityMatrix rho, const EvolveOptions& opt = {},
                              EvolveStats* stats = nullptr, const DensityObserver& observe = {});

/// Quantum-jump unraveling; returns the outcome distribution in the target
/// (sigma_x) basis averaged over `trajectories` runs. Deterministic in seed.
std::vector<double> jump_distribution(const QuantumModel& m, const StateVector& psi0,
                                      std::size_t trajectories, std::uint64_t seed,
                                      const EvolveOptions& opt = {});

/// Single trajectory, for tests: the normalized final state.
StateVector jump_trajectory(const QuantumModel& m, StateVector psi, std::uint64_t seed,
                            std::uint64_t index, const EvolveOptions& opt = {});

/// Outcome probabilities after a Hadamard on every qubit: entry i is the
/// probability of reading the sigma_x eigenstates encoded by the bits of i,
/// bit 0 meaning sigma_x = +1.
std::vector<double> target_basis_probabilities(const DensityMatrix& rho);
std::vector<double> target_basis_probabilities(const StateVector& psi);
std::vector<double> z_basis_probabilities(const DensityMatrix& rho);

/// Independent draws from `probs`; shot i uses stream (seed, i) only.
std::vector<std::uint64_t> sample_measurements(const std::vector<double>& probs, std::size_t shots,
                                               std::uint64_t seed);

/// Bit k of `bits` = 0 -> spin +1, 1 -> spin -1.
Spins bits_to_spins(std::uint64_t bits, std::size_t n);
std::uint64_t spins_to_bits(const Spins& s);

}  // namespace qamht
