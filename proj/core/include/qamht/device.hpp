#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamht/ising.hpp"

namespace qamht {

/// Two pi, for converting Hz to rad/s.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Flopping-mode spin qubit in a double quantum dot. All energies in rad/s.
///   H = (eps/2) tau_z + gamma tau_x + (alpha_s/2) sigma_z + (alpha_as/2) sigma_x tau_z
struct QubitParams {
  double gamma = kTwoPi * 10e9;
  double alpha_s = kTwoPi * 4e9;
  double alpha_as = kTwoPi * 1e9;
  double g0 = kTwoPi * 50e6;

  void validate() const;
};

struct ResonatorParams {
  double omega_c = kTwoPi * 5e9;
  double kappa = kTwoPi * 1e6;

  void validate() const;
};

/// Markovian noise channels. Rates in 1/s.
struct NoiseParams {
  /// Charge-noise dephasing scale: Gamma = charge_noise * (d omega_q / d eps)^2.
  double charge_noise = 0.0;
  /// Phonon / contact relaxation, added to the Purcell rate.
  double phonon_relax = 0.0;
  /// Bath temperature in kelvin; 0 disables thermal excitation.
  double temperature = 0.0;

  void validate() const;
};

/// Uniform grid of `steps + 1` points on [0, t_final].
struct TimeGrid {
  double t_final = 0.0;
  std::size_t steps = 0;

  [[nodiscard]] std::size_t points() const { return steps + 1; }
  [[nodiscard]] double dt() const { return t_final / static_cast<double>(steps); }
  [[nodiscard]] double time(std::size_t i) const;
  /// Index of the grid point at time t. Throws InputError when t is off the grid.
  [[nodiscard]] std::size_t index_of(double t) const;
  void validate() const;
};

/// Per-qubit bias eps_k(t) and its time derivative, sampled on a grid.
struct BiasTrajectory {
  TimeGrid grid;
  std::vector<std::vector<double>> eps;      ///< [qubit][point]
  std::vector<std::vector<double>> eps_dot;  ///< [qubit][point]

  [[nodiscard]] std::size_t qubits() const { return eps.size(); }
  void validate() const;
};

/// Bias samples with derivatives estimated by second-order finite differences.
BiasTrajectory bias_from_samples(const TimeGrid& grid, std::vector<std::vector<double>> eps);

/// eps_k(t) = eps_max * (1 - h(t)): far detuned (small coupling) while the
/// driver dominates, at the sweet spot when the target is fully on.
BiasTrajectory bias_from_schedule(const Schedule& s, double eps_max, std::size_t qubits,
                                  std::size_t steps);

/// Lowest spin-like splitting of the single-qubit Hamiltonian. Even in eps.
double qubit_frequency(double eps, const QubitParams& q);
/// d omega_q / d eps, analytic. Zero at eps = 0.
double qubit_frequency_slope(double eps, const QubitParams& q);

/// Orbital mixing angle phi in (0, pi): cos phi = eps / Omega, sin phi = 2 gamma / Omega.
double mixing_angle(double eps, const QubitParams& q);
double mixing_angle_slope(double eps, const QubitParams& q);

struct DipoleCouplings {
  double g_sigma = 0.0;
  double lambda_sigma = 0.0;
};

/// Transverse and longitudinal coupling of the qubit to the resonator.
DipoleCouplings dipole_couplings(double eps, const QubitParams& q);

/// Theta = d phi / dt for bias eps moving at rate eps_dot.
double theta_rate(double eps, double eps_dot, const QubitParams& q);
/// Theta of qubit k at grid time t.
double diabatic_theta(const BiasTrajectory& traj, std::size_t k, const QubitParams& q, double t);

using Complex = std::complex<double>;

/// Generator coefficients of S = a (alpha sx + beta sy + gamma sz) - h.c.
struct SwCoefficients {
  Complex alpha{};
  Complex beta{};
  Complex gamma{};
};

/// Slow parameters that drive the generator ODE of one qubit, on a grid.
struct SwDrive {
  TimeGrid grid;
  std::vector<double> omega_q;
  std::vector<double> theta;
  std::vector<double> g_sigma;
  std::vector<double> lambda_sigma;
};

enum class SwIntegrator {
  /// Exact propagator of the frozen linear system on each step, with the
  /// drive interpolated linearly. Usable at any step size.
  exponential,
  /// Classical fourth-order Runge-Kutta on the raw equations. Requires omega * dt < 0.1.
  rk4,
};

/// Stationary solution of the ODE for frozen parameters.
SwCoefficients sw_fixed_point(double omega_q, double theta, double g_sigma, double lambda_sigma,
                              double omega_c);

/// Integrates
///   alpha' = i wc alpha + i g + wq beta - Theta gamma
///   beta'  = i wc beta - wq alpha
///   gamma' = i wc gamma + Theta alpha + i lambda
/// over the drive grid. Starts from the fixed point unless `initial` is given.
std::vector<SwCoefficients> solve_sw_ode(const SwDrive& drive, double omega_c,
                                         SwIntegrator method = SwIntegrator::exponential,
                                         const SwCoefficients* initial = nullptr);

/// Largest |alpha|, |beta|, |gamma| over a solution.
double sw_magnitude(const std::vector<SwCoefficients>& sw);

/// Dispersive sigma_x sigma_x coupling of qubits k and j:
///   J_kj = Re(alpha_k) g_j + Re(alpha_j) g_k.
double pair_coupling(const SwCoefficients& a, double g_a, const SwCoefficients& b, double g_b);

/// Symmetric n x n matrix (row-major) with zero diagonal.
std::vector<double> ising_couplings(const std::vector<SwCoefficients>& sw,
                                    const std::vector<double>& g_sigma);

/// Static closed form of pair_coupling at the fixed point (counter-rotating
/// terms included): (g_k g_j / 2)(1/D_k + 1/D_j - 1/S_k - 1/S_j).
double static_coupling(double g_k, double omega_k, double g_j, double omega_j, double omega_c);

struct LindbladRates {
  double relax = 0.0;   ///< downward rate (sigma_minus)
  double excite = 0.0;  ///< upward rate, nonzero only at finite temperature
  double dephase = 0.0; ///< pure dephasing rate of the coherences
};

/// Purcell relaxation uses the co-rotating part alpha + i beta (~ g / Delta).
LindbladRates lindblad_rates(const SwCoefficients& sw, double omega_q, double d_omega_d_eps,
                             const NoiseParams& noise, const ResonatorParams& r);

/// Full per-qubit parameter history along a bias trajectory.
struct DeviceTrajectory {
  TimeGrid grid;
  std::size_t qubits = 0;
  std::vector<std::vector<double>> eps;
  std::vector<std::vector<double>> omega;
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> g_sigma;
  std::vector<std::vector<double>> lambda_sigma;
  std::vector<std::vector<SwCoefficients>> sw;
  std::vector<std::vector<LindbladRates>> rates;
  /// couplings[i] is the row-major J matrix at grid point i.
  std::vector<std::vector<double>> couplings;
  double max_sw_magnitude = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] double coupling(std::size_t k, std::size_t j, std::size_t i) const {
    return couplings[i][k * qubits + j];
  }
};

/// Dispersive-regime guard: warn when any SW coefficient exceeds this.
inline constexpr double kDispersiveWarn = 0.3;

DeviceTrajectory build_device_trajectory(const BiasTrajectory& bias,
                                         const std::vector<QubitParams>& qubits,
                                         const ResonatorParams& r, const NoiseParams& noise,
                                         SwIntegrator method = SwIntegrator::exponential);

/// Linear interpolation of a per-point series at time t.
double interpolate(const TimeGrid& grid, const std::vector<double>& series, double t);

/// CSV with t and per-qubit omega, theta, g_sigma, lambda_sigma, relax, dephase.
std::string trajectory_csv(const DeviceTrajectory& d);

/// Device description: qubit list, resonator, noise and grid.
struct DeviceConfig {
  std::vector<QubitParams> qubits;
  ResonatorParams resonator;
  NoiseParams noise;
  /// Bias at the start of the anneal, as a multiple of the tunnel energy.
  double eps_max_over_gamma = 10.0;
  std::size_t grid_steps = 2000;
};

/// Default noise of the emulated device.
NoiseParams default_noise();
/// Default qubit, resonator and noise parameters.
DeviceConfig default_device_config();
/// Parameters of qubit k: a single entry is shared by all qubits, an empty
/// list means defaults.
std::vector<QubitParams> device_qubits(const DeviceConfig& c, std::size_t n);

nlohmann::json to_json(const QubitParams& q);
nlohmann::json to_json(const ResonatorParams& r);
nlohmann::json to_json(const NoiseParams& n);
nlohmann::json to_json(const DeviceConfig& c);
DeviceConfig device_config_from_json(const nlohmann::json& j);

const char* to_string(SwIntegrator m);

}  // namespace qamht
