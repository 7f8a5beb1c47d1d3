#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qamht {

/// Basis index bit k is 0 for sigma_z = +1 on qubit k and 1 for sigma_z = -1.
inline constexpr std::size_t kMaxQubits = 20;

/// H = sum_k (z_k Z_k + x_k X_k + y_k Y_k) + sum_{k<j} xx_kj X_k X_j.
struct PauliTerms {
  std::vector<double> z;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> xx;  ///< n x n row-major, only k < j is read

  void reset(std::size_t n);
  [[nodiscard]] std::size_t qubits() const { return z.size(); }
};

/// Per-qubit Lindblad channels: sigma_minus (relax), sigma_plus (excite) and
/// sigma_z dephasing at a rate that damps coherences by exp(-dephase t).
struct ChannelRates {
  std::vector<double> relax;
  std::vector<double> excite;
  std::vector<double> dephase;

  void reset(std::size_t n);
  [[nodiscard]] bool any() const;
};

/// Time-dependent open-system model on [0, t_final].
struct QuantumModel {
  std::size_t qubits = 0;
  double t_final = 0.0;
  std::function<void(double, PauliTerms&)> hamiltonian;
  /// Empty for a closed system.
  std::function<void(double, ChannelRates&)> rates;
  /// Largest angular frequency of the model; sets the integration step.
  double omega_scale = 0.0;
};

/// Sampled bound on the local energy scale: max_k 2 (|z|+|x|+|y|+sum_j |xx_kj|).
double estimate_omega_scale(const QuantumModel& m, std::size_t samples = 65);

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

/// Frozen Hamiltonian with a matrix-free apply.
class PauliOperator {
 public:
  explicit PauliOperator(const PauliTerms& terms);

  [[nodiscard]] std::size_t qubits() const { return n_; }
  [[nodiscard]] std::size_t dim() const { return diag_.size(); }
  /// out = H in, both of length dim().
  void apply(const Complex* in, Complex* out) const;
  /// Adds a diagonal term (e.g. the anti-Hermitian part of a jump Hamiltonian).
  void add_diagonal(const std::vector<Complex>& d);
  [[nodiscard]] Eigen::MatrixXcd dense() const;

 private:
  struct Flip {
    std::uint64_t mask;
    Complex up;    // amplitude when the bit of the target index is 0
    Complex down;  // amplitude when it is 1
    std::uint64_t bit;
  };
  std::size_t n_;
  std::vector<Complex> diag_;
  std::vector<Flip> flips_;
};

/// Dense H(t) of a model; for tests and small systems.
Eigen::MatrixXcd hamiltonian_matrix(const QuantumModel& m, double t);

}  // namespace qamht
