#include "qamht/quantum_model.hpp"

#include <algorithm>
#include <cmath>

#include "qamht/errors.hpp"

namespace qamht {

void PauliTerms::reset(std::size_t n) {
  z.assign(n, 0.0);
  x.assign(n, 0.0);
  y.assign(n, 0.0);
  xx.assign(n * n, 0.0);
}

void ChannelRates::reset(std::size_t n) {
  relax.assign(n, 0.0);
  excite.assign(n, 0.0);
  dephase.assign(n, 0.0);
}

bool ChannelRates::any() const {
  auto nz = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double r) { return r != 0.0; });
  };
  return nz(relax) || nz(excite) || nz(dephase);
}

double estimate_omega_scale(const QuantumModel& m, std::size_t samples) {
  PauliTerms t;
  double scale = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    t.reset(m.qubits);
    const double time = samples == 1 ? 0.0 : m.t_final * static_cast<double>(s) / static_cast<double>(samples - 1);
    m.hamiltonian(time, t);
    for (std::size_t k = 0; k < m.qubits; ++k) {
      double local = std::abs(t.z[k]) + std::abs(t.x[k]) + std::abs(t.y[k]);
      for (std::size_t j = 0; j < m.qubits; ++j) {
        if (j != k) local += std::abs(t.xx[std::min(k, j) * m.qubits + std::max(k, j)]);
      }
      scale = std::max(scale, 2.0 * local);
    }
  }
  return scale;
}

PauliOperator::PauliOperator(const PauliTerms& terms) : n_(terms.qubits()) {
  if (n_ > kMaxQubits) throw CapacityError("state-vector models are limited to 20 qubits");
  const std::size_t dim = std::size_t{1} << n_;
  diag_.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < n_; ++k) d += ((i >> k) & 1U) ? -terms.z[k] : terms.z[k];
    diag_[i] = d;
  }
  const Complex I{0.0, 1.0};
  for (std::size_t k = 0; k < n_; ++k) {
    if (terms.x[k] == 0.0 && terms.y[k] == 0.0) continue;
    // <i|Y|i^m> is -i when bit k of i is 0 and +i when it is 1.
    flips_.push_back({std::uint64_t{1} << k, terms.x[k] - I * terms.y[k], terms.x[k] + I * terms.y[k],
                      std::uint64_t{1} << k});
  }
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t j = k + 1; j < n_; ++j) {
      const double v = terms.xx[k * n_ + j];
      if (v == 0.0) continue;
      flips_.push_back({(std::uint64_t{1} << k) | (std::uint64_t{1} << j), v, v, 0});
    }
  }
}

void PauliOperator::apply(const Complex* in, Complex* out) const {
  const std::size_t dim = diag_.size();
  for (std::size_t i = 0; i < dim; ++i) out[i] = diag_[i] * in[i];
  for (const auto& f : flips_) {
    if (f.bit == 0) {
      const double v = f.up.real();
      for (std::size_t i = 0; i < dim; ++i) out[i] += v * in[i ^ f.mask];
    } else {
      for (std::size_t i = 0; i < dim; ++i) out[i] += ((i & f.bit) ? f.down : f.up) * in[i ^ f.mask];
    }
  }
}

void PauliOperator::add_diagonal(const std::vector<Complex>& d) {
  for (std::size_t i = 0; i < diag_.size(); ++i) diag_[i] += d[i];
}

Eigen::MatrixXcd PauliOperator::dense() const {
  const auto dim = static_cast<Eigen::Index>(diag_.size());
  Eigen::MatrixXcd h(dim, dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    e.setZero();
    e(c) = 1.0;
    apply(e.data(), h.col(c).data());
  }
  return h;
}

Eigen::MatrixXcd hamiltonian_matrix(const QuantumModel& m, double t) {
  PauliTerms terms;
  terms.reset(m.qubits);
  m.hamiltonian(t, terms);
  return PauliOperator(terms).dense();
}

}  // namespace qamht
