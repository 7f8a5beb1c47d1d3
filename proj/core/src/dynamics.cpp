#include "qamht/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "parallel.hpp"
#include "qamht/errors.hpp"
#include "qamht/io.hpp"
#include "qamht/rng.hpp"

namespace qamht {

namespace {

constexpr Complex kI{0.0, 1.0};

double rate_scale(const QuantumModel& m) {
  if (!m.rates) return 0.0;
  ChannelRates r;
  double scale = 0.0;
  for (int s = 0; s <= 16; ++s) {
    r.reset(m.qubits);
    m.rates(m.t_final * s / 16.0, r);
    for (std::size_t k = 0; k < m.qubits; ++k) scale = std::max({scale, r.relax[k] + r.excite[k] + r.dephase[k]});
  }
  return scale;
}

void check_model(const QuantumModel& m) {
  if (m.qubits == 0) throw InputError("quantum model has no qubits");
  if (m.qubits > kMaxQubits) throw CapacityError("quantum model exceeds 20 qubits; use the sqa backend");
  if (!(m.t_final > 0.0) || !std::isfinite(m.t_final)) throw InputError("quantum model needs t_final > 0");
  if (!m.hamiltonian) throw InputError("quantum model has no Hamiltonian");
}

PauliOperator frozen(const QuantumModel& m, double t) {
  PauliTerms terms;
  terms.reset(m.qubits);
  m.hamiltonian(t, terms);
  return PauliOperator(terms);
}

ChannelRates rates_at(const QuantumModel& m, double t) {
  ChannelRates r;
  r.reset(m.qubits);
  if (m.rates) m.rates(t, r);
  return r;
}

void lindblad_rhs(const PauliOperator& h, const ChannelRates* rates, const DensityMatrix& rho,
                  DensityMatrix& out, DensityMatrix& work) {
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index c = 0; c < dim; ++c) h.apply(rho.col(c).data(), work.col(c).data());
  out = -kI * (work - work.adjoint());
  if (rates == nullptr) return;
  for (std::size_t k = 0; k < h.qubits(); ++k) {
    const double gr = rates->relax[k];
    const double ge = rates->excite[k];
    const double gd = rates->dephase[k];
    if (gr == 0.0 && ge == 0.0 && gd == 0.0) continue;
    const auto mask = static_cast<Eigen::Index>(std::size_t{1} << k);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const bool bj = (j & mask) != 0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool bi = (i & mask) != 0;
        const Complex r = rho(i, j);
        Complex v = 0.0;
        if (gr != 0.0) {
          // sigma_minus moves bit 0 -> 1.
          if (bi && bj) v += gr * rho(i ^ mask, j ^ mask);
          v -= 0.5 * gr * static_cast<double>(!bi + !bj) * r;
        }
        if (ge != 0.0) {
          if (!bi && !bj) v += ge * rho(i ^ mask, j ^ mask);
          v -= 0.5 * ge * static_cast<double>(bi + bj) * r;
        }
        if (gd != 0.0 && bi != bj) v -= gd * r;
        out(i, j) += v;
      }
    }
  }
}

// Fast Walsh-Hadamard transform, unnormalized.
void fwht(Complex* a, std::size_t n) {
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const Complex u = a[j];
        const Complex v = a[j + len];
        a[j] = u + v;
        a[j + len] = u - v;
      }
    }
  }
}

std::vector<Complex> jump_diagonal(std::size_t n, const ChannelRates& r) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Complex> d(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double loss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      loss += ((i >> k) & 1U) ? r.excite[k] : r.relax[k];
      loss += 0.5 * r.dephase[k];
    }
    d[i] = Complex(0.0, -0.5 * loss);
  }
  return d;
}

PauliOperator effective(const QuantumModel& m, double t) {
  PauliOperator h = frozen(m, t);
  h.add_diagonal(jump_diagonal(m.qubits, rates_at(m, t)));
  return h;
}

void rk4_pure_step(const PauliOperator& h0, const PauliOperator& hm, const PauliOperator& h1, double dt,
                   StateVector& psi, StateVector k[4], StateVector& tmp) {
  const auto dim = psi.size();
  auto rhs = [&](const PauliOperator& h, const StateVector& in, StateVector& out) {
    h.apply(in.data(), out.data());
    out *= -kI;
  };
  rhs(h0, psi, k[0]);
  tmp = psi + (0.5 * dt) * k[0];
  rhs(hm, tmp, k[1]);
  tmp = psi + (0.5 * dt) * k[1];
  rhs(hm, tmp, k[2]);
  tmp = psi + dt * k[2];
  rhs(h1, tmp, k[3]);
  psi += (dt / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
  (void)dim;
}

}  // namespace

std::size_t step_count(const QuantumModel& m, const EvolveOptions& opt) {
  check_model(m);
  if (!(opt.step_factor > 0.0)) throw ConfigError("step_factor must be positive");
  const double scale = std::max(m.omega_scale > 0.0 ? m.omega_scale : estimate_omega_scale(m), rate_scale(m));
  const double steps = std::ceil(m.t_final * scale / opt.step_factor);
  if (steps > static_cast<double>(opt.max_steps)) {
    throw CapacityError("integration needs " + io::format_number(steps) + " steps, over the budget of " +
                        std::to_string(opt.max_steps) + "; shorten t_f or raise step_factor");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

StateVector basis_state(std::size_t qubits, std::uint64_t index) {
  if (qubits > kMaxQubits) throw CapacityError("basis_state: too many qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  if (index >= static_cast<std::uint64_t>(dim)) throw InputError("basis_state: index out of range");
  StateVector psi = StateVector::Zero(dim);
  psi(static_cast<Eigen::Index>(index)) = 1.0;
  return psi;
}

DensityMatrix pure_density(const StateVector& psi) { return psi * psi.adjoint(); }

StateVector evolve_pure(const QuantumModel& m, StateVector psi, const EvolveOptions& opt,
                        const PureObserver& observe) {
  const std::size_t steps = step_count(m, opt);
  if (psi.size() != static_cast<Eigen::Index>(std::size_t{1} << m.qubits)) {
    throw InputError("evolve_pure: state dimension does not match the model");
  }
  const double dt = m.t_final / static_cast<double>(steps);
  StateVector k[4];
  for (auto& v : k) v.resize(psi.size());
  StateVector tmp(psi.size());
  PauliOperator h0 = frozen(m, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = m.t_final * static_cast<double>(s) / static_cast<double>(steps);
    const double t1 = m.t_final * static_cast<double>(s + 1) / static_cast<double>(steps);
    PauliOperator hm = frozen(m, 0.5 * (t + t1));
    PauliOperator h1 = frozen(m, t1);
    rk4_pure_step(h0, hm, h1, dt, psi, k, tmp);
    h0 = std::move(h1);
    if (observe) observe(t1, psi);
  }
  if (!psi.allFinite()) throw NumericalError("pure-state evolution diverged; use a smaller step_factor");
  return psi;
}

DensityMatrix evolve_lindblad(const QuantumModel& m, DensityMatrix rho, const EvolveOptions& opt,
                              EvolveStats* stats, const DensityObserver& observe) {
  const std::size_t steps = step_count(m, opt);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m.qubits);
  if (rho.rows() != dim || rho.cols() != dim) {
    throw InputError("evolve_lindblad: density matrix dimension does not match the model");
  }
  const bool noisy = static_cast<bool>(m.rates);
  const double dt = m.t_final / static_cast<double>(steps);
  const Complex trace0 = rho.trace();
  double drift = 0.0;

  DensityMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim), work(dim, dim);
  PauliOperator h0 = frozen(m, 0.0);
  ChannelRates r0 = rates_at(m, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = m.t_final * static_cast<double>(s) / static_cast<double>(steps);
    const double t1 = m.t_final * static_cast<double>(s + 1) / static_cast<double>(steps);
    const double tm = 0.5 * (t + t1);
    PauliOperator hm = frozen(m, tm);
    PauliOperator h1 = frozen(m, t1);
    ChannelRates rm = rates_at(m, tm);
    ChannelRates r1 = rates_at(m, t1);
    lindblad_rhs(h0, noisy ? &r0 : nullptr, rho, k1, work);
    tmp = rho + (0.5 * dt) * k1;
    lindblad_rhs(hm, noisy ? &rm : nullptr, tmp, k2, work);
    tmp = rho + (0.5 * dt) * k2;
    lindblad_rhs(hm, noisy ? &rm : nullptr, tmp, k3, work);
    tmp = rho + dt * k3;
    lindblad_rhs(h1, noisy ? &r1 : nullptr, tmp, k4, work);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    drift = std::max(drift, std::abs(rho.trace() - trace0));
    h0 = std::move(h1);
    r0 = std::move(r1);
    if (observe) observe(t1, rho);
  }
  if (!rho.allFinite()) throw NumericalError("master equation diverged; use a smaller step_factor");

  const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  const double min_eig = Eigen::SelfAdjointEigenSolver<DensityMatrix>(herm, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (stats != nullptr) {
    stats->steps = steps;
    stats->trace_drift = drift;
    stats->hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    stats->min_eigenvalue = min_eig;
  }
  if (min_eig < -kPositivityTolerance) {
    throw NumericalError("density matrix lost positivity (eigenvalue " + io::format_number(min_eig) +
                         "); retry with a smaller step_factor, e.g. " + io::format_number(opt.step_factor / 4));
  }
  return rho;
}

StateVector jump_trajectory(const QuantumModel& m, StateVector psi, std::uint64_t seed, std::uint64_t index,
                            const EvolveOptions& opt) {
  const std::size_t steps = step_count(m, opt);
  const std::size_t n = m.qubits;
  const double dt = m.t_final / static_cast<double>(steps);
  Engine eng = make_stream(seed, index, rng_domain::kTrajectories);
  double threshold = uniform01(eng);
  StateVector k[4];
  for (auto& v : k) v.resize(psi.size());
  StateVector tmp(psi.size());
  PauliOperator h0 = effective(m, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = m.t_final * static_cast<double>(s) / static_cast<double>(steps);
    const double t1 = m.t_final * static_cast<double>(s + 1) / static_cast<double>(steps);
    PauliOperator hm = effective(m, 0.5 * (t + t1));
    PauliOperator h1 = effective(m, t1);
    rk4_pure_step(h0, hm, h1, dt, psi, k, tmp);
    h0 = std::move(h1);
    if (psi.squaredNorm() > threshold) continue;

    // Jump: pick a channel with probability proportional to <L^dagger L>.
    const ChannelRates r = rates_at(m, t1);
    std::vector<double> weight;
    weight.reserve(3 * n);
    const double norm2 = psi.squaredNorm();
    for (std::size_t q = 0; q < n; ++q) {
      double p0 = 0.0;
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if (((static_cast<std::size_t>(i) >> q) & 1U) == 0) p0 += std::norm(psi(i));
      }
      weight.push_back(r.relax[q] * p0);
      weight.push_back(r.excite[q] * (norm2 - p0));
      weight.push_back(0.5 * r.dephase[q] * norm2);
    }
    double total = 0.0;
    for (double w : weight) total += w;
    if (total > 0.0) {
      double u = uniform01(eng) * total;
      std::size_t c = 0;
      while (c + 1 < weight.size() && u >= weight[c]) u -= weight[c++];
      const std::size_t q = c / 3;
      const auto mask = static_cast<Eigen::Index>(std::size_t{1} << q);
      StateVector next = StateVector::Zero(psi.size());
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const bool bit = (i & mask) != 0;
        switch (c % 3) {
          case 0: if (bit) next(i) = psi(i ^ mask); break;
          case 1: if (!bit) next(i) = psi(i ^ mask); break;
          default: next(i) = bit ? -psi(i) : psi(i); break;
        }
      }
      psi = std::move(next);
    }
    psi.normalize();
    threshold = uniform01(eng);
  }
  if (!psi.allFinite() || psi.squaredNorm() == 0.0) {
    throw NumericalError("jump trajectory diverged; use a smaller step_factor");
  }
  psi.normalize();
  return psi;
}

std::vector<double> jump_distribution(const QuantumModel& m, const StateVector& psi0, std::size_t trajectories,
                                      std::uint64_t seed, const EvolveOptions& opt) {
  if (trajectories == 0) throw InputError("jump_distribution needs at least one trajectory");
  step_count(m, opt);
  const std::size_t dim = std::size_t{1} << m.qubits;
  std::vector<double> acc(dim, 0.0);
  // Fixed-size blocks summed in index order keep the result independent of the thread count.
  constexpr std::size_t kBlock = 32;
  std::vector<std::vector<double>> block(kBlock);
  for (std::size_t start = 0; start < trajectories; start += kBlock) {
    const std::size_t count = std::min(kBlock, trajectories - start);
    detail::parallel_for(count, [&](std::size_t b) {
      block[b] = target_basis_probabilities(jump_trajectory(m, psi0, seed, start + b, opt));
    });
    for (std::size_t b = 0; b < count; ++b) {
      for (std::size_t i = 0; i < dim; ++i) acc[i] += block[b][i];
    }
  }
  for (double& p : acc) p /= static_cast<double>(trajectories);
  return acc;
}

std::vector<double> target_basis_probabilities(const DensityMatrix& rho) {
  const auto dim = rho.rows();
  DensityMatrix w = rho;
  for (Eigen::Index c = 0; c < dim; ++c) fwht(w.col(c).data(), static_cast<std::size_t>(dim));
  DensityMatrix t = w.transpose();
  for (Eigen::Index c = 0; c < dim; ++c) fwht(t.col(c).data(), static_cast<std::size_t>(dim));
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = std::max(0.0, t(i, i).real() / static_cast<double>(dim));
  return p;
}

std::vector<double> target_basis_probabilities(const StateVector& psi) {
  StateVector w = psi;
  fwht(w.data(), static_cast<std::size_t>(w.size()));
  const double norm = static_cast<double>(w.size());
  std::vector<double> p(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(w(i)) / norm;
  return p;
}

std::vector<double> z_basis_probabilities(const DensityMatrix& rho) {
  std::vector<double> p(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) p[static_cast<std::size_t>(i)] = std::max(0.0, rho(i, i).real());
  return p;
}

std::vector<std::uint64_t> sample_measurements(const std::vector<double>& probs, std::size_t shots,
                                               std::uint64_t seed) {
  if (probs.empty()) throw InputError("sample_measurements: empty distribution");
  std::vector<double> cdf(probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) throw InputError("sample_measurements: invalid probability");
    total += probs[i];
    cdf[i] = total;
  }
  if (!(total > 0.0)) throw InputError("sample_measurements: distribution has zero mass");
  std::vector<std::uint64_t> out(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    Engine eng = make_stream(seed, s, rng_domain::kShots);
    const double u = uniform01(eng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Skip zero-probability outcomes that share a cdf value.
    while (probs[static_cast<std::size_t>(it - cdf.begin())] == 0.0 && it != cdf.begin()) --it;
    out[s] = static_cast<std::uint64_t>(it - cdf.begin());
  }
  return out;
}

Spins bits_to_spins(std::uint64_t bits, std::size_t n) {
  Spins s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = ((bits >> k) & 1U) ? -1 : +1;
  return s;
}

std::uint64_t spins_to_bits(const Spins& s) {
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == -1) bits |= std::uint64_t{1} << k;
    else if (s[k] != 1) throw InputError("spin values must be +1 or -1");
  }
  return bits;
}

}  // namespace qamht
