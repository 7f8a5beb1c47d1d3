#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qamht/dynamics.hpp"
#include "qamht/errors.hpp"
#include "qamht/rng.hpp"

using namespace qamht;

namespace {

using Cd = std::complex<double>;

// Single-qubit operator `op` on qubit k of n, bit k of the basis index.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, std::size_t k, std::size_t n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t q = n; q-- > 0;) {
    const Eigen::Matrix2cd f = q == k ? op : Eigen::Matrix2cd::Identity();
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
    out = next;
  }
  return out;
}

Eigen::Matrix2cd pauli(char which) {
  Eigen::Matrix2cd m;
  switch (which) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, Cd(0, -1), Cd(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::MatrixXcd dense_from_terms(const PauliTerms& t) {
  const std::size_t n = t.qubits();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(1 << n, 1 << n);
  for (std::size_t k = 0; k < n; ++k) {
    h += t.z[k] * embed(pauli('z'), k, n) + t.x[k] * embed(pauli('x'), k, n) + t.y[k] * embed(pauli('y'), k, n);
    for (std::size_t j = k + 1; j < n; ++j) h += t.xx[k * n + j] * embed(pauli('x'), k, n) * embed(pauli('x'), j, n);
  }
  return h;
}

PauliTerms random_terms(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  PauliTerms t;
  t.reset(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.z[k] = g(rng);
    t.x[k] = g(rng);
    t.y[k] = g(rng);
    for (std::size_t j = k + 1; j < n; ++j) t.xx[k * n + j] = g(rng);
  }
  return t;
}

QuantumModel constant_model(const PauliTerms& terms, double tf) {
  QuantumModel m;
  m.qubits = terms.qubits();
  m.t_final = tf;
  m.hamiltonian = [terms](double, PauliTerms& out) { out = terms; };
  return m;
}

StateVector random_state(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  StateVector psi(1 << n);
  for (auto& a : psi) a = Cd(g(rng), g(rng));
  return psi.normalized();
}

}  // namespace

TEST(PauliOperator, MatchesKroneckerConstruction) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto t = random_terms(rng, n);
    const PauliOperator op(t);
    EXPECT_LT((op.dense() - dense_from_terms(t)).cwiseAbs().maxCoeff(), 1e-12);
    const auto psi = random_state(rng, n);
    StateVector out(psi.size());
    op.apply(psi.data(), out.data());
    EXPECT_LT((out - dense_from_terms(t) * psi).norm(), 1e-12);
  }
}

TEST(Evolution, ConstantHamiltonianMatchesSpectralPropagator) {
  std::mt19937_64 rng(2);
  const auto t = random_terms(rng, 3);
  const auto m = constant_model(t, 2.0);
  const auto psi0 = random_state(rng, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_from_terms(t));
  Eigen::VectorXcd phase(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(Cd(0, -es.eigenvalues()(i) * 2.0));
  const StateVector exact = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * psi0;
  const auto psi = evolve_pure(m, psi0);
  EXPECT_LT((psi - exact).norm(), 1e-8);
  const auto rho = evolve_lindblad(m, pure_density(psi0));
  EXPECT_LT((rho - pure_density(exact)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Evolution, RabiOscillation) {
  PauliTerms t;
  t.reset(1);
  t.x[0] = 0.5;  // (Omega / 2) X with Omega = 1
  const auto m = constant_model(t, 1.3);
  const auto psi = evolve_pure(m, basis_state(1, 0));
  EXPECT_NEAR(std::norm(psi(0)), std::pow(std::cos(1.3 / 2), 2), 1e-10);
}

TEST(Evolution, LandauZener) {
  // H = (v (t - T) / 2) Z + (Delta / 2) X, swept through the crossing.
  const double delta = 1.0;
  const double v = 2.0;
  const double half = 80.0;
  QuantumModel m;
  m.qubits = 1;
  m.t_final = 2 * half;
  m.hamiltonian = [=](double t, PauliTerms& out) {
    out.z[0] = 0.5 * v * (t - half);
    out.x[0] = 0.5 * delta;
  };
  EvolveOptions opt;
  opt.step_factor = 0.05;
  const auto psi = evolve_pure(m, basis_state(1, 0), opt);
  const double diabatic = std::exp(-M_PI * delta * delta / (2 * v));
  EXPECT_NEAR(std::norm(psi(0)), diabatic, 0.02);
}

TEST(Lindblad, RelaxationIsExponential) {
  PauliTerms t;
  t.reset(1);
  t.z[0] = 1.0;
  auto m = constant_model(t, 3.0);
  const double gamma = 0.4;
  m.rates = [=](double, ChannelRates& r) { r.relax[0] = gamma; };
  EvolveStats stats;
  const auto rho = evolve_lindblad(m, pure_density(basis_state(1, 0)), {}, &stats);
  EXPECT_NEAR(rho(0, 0).real(), std::exp(-gamma * 3.0), 1e-9);
  EXPECT_LT(stats.trace_drift, 1e-12);
  EXPECT_LT(stats.hermiticity, 1e-12);
  EXPECT_GT(stats.min_eigenvalue, -1e-12);
}

TEST(Lindblad, DephasingDampsCoherence) {
  PauliTerms t;
  t.reset(1);
  auto m = constant_model(t, 2.0);
  const double gd = 0.7;
  m.rates = [=](double, ChannelRates& r) { r.dephase[0] = gd; };
  StateVector plus(2);
  plus << M_SQRT1_2, M_SQRT1_2;
  const auto rho = evolve_lindblad(m, pure_density(plus));
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.5 * std::exp(-gd * 2.0), 1e-9);
  EXPECT_NEAR(target_basis_probabilities(rho)[0], 0.5 * (1 + std::exp(-gd * 2.0)), 1e-9);
}

TEST(Lindblad, DetailedBalanceSteadyState) {
  PauliTerms t;
  t.reset(1);
  t.z[0] = 0.3;
  auto m = constant_model(t, 40.0);
  m.rates = [](double, ChannelRates& r) {
    r.relax[0] = 0.5;
    r.excite[0] = 0.2;
  };
  const auto rho = evolve_lindblad(m, pure_density(basis_state(1, 0)));
  EXPECT_NEAR(rho(1, 1).real() / rho(0, 0).real(), 0.5 / 0.2, 1e-6);
}

TEST(Lindblad, TraceAndPositivityUnderNoisyDrive) {
  std::mt19937_64 rng(8);
  const auto base = random_terms(rng, 3);
  QuantumModel m;
  m.qubits = 3;
  m.t_final = 4.0;
  m.hamiltonian = [base](double t, PauliTerms& out) {
    out = base;
    for (auto& v : out.x) v *= std::cos(t);
  };
  m.rates = [](double t, ChannelRates& r) {
    for (std::size_t k = 0; k < 3; ++k) {
      r.relax[k] = 0.1 + 0.05 * k;
      r.excite[k] = 0.02;
      r.dephase[k] = 0.2 * (1 + std::sin(t));
    }
  };
  EvolveStats stats;
  const auto rho = evolve_lindblad(m, pure_density(random_state(rng, 3)), {}, &stats);
  EXPECT_LT(stats.trace_drift, 1e-10);
  EXPECT_GT(stats.min_eigenvalue, -1e-9);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
}

TEST(Jumps, AverageMatchesMasterEquation) {
  std::mt19937_64 rng(4);
  const auto terms = random_terms(rng, 2);
  auto m = constant_model(terms, 2.0);
  m.rates = [](double, ChannelRates& r) {
    r.relax = {0.4, 0.2};
    r.excite = {0.05, 0.1};
    r.dephase = {0.3, 0.5};
  };
  const auto psi0 = basis_state(2, 3);
  const auto dense = target_basis_probabilities(evolve_lindblad(m, pure_density(psi0)));
  const std::size_t runs = 3000;
  const auto jumps = jump_distribution(m, psi0, runs, 17);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const double se = std::sqrt(dense[i] * (1 - dense[i]) / runs);
    EXPECT_NEAR(jumps[i], dense[i], 5 * se + 1e-3) << "outcome " << i;
  }
  EXPECT_EQ(jump_distribution(m, psi0, 40, 5), jump_distribution(m, psi0, 40, 5));
}

TEST(Jumps, ClosedSystemReducesToSchrodinger) {
  std::mt19937_64 rng(6);
  const auto terms = random_terms(rng, 2);
  const auto m = constant_model(terms, 1.5);
  const auto psi0 = random_state(rng, 2);
  const auto traj = jump_trajectory(m, psi0, 1, 0);
  const auto pure = evolve_pure(m, psi0);
  EXPECT_LT((traj - pure).norm(), 1e-9);
}

TEST(Readout, TargetBasisMatchesHadamardTransform) {
  std::mt19937_64 rng(3);
  const std::size_t n = 3;
  const auto psi = random_state(rng, n);
  Eigen::Matrix2cd had;
  had << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(1 << n, 1 << n);
  for (std::size_t k = 0; k < n; ++k) h = embed(had, k, n) * h;
  const Eigen::VectorXcd rotated = h * psi;
  const auto p = target_basis_probabilities(psi);
  const auto pr = target_basis_probabilities(pure_density(psi));
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(p[i], std::norm(rotated(i)), 1e-12);
    EXPECT_NEAR(pr[i], std::norm(rotated(i)), 1e-12);
  }
}

TEST(Sampling, FrequenciesAndPrefixStability) {
  const std::vector<double> probs{0.1, 0.0, 0.6, 0.3};
  const auto a = sample_measurements(probs, 20000, 9);
  std::vector<double> freq(4, 0.0);
  for (auto s : a) freq[s] += 1.0 / a.size();
  EXPECT_EQ(freq[1], 0.0);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(freq[i], probs[i], 0.015);
  const auto b = sample_measurements(probs, 100, 9);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.begin()));
  EXPECT_THROW(sample_measurements({0.0, 0.0}, 5, 1), InputError);
  EXPECT_THROW(sample_measurements({0.5, -0.1}, 5, 1), InputError);
}

TEST(Sampling, SpinBitConversions) {
  EXPECT_EQ(bits_to_spins(0b101, 3), (Spins{-1, +1, -1}));
  EXPECT_EQ(spins_to_bits({-1, +1, -1}), 0b101u);
  EXPECT_THROW(spins_to_bits({0, 1}), InputError);
}

TEST(Evolution, StepBudgetIsACapacityError) {
  PauliTerms t;
  t.reset(1);
  t.z[0] = 1e6;
  const auto m = constant_model(t, 1.0);
  EvolveOptions opt;
  opt.max_steps = 1000;
  EXPECT_THROW(evolve_pure(m, basis_state(1, 0), opt), CapacityError);
  opt.step_factor = 0.0;
  EXPECT_THROW(step_count(m, opt), ConfigError);
}
