#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/helpers.hpp"
#include "qamht/anneal.hpp"
#include "qamht/errors.hpp"

using namespace qamht;

namespace {

WeightedGraph path3() { return WeightedGraph({2.0, 5.0, 2.0}, {{0, 1}, {1, 2}}); }

AnnealConfig quick_config() {
  AnnealConfig c;
  c.shots = 500;
  c.evolve.step_factor = 0.05;
  return c;
}

}  // namespace

TEST(AnnealModel, EndpointsOfTheHamiltonian) {
  const auto enc = encode_mwis(path3(), 10.0);
  AnnealConfig cfg;
  const auto m = build_anneal_model(enc.problem, cfg, nullptr);
  PauliTerms t;
  t.reset(3);
  m.hamiltonian(0.0, t);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(t.z[k], cfg.schedule.driver_scale / 2);
    EXPECT_EQ(t.x[k], 0.0);
    EXPECT_EQ(t.y[k], 0.0);
  }
  m.hamiltonian(cfg.schedule.t_final, t);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(t.z[k], 0.0, 1e-9);
    EXPECT_DOUBLE_EQ(t.x[k], cfg.energy_scale * enc.problem.field(k));
  }
  EXPECT_DOUBLE_EQ(t.xx[0 * 3 + 1], cfg.energy_scale * enc.problem.coupling(0, 1));
  EXPECT_EQ(t.xx[0 * 3 + 2], 0.0);
  EXPECT_GT(m.omega_scale, 0.0);
}

TEST(AnnealModel, NoiseRequiresADeviceTrajectory) {
  AnnealConfig cfg;
  cfg.noise = true;
  EXPECT_THROW(build_anneal_model(IsingProblem(2), cfg, nullptr), InputError);
}

TEST(Anneal, SuddenQuenchGivesUniformTargetDistribution) {
  // Far too fast to follow the Hamiltonian: the driver ground state is read
  // out in the conjugate basis, so every outcome is equally likely.
  AnnealConfig cfg = quick_config();
  cfg.schedule.t_final = 1e-12;
  const auto enc = encode_mwis(path3());
  const auto r = anneal_ising(enc.problem, cfg);
  const double expected = static_cast<double>(degenerate_ground_states(enc.problem).size()) / 8.0;
  EXPECT_NEAR(r.p_ground, expected, 1e-3);
}

TEST(Anneal, SlowAnnealFindsTheMwis) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = testing_support::random_graph(rng, 4, 0.5, 1.0, 3.0);
    AnnealConfig cfg = quick_config();
    cfg.schedule.t_final = 400e-6;
    const auto r = anneal(g, cfg);
    const auto exact = mwis_exact(g);
    EXPECT_GT(success_probability(r, exact), 0.75) << "trial " << trial;
    EXPECT_NEAR(r.best_weight, exact.weight, 1e-9);
    EXPECT_EQ(r.details.at("method"), "pure_state");
  }
}

TEST(Anneal, SlowNoiselessPathOfThree) {
  const WeightedGraph g({1.0, 5.0, 1.0}, {{0, 1}, {1, 2}});
  AnnealConfig cfg;
  cfg.schedule.t_final = 400e-6;
  cfg.shots = 100;
  const auto r = anneal(g, cfg);
  EXPECT_EQ(r.best_set, (VertexSet{1}));
  EXPECT_GE(success_probability(r, 5.0), 0.9);
  EXPECT_EQ(r.samples.size(), 100u);
  EXPECT_EQ(r.raw_sets.size(), 100u);
  for (const auto& s : r.sets) EXPECT_TRUE(is_independent(g, s));
}

TEST(Anneal, DeterministicInSeed) {
  AnnealConfig cfg = quick_config();
  cfg.schedule.t_final = 5e-6;
  const auto a = anneal(path3(), cfg);
  const auto b = anneal(path3(), cfg);
  EXPECT_EQ(a.samples, b.samples);
  cfg.seed = 2;
  const auto c = anneal(path3(), cfg);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Anneal, NoiseLowersSuccessAtLongTimes) {
  AnnealConfig cfg = quick_config();
  cfg.schedule.t_final = 400e-6;
  const auto clean = anneal(path3(), cfg);
  cfg.noise = true;
  const auto noisy = anneal(path3(), cfg);
  EXPECT_EQ(noisy.details.at("method"), "density_matrix");
  EXPECT_LT(noisy.details.at("trace_drift").get<double>(), 1e-9);
  EXPECT_LT(noisy.p_ground, clean.p_ground);
}

TEST(Anneal, JumpTrajectoriesAgreeWithDensityMatrix) {
  const auto enc = encode_mwis(WeightedGraph({1.0, 0.6}, {{0, 1}}));
  AnnealConfig cfg = quick_config();
  cfg.schedule.t_final = 20e-6;
  cfg.noise = true;
  const auto dense = anneal_ising(enc.problem, cfg);
  cfg.dense_limit = 1;
  cfg.trajectories = 600;
  const auto jumps = anneal_ising(enc.problem, cfg);
  EXPECT_EQ(jumps.details.at("method"), "quantum_jumps");
  const double se = std::sqrt(dense.p_ground * (1 - dense.p_ground) / 600.0);
  EXPECT_NEAR(jumps.p_ground, dense.p_ground, 5 * se + 0.01);
}

TEST(Anneal, DeviceModeReportsCouplingDiscrepancy) {
  AnnealConfig cfg = quick_config();
  cfg.schedule.t_final = 5e-6;
  cfg.mode = AnnealMode::device;
  const auto r = anneal(path3(), cfg);
  ASSERT_TRUE(r.details.contains("coupling_discrepancy"));
  EXPECT_GE(r.details["coupling_discrepancy"]["relative_after_rescale"].get<double>(), 0.0);
  EXPECT_LE(r.details["coupling_discrepancy"]["relative_after_rescale"].get<double>(), 1.0);
}

TEST(Anneal, CapacityAndInputErrors) {
  AnnealConfig cfg = quick_config();
  cfg.max_qubits = 3;
  EXPECT_THROW(anneal(WeightedGraph(std::vector<double>(4, 1.0)), cfg), CapacityError);
  EXPECT_THROW(anneal(WeightedGraph({1.0, -1.0}), quick_config()), InputError);
  AnnealConfig bad;
  bad.penalty_factor = 1.0;
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(Anneal, SuccessProbabilityCountsFeasibleOptimalShots) {
  AnnealResult r;
  r.weights = {5.0, 5.0, 4.0, 6.0};
  r.feasible = {true, false, true, true};
  EXPECT_DOUBLE_EQ(success_probability(r, 5.0), 0.5);
}

TEST(Anneal, CouplingDiscrepancyOfAnExactCopy) {
  IsingProblem p(2);
  p.set_coupling(0, 1, 0.5);
  DeviceTrajectory d;
  d.qubits = 2;
  d.couplings = {{0.0, 2.0, 2.0, 0.0}};
  const auto exact = coupling_discrepancy(p, d, 4.0);
  EXPECT_NEAR(exact.relative, 0.0, 1e-12);
  d.couplings = {{0.0, 4.0, 4.0, 0.0}};
  const auto doubled = coupling_discrepancy(p, d, 4.0);
  EXPECT_NEAR(doubled.relative, 1.0, 1e-12);
  EXPECT_NEAR(doubled.relative_after_rescale, 0.0, 1e-12);
  EXPECT_NEAR(doubled.best_scale, 0.5, 1e-12);
}

TEST(AnnealIo, ConfigRoundTrip) {
  AnnealConfig c;
  c.schedule.t_final = 3e-5;
  c.schedule.shape = ScheduleShape::smooth;
  c.noise = true;
  c.mode = AnnealMode::device;
  c.shots = 77;
  EXPECT_EQ(to_json(anneal_config_from_json(to_json(c))), to_json(c));
  EXPECT_THROW(anneal_config_from_json({{"mode", "bogus"}}), InputError);
}
