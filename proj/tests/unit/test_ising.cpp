#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/helpers.hpp"
#include "qamht/errors.hpp"
#include "qamht/ising.hpp"

using namespace qamht;

namespace {

// Energy of the set x under -sum w x + M sum_E x_i x_j, computed from the graph.
double qubo_value(const WeightedGraph& g, const VertexSet& s, double M) {
  std::vector<int> x(g.size(), 0);
  for (auto v : s) x[v] = 1;
  double e = 0.0;
  for (Vertex v = 0; v < g.size(); ++v) e -= g.weight(v) * x[v];
  for (const auto& [a, b] : g.edges()) e += M * x[a] * x[b];
  return e;
}

VertexSet mask_to_set(std::uint32_t mask, std::size_t n) {
  VertexSet s;
  for (std::size_t v = 0; v < n; ++v) {
    if (mask >> v & 1u) s.push_back(v);
  }
  return s;
}

}  // namespace

TEST(Ising, EnergyOfASmallExample) {
  IsingProblem p({0.5, -1.0}, {{0, 1, 2.0}}, 0.25);
  EXPECT_DOUBLE_EQ(ising_energy(p, {+1, +1}), 0.5 - 1.0 + 2.0 + 0.25);
  EXPECT_DOUBLE_EQ(ising_energy(p, {+1, -1}), 0.5 + 1.0 - 2.0 + 0.25);
  EXPECT_DOUBLE_EQ(ising_energy(p, {-1, +1}), -0.5 - 1.0 - 2.0 + 0.25);
}

TEST(Ising, CouplingMatrixIsSymmetric) {
  IsingProblem p(3);
  p.set_coupling(2, 0, 1.5);
  EXPECT_EQ(p.coupling(0, 2), 1.5);
  EXPECT_EQ(p.coupling(2, 0), 1.5);
  EXPECT_EQ(p.coupling(1, 1), 0.0);
  EXPECT_THROW(p.set_coupling(1, 1, 1.0), InputError);
  EXPECT_THROW(p.set_coupling(0, 1, std::nan("")), InputError);
}

TEST(Ising, GroundStateMatchesDirectEnumeration) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    IsingProblem p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.set_field(i, gauss(rng));
      for (std::size_t j = i + 1; j < n; ++j) p.set_coupling(i, j, gauss(rng));
    }
    const auto gs = ground_state_exhaustive(p);
    EXPECT_NEAR(gs.energy, testing_support::brute_force_ground_energy(p), 1e-12);
    EXPECT_NEAR(ising_energy(p, gs.spins), gs.energy, 1e-12);
  }
}

TEST(Ising, ExhaustiveRefusesLargeProblems) {
  EXPECT_THROW(ground_state_exhaustive(IsingProblem(25)), CapacityError);
}

TEST(Ising, DegenerateGroundStates) {
  // Antiferromagnetic pair without fields: two ground states.
  IsingProblem p({0.0, 0.0}, {{0, 1, 1.0}});
  const auto states = degenerate_ground_states(p);
  EXPECT_EQ(states.size(), 2u);
}

TEST(Encoding, CoefficientsOnAPath) {
  const WeightedGraph g({2.0, 5.0, 2.0}, {{0, 1}, {1, 2}});
  const double M = 10.0;
  const auto enc = encode_mwis(g, M);
  EXPECT_DOUBLE_EQ(enc.problem.coupling(0, 1), M / 4);
  EXPECT_DOUBLE_EQ(enc.problem.coupling(1, 2), M / 4);
  EXPECT_DOUBLE_EQ(enc.problem.coupling(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(enc.problem.field(0), -1.0 + M / 4);
  EXPECT_DOUBLE_EQ(enc.problem.field(1), -2.5 + M / 2);
  EXPECT_DOUBLE_EQ(enc.problem.offset(), -4.5 + M / 2);
}

TEST(Encoding, EnergyEqualsPenalizedObjectiveForEverySubset) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testing_support::random_graph(rng, 2 + rng() % 8, 0.4);
    const double M = default_penalty(g);
    const auto enc = encode_mwis(g, M);
    for (std::uint32_t mask = 0; mask < (1u << g.size()); ++mask) {
      const auto s = mask_to_set(mask, g.size());
      const double e = ising_energy(enc.problem, encode_set(s, enc.map));
      ASSERT_NEAR(e, qubo_value(g, s, M), 1e-9);
      if (is_independent(g, s)) {
        ASSERT_NEAR(e, -total_weight(g, s), 1e-9);
      }
    }
  }
}

TEST(Encoding, GroundStateDecodesToTheMwis) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = testing_support::random_graph(rng, 2 + rng() % 10, 0.35);
    const auto enc = encode_mwis(g);
    const auto gs = ground_state_exhaustive(enc.problem);
    const auto set = decode_spins(gs.spins, enc.map);
    ASSERT_TRUE(is_independent(g, set));
    ASSERT_NEAR(total_weight(g, set), testing_support::brute_force_mwis_weight(g), 1e-9);
    ASSERT_NEAR(gs.energy, -testing_support::brute_force_mwis_weight(g), 1e-9);
  }
}

TEST(Encoding, RejectsBadPenaltyAndWeights) {
  const WeightedGraph g({2.0, 5.0}, {{0, 1}});
  EXPECT_THROW(encode_mwis(g, 5.0), InputError);
  EXPECT_THROW(encode_mwis(g, 1.0), InputError);
  EXPECT_THROW(encode_mwis(WeightedGraph({1.0, -1.0})), InputError);
}

TEST(Encoding, PositivePartKeepsOriginalIndices) {
  const WeightedGraph g({-1.0, 3.0, 0.0, 2.0}, {{0, 1}, {1, 3}});
  const auto enc = encode_mwis_positive_part(g);
  EXPECT_EQ(enc.problem.size(), 2u);
  EXPECT_EQ(enc.map.spin_to_vertex, (std::vector<Vertex>{1, 3}));
  const auto gs = ground_state_exhaustive(enc.problem);
  EXPECT_EQ(decode_spins(gs.spins, enc.map), (VertexSet{1}));
}

TEST(Encoding, SetRoundTrip) {
  const WeightedGraph g({1, 1, 1, 1});
  const auto enc = encode_mwis(g);
  const VertexSet s{0, 2, 3};
  EXPECT_EQ(decode_spins(encode_set(s, enc.map), enc.map), s);
}

TEST(Repair, DropsLighterEndpoint) {
  const WeightedGraph g({3.0, 1.0, 2.0}, {{0, 1}, {1, 2}});
  EXPECT_EQ(repair_independent(g, {0, 1, 2}), (VertexSet{0, 2}));
  const WeightedGraph tie({1.0, 1.0}, {{0, 1}});
  EXPECT_EQ(repair_independent(tie, {0, 1}), (VertexSet{0}));
}

TEST(Repair, AlwaysIndependent) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing_support::random_graph(rng, 10, 0.5);
    const auto s = repair_independent(g, mask_to_set(static_cast<std::uint32_t>(rng() & 1023u), 10));
    EXPECT_TRUE(is_independent(g, s));
  }
}

TEST(Schedule, EndpointsAndDerivatives) {
  for (auto shape : {ScheduleShape::linear, ScheduleShape::smooth}) {
    Schedule s{2.0, shape, 1.0};
    EXPECT_NEAR(schedule_eval(s, 0.0).driver, 1.0, 1e-15);
    EXPECT_NEAR(schedule_eval(s, 0.0).target, 0.0, 1e-15);
    EXPECT_NEAR(schedule_eval(s, 2.0).driver, 0.0, 1e-15);
    EXPECT_NEAR(schedule_eval(s, 2.0).target, 1.0, 1e-15);
    // Finite-difference check of the rate.
    const double t = 0.7;
    const double h = 1e-6;
    const auto rate = schedule_rate(s, t);
    EXPECT_NEAR(rate.target, (schedule_eval(s, t + h).target - schedule_eval(s, t - h).target) / (2 * h), 1e-6);
    EXPECT_NEAR(rate.driver, (schedule_eval(s, t + h).driver - schedule_eval(s, t - h).driver) / (2 * h), 1e-6);
    EXPECT_THROW(schedule_eval(s, 2.5), InputError);
  }
  EXPECT_EQ(schedule_shape_from_string(to_string(ScheduleShape::smooth)), ScheduleShape::smooth);
}

TEST(IsingIo, JsonRoundTrip) {
  IsingProblem p({0.5, -1.0, 2.0}, {{0, 2, 1.25}, {1, 2, -0.5}}, 3.0);
  EXPECT_EQ(ising_from_json(to_json(p)), p);
}
