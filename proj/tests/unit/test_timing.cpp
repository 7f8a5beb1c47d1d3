#include <gtest/gtest.h>

#include <vector>

#include "qamht/errors.hpp"
#include "qamht/timing.hpp"

using namespace qamht;

TEST(Timing, ActiveResetParallelReadout) {
  TimingModel m;
  m.n_qubits = 8;
  m.t_anneal = 50e-6;
  m.shots = 1000;
  const auto e = total_runtime(m);
  EXPECT_DOUBLE_EQ(e.per_shot.readout, 1e-6);
  EXPECT_DOUBLE_EQ(e.per_shot.reset, 1e-6 + 100e-9);
  EXPECT_DOUBLE_EQ(e.per_shot.anneal, 50e-6);
  EXPECT_NEAR(e.total, 1000 * (50e-6 + 2e-6 + 100e-9), 1e-15);
  EXPECT_EQ(e.dominant, Phase::anneal);
}

TEST(Timing, SerialReadoutScalesWithQubits) {
  TimingModel m;
  m.parallel_readout = false;
  m.n_qubits = 12;
  EXPECT_DOUBLE_EQ(readout_time(m), 12e-6);
  EXPECT_DOUBLE_EQ(per_shot_time(m).reset, 12e-6 + 100e-9);
}

TEST(Timing, PassiveResetDominates) {
  TimingModel m;
  m.reset_mode = ResetMode::passive;
  m.shots = 10;
  const auto e = total_runtime(m);
  EXPECT_DOUBLE_EQ(e.per_shot.reset, 5e-3);
  EXPECT_EQ(e.dominant, Phase::reset);
  EXPECT_NEAR(e.dominant_share, 5e-3 / (5e-3 + 50e-6 + 1e-6), 1e-12);
  EXPECT_NEAR(e.total, 10 * (5e-3 + 50e-6 + 1e-6), 1e-15);
}

TEST(Timing, TotalIsLinearInShots) {
  TimingModel m;
  m.shots = 1;
  const double one = total_runtime(m).total;
  m.shots = 250;
  EXPECT_NEAR(total_runtime(m).total, 250 * one, 1e-15);
}

TEST(Timing, Validation) {
  TimingModel m;
  m.t_anneal = 0.0;
  EXPECT_THROW(total_runtime(m), InputError);
  m = TimingModel{};
  m.shots = 0;
  EXPECT_THROW(m.validate(), InputError);
  EXPECT_THROW(reset_mode_from_string("slow"), InputError);
}

TEST(Histogram, CountsEveryValueOnce) {
  const std::vector<double> v{0.0, 0.1, 0.25, 0.5, 0.5, 0.99, 1.0};
  const auto h = runtime_histogram(v, 4);
  ASSERT_EQ(h.edges.size(), 5u);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1, 2, 2}));
  EXPECT_DOUBLE_EQ(h.edges.front(), 0.0);
  EXPECT_DOUBLE_EQ(h.edges.back(), 1.0);
}

TEST(Histogram, EqualValuesGiveOneBin) {
  const std::vector<double> v(5, 0.3);
  const auto h = runtime_histogram(v, 10);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{5}));
  EXPECT_THROW(runtime_histogram(std::vector<double>{}, 3), InputError);
}

TEST(Histogram, FromModelsAndCsv) {
  std::vector<TimingModel> models(6);
  for (std::size_t i = 0; i < models.size(); ++i) models[i].n_qubits = i + 2;
  for (auto& m : models) m.parallel_readout = false;
  const auto h = runtime_histogram(models, 3);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, 6u);
  const auto csv = histogram_csv(h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_low_s,bin_high_s,count");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(TimingIo, JsonRoundTrip) {
  TimingModel m;
  m.reset_mode = ResetMode::passive;
  m.parallel_readout = false;
  m.n_qubits = 7;
  m.shots = 42;
  EXPECT_EQ(to_json(timing_from_json(to_json(m))), to_json(m));
}
