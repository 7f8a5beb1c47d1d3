#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "qamht/errors.hpp"
#include "qamht/kalman.hpp"
#include "qamht/scenario.hpp"
#include "qamht/tracker.hpp"

using namespace qamht;

namespace {

Measurement meas(std::size_t scan, std::size_t id, double x, double y) { return {scan, id, x, y, -1}; }

bool pairwise_conflict_free(const std::vector<TrackHypothesis>& hyps) {
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (const auto& h : hyps) {
    for (const auto& e : h.history) {
      if (e.kind == EntryKind::missed) continue;
      if (!used.insert({e.scan, e.measurement}).second) return false;
    }
  }
  return true;
}

Scenario scenario_with(std::size_t targets, double lambda_c, std::uint64_t seed) {
  auto c = default_scenario_config(targets);
  c.lambda_c = lambda_c;
  c.seed = seed;
  return generate_scenario(c);
}

}  // namespace

// ---------------------------------------------------------------- Kalman

TEST(Kalman, PredictWithoutProcessNoise) {
  KalmanState s;
  s.x << 0, 0, 1, 2;
  const auto p = kalman_predict(s, 1.0, 0.0);
  EXPECT_EQ(p.x, Eigen::Vector4d(1, 2, 1, 2));
  Eigen::Matrix4d expected;
  expected << 2, 0, 1, 0,
              0, 2, 0, 1,
              1, 0, 1, 0,
              0, 1, 0, 1;
  EXPECT_LT((p.P - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kalman, ProcessNoiseIsWhiteAcceleration) {
  KalmanState s;
  const double dt = 2.0, q = 0.5;
  const auto p = kalman_predict(s, dt, q);
  const auto base = kalman_predict(s, dt, 0.0);
  const Eigen::Matrix4d qm = p.P - base.P;
  EXPECT_NEAR(qm(0, 0), q * std::pow(dt, 4) / 4, 1e-14);
  EXPECT_NEAR(qm(0, 2), q * std::pow(dt, 3) / 2, 1e-14);
  EXPECT_NEAR(qm(2, 2), q * dt * dt, 1e-14);
  EXPECT_EQ(qm(0, 1), 0.0);
  EXPECT_EQ(qm(0, 3), 0.0);
}

TEST(Kalman, UpdateExample) {
  KalmanState s;
  s.x << 10, 20, 1, -1;
  s.P = Eigen::Vector4d(4, 4, 1, 1).asDiagonal();
  const auto up = kalman_update(s, Eigen::Vector2d(12, 22), 2.0);
  // S = 8 I, K = diag(0.5, 0.5) on position.
  EXPECT_NEAR(up.state.x(0), 11.0, 1e-12);
  EXPECT_NEAR(up.state.x(1), 21.0, 1e-12);
  EXPECT_NEAR(up.state.x(2), 1.0, 1e-12);
  EXPECT_NEAR(up.state.P(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(up.state.P(2, 2), 1.0, 1e-12);
  EXPECT_NEAR(up.innovation.distance2, 1.0, 1e-12);
  EXPECT_NEAR(up.innovation.log_likelihood, -0.5 - std::log(2 * M_PI) - 0.5 * std::log(64.0), 1e-12);
}

TEST(Kalman, GateThreshold) {
  KalmanState s;
  s.P = Eigen::Matrix4d::Zero();
  s.P.diagonal() << 1e-12, 1e-12, 1, 1;
  // With sigma = 1 and negligible prior, distance2 = |nu|^2.
  auto d2 = [&](double dx) { return kalman_innovation(s, Eigen::Vector2d(dx, 0), 1.0); };
  EXPECT_TRUE(gate(d2(std::sqrt(9.20))));
  EXPECT_FALSE(gate(d2(std::sqrt(9.22))));
  EXPECT_TRUE(gate(d2(3.5), 12.25 + 1e-6));
}

TEST(Kalman, RejectsInvalidCovariance) {
  KalmanState s;
  s.P(0, 0) = -1.0;
  EXPECT_THROW(kalman_predict(s, 1.0, 0.0), NumericalError);
  EXPECT_THROW(kalman_update(s, Eigen::Vector2d(0, 0), 1.0), NumericalError);
  s.P = Eigen::Matrix4d::Identity();
  s.P(0, 1) = 0.5;  // asymmetric
  EXPECT_FALSE(is_spd(s.P));
}

TEST(Kalman, JosephFormMatchesStandardFormAndStaysSpd) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  KalmanState s;
  s.P *= 100.0;
  for (int step = 0; step < 500; ++step) {
    s = kalman_predict(s, 1.0, 0.01);
    const Eigen::Vector2d z(g(rng) * 3 + step, g(rng) * 3);
    const auto up = kalman_update(s, z, 3.0);
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = h(1, 1) = 1;
    const Eigen::Matrix<double, 4, 2> k = s.P * h.transpose() * up.innovation.S.inverse();
    const Eigen::Matrix4d simple = (Eigen::Matrix4d::Identity() - k * h) * s.P;
    ASSERT_LT((simple - up.state.P).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, s.P.norm()));
    ASSERT_TRUE(is_spd(up.state.P));
    s = up.state;
  }
}

// ---------------------------------------------------------------- Scenario

TEST(Scenario, DeterministicAndStreamsSeparated) {
  const auto a = scenario_with(2, 1e-5, 7);
  const auto b = scenario_with(2, 1e-5, 7);
  EXPECT_EQ(to_json(a), to_json(b));
  // More clutter leaves the target detections unchanged.
  const auto c = scenario_with(2, 5e-5, 7);
  for (std::size_t k = 0; k < a.scans.size(); ++k) {
    std::vector<std::tuple<int, double, double>> ta, tc;
    for (const auto& m : a.scans[k]) if (m.source >= 0) ta.emplace_back(m.source, m.x, m.y);
    for (const auto& m : c.scans[k]) if (m.source >= 0) tc.emplace_back(m.source, m.x, m.y);
    std::sort(ta.begin(), ta.end());
    std::sort(tc.begin(), tc.end());
    EXPECT_EQ(ta, tc);
  }
}

TEST(Scenario, DetectionAndClutterRates) {
  auto cfg = default_scenario_config(3);
  cfg.scans = 400;
  cfg.targets = default_targets(3, cfg.region, 20, 1.0);
  for (auto& t : cfg.targets) t.vx = t.vy = 0.0;
  cfg.lambda_c = 2e-5;  // 20 per scan
  const auto s = generate_scenario(cfg);
  double detections = 0, clutter = 0;
  for (const auto& scan : s.scans) {
    for (std::size_t i = 0; i < scan.size(); ++i) {
      EXPECT_EQ(scan[i].id, i);
      (scan[i].source >= 0 ? detections : clutter) += 1;
    }
  }
  EXPECT_NEAR(detections / (3 * 400.0), 0.9, 0.03);
  EXPECT_NEAR(clutter / 400.0, 20.0, 1.0);
}

TEST(Scenario, TruthIsConstantVelocity) {
  const auto s = scenario_with(2, 0.0, 1);
  for (const auto& tr : s.truth) {
    for (std::size_t k = 1; k < tr.size(); ++k) {
      EXPECT_NEAR(tr[k].x - tr[k - 1].x, tr[0].vx, 1e-9);
      EXPECT_NEAR(tr[k].y - tr[k - 1].y, tr[0].vy, 1e-9);
    }
  }
}

TEST(Scenario, JsonRoundTripAndValidation) {
  const auto s = scenario_with(2, 1e-5, 3);
  EXPECT_EQ(to_json(scenario_from_json(to_json(s))), to_json(s));
  auto cfg = default_scenario_config(1);
  cfg.p_detect = 0.0;
  EXPECT_THROW(generate_scenario(cfg), InputError);
  cfg = default_scenario_config(1);
  cfg.region.x_max = cfg.region.x_min;
  EXPECT_THROW(generate_scenario(cfg), InputError);
}

// ---------------------------------------------------------------- Hypotheses

TEST(Extend, BirthsOnAnEmptyState) {
  TrackerConfig cfg;
  cfg.clutter_density = 1e-5;
  TrackerState st;
  extend_hypotheses(st, {meas(0, 0, 100, 100), meas(0, 1, 500, 500)}, 0, cfg);
  ASSERT_EQ(st.live.size(), 2u);
  EXPECT_EQ(st.live[0].family, 0u);
  EXPECT_EQ(st.live[1].family, 1u);
  EXPECT_NEAR(st.live[0].llr, std::log(1e-6 / 1e-5), 1e-12);
  EXPECT_EQ(st.live[0].history[0].kind, EntryKind::birth);
  EXPECT_EQ(st.live[1].state.x(0), 500.0);
}

TEST(Extend, MissGatedAndBirthChildren) {
  TrackerConfig cfg;
  cfg.clutter_density = 1e-5;
  TrackerState st;
  extend_hypotheses(st, {meas(0, 0, 100, 100), meas(0, 1, 500, 500)}, 0, cfg);
  extend_hypotheses(st, {meas(1, 0, 104, 101), meas(1, 1, 900, 100)}, 1, cfg);
  // family 0: miss + one gated child; family 1: miss only; two births.
  ASSERT_EQ(st.live.size(), 5u);
  std::size_t assigned = 0, missed = 0, births = 0;
  for (const auto& h : st.live) {
    switch (h.history.back().kind) {
      case EntryKind::assigned: ++assigned; break;
      case EntryKind::missed: ++missed; break;
      case EntryKind::birth: ++births; break;
    }
    EXPECT_NEAR(h.llr, score_hypothesis(h, cfg), 1e-9);
  }
  EXPECT_EQ(assigned, 1u);
  EXPECT_EQ(missed, 2u);
  EXPECT_EQ(births, 2u);
  for (const auto& h : st.live) {
    if (h.history.back().kind == EntryKind::missed) {
      EXPECT_NEAR(h.llr, std::log(1e-6 / 1e-5) + std::log(0.1), 1e-12);
    }
  }
}

TEST(Extend, NoMissBranchAtUnitDetectionProbability) {
  TrackerConfig cfg;
  cfg.p_detect = 1.0;
  cfg.clutter_density = 1e-5;
  TrackerState st;
  extend_hypotheses(st, {meas(0, 0, 100, 100)}, 0, cfg);
  extend_hypotheses(st, {meas(1, 0, 101, 100)}, 1, cfg);
  EXPECT_EQ(st.live.size(), 2u);  // continuation + birth
}

TEST(Extend, CapacityLimit) {
  TrackerConfig cfg;
  cfg.clutter_density = 1e-5;
  cfg.max_hypotheses = 3;
  TrackerState st;
  EXPECT_THROW(extend_hypotheses(st, {meas(0, 0, 1, 1), meas(0, 1, 2, 2), meas(0, 2, 3, 3), meas(0, 3, 4, 4)}, 0, cfg),
               CapacityError);
}

TEST(Scoring, SumOfTerms) {
  TrackerConfig cfg;
  cfg.clutter_density = 1e-4;
  TrackHypothesis h;
  h.history = {{0, EntryKind::birth, 0, 0.0, 0, 0},
               {1, EntryKind::assigned, 0, -7.5, 0, 0},
               {2, EntryKind::missed, 0, 0.0, 0, 0}};
  const double expected = std::log(1e-6 / 1e-4) + (std::log(0.9) - 7.5 - std::log(1e-4)) + std::log(0.1);
  EXPECT_NEAR(score_hypothesis(h, cfg), expected, 1e-12);
  EXPECT_EQ(h.assignments(), 2u);
}

TEST(ConflictGraph, EdgesAndWeights) {
  std::vector<TrackHypothesis> hyps(3);
  hyps[0].llr = 2.0;
  hyps[0].history = {{0, EntryKind::birth, 0, 0, 0, 0}, {1, EntryKind::assigned, 1, 0, 0, 0}};
  hyps[1].llr = -1.0;
  hyps[1].history = {{1, EntryKind::birth, 1, 0, 0, 0}};
  hyps[2].llr = 5.0;
  hyps[2].history = {{0, EntryKind::birth, 1, 0, 0, 0}, {1, EntryKind::missed, 0, 0, 0, 0}};
  const auto shift = build_conflict_graph(hyps, WeightPolicy::shift);
  EXPECT_EQ(shift.graph.size(), 3u);
  EXPECT_EQ(shift.graph.edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_NEAR(shift.graph.weight(1), 1e-6, 1e-15);
  EXPECT_NEAR(shift.graph.weight(2), 6.0 + 1e-6, 1e-12);
  const auto drop = build_conflict_graph(hyps, WeightPolicy::drop_nonpositive);
  EXPECT_EQ(drop.members, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(drop.graph.edges().empty());
  EXPECT_EQ(drop.graph.weight(1), 5.0);
}

TEST(Prune, ContractOnRandomScenarios) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto sc = scenario_with(2, 2e-5, seed);
    auto cfg = tracker_config_for(sc.config);
    TrackerState st;
    for (std::size_t k = 0; k < 8; ++k) {
      extend_hypotheses(st, sc.scans[k], k, cfg);
      const std::size_t before = st.live.size();
      const auto out = prune(st, cfg, PruneBackend::exact);
      ASSERT_TRUE(pairwise_conflict_free(st.live)) << "seed " << seed << " scan " << k;
      EXPECT_EQ(out.hypotheses, before);
      EXPECT_EQ(out.survivors + out.tentative, st.live.size());
      EXPECT_EQ(out.survivors + out.tentative + out.deleted, before);
      EXPECT_EQ(out.selected.size(), out.survivors);
      EXPECT_TRUE(is_independent(out.graph.graph, out.selected));
      for (const auto& h : st.live) EXPECT_GE(h.llr, cfg.delete_threshold);
      std::set<std::size_t> families;
      for (const auto& h : st.live) EXPECT_TRUE(families.insert(h.family).second);
    }
  }
}

TEST(Prune, BackendTimeModelSumsComponents) {
  const auto sc = scenario_with(2, 2e-5, 1);
  auto cfg = tracker_config_for(sc.config);
  TrackerState st;
  PruneOutcome out;
  for (std::size_t k = 0; k < 4; ++k) {
    extend_hypotheses(st, sc.scans[k], k, cfg);
    out = prune(st, cfg, PruneBackend::exact);
  }
  double expected = 0.0;
  for (const auto& c : connected_components(out.graph.graph)) {
    if (c.size() < 2) continue;
    TimingModel tm = cfg.timing;
    tm.n_qubits = c.size();
    tm.t_anneal = cfg.anneal.schedule.t_final;
    tm.shots = cfg.anneal.shots;
    expected += total_runtime(tm).total;
  }
  EXPECT_NEAR(out.backend_time_model_s, expected, 1e-15);
}

TEST(Prune, QuantumBackendsAgreeOnSmallGraphs) {
  std::mt19937_64 rng(5);
  TrackerConfig cfg;
  cfg.anneal.shots = 200;
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<double> w(5);
    for (auto& x : w) x = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    const WeightedGraph g(w, {{0, 1}, {1, 2}, {3, 4}});
    bool quantum = false;
    const auto exact = solve_mwis(g, cfg, PruneBackend::exact);
    EXPECT_EQ(solve_mwis(g, cfg, PruneBackend::dynamics, &quantum), exact);
    EXPECT_TRUE(quantum);
    EXPECT_EQ(solve_mwis(g, cfg, PruneBackend::sqa), exact);
  }
  TrackerConfig small = cfg;
  small.anneal.max_qubits = 2;
  EXPECT_THROW(solve_mwis(WeightedGraph({1, 1, 1}, {{0, 1}, {1, 2}}), small, PruneBackend::dynamics), CapacityError);
}

// ---------------------------------------------------------------- Runs

TEST(Tracker, NoiseFreeSingleTarget) {
  auto c = default_scenario_config(1);
  c.sigma_m = 0.0;
  c.p_detect = 1.0;
  c.lambda_c = 0.0;
  const auto sc = generate_scenario(c);
  const auto rep = run_tracker(sc, tracker_config_for(c), {});
  for (const auto& s : rep.scans) EXPECT_EQ(s.prune.survivors, 1u) << "scan " << s.scan;
  ASSERT_EQ(rep.tracks.size(), 1u);
  EXPECT_EQ(rep.tracks[0].assignments, c.scans);
  for (const auto& p : rep.tracks[0].points) {
    EXPECT_NEAR(p.x, sc.truth[0][p.scan].x, 1e-2);
    EXPECT_NEAR(p.y, sc.truth[0][p.scan].y, 1e-2);
  }
}

TEST(Tracker, TwoTargetsRecovered) {
  const auto sc = scenario_with(2, 1e-5, 1);
  const auto rep = run_tracker(sc, tracker_config_for(sc.config), {});
  const auto err = track_error(rep.tracks, sc.truth, 25.0);
  for (const auto& t : err.targets) {
    EXPECT_EQ(t.fragments, 1u);
    EXPECT_LT(t.rms, 15.0);
    EXPECT_GT(t.coverage, 0.9);
  }
  EXPECT_EQ(err.false_tracks, 0u);
}

TEST(Tracker, MoreClutterNeverKeepsMoreSurvivors) {
  std::vector<std::size_t> totals;
  std::vector<std::vector<std::size_t>> per_scan;
  for (double lc : {1e-5, 2e-5, 5e-5}) {
    const auto sc = scenario_with(2, lc, 1);
    const auto rep = run_tracker(sc, tracker_config_for(sc.config), {});
    std::vector<std::size_t> s;
    for (const auto& r : rep.scans) s.push_back(r.prune.survivors);
    totals.push_back(std::accumulate(s.begin(), s.end(), std::size_t{0}));
    per_scan.push_back(s);
  }
  for (std::size_t i = 1; i < per_scan.size(); ++i) {
    for (std::size_t k = 0; k < per_scan[i].size(); ++k) EXPECT_LE(per_scan[i][k], per_scan[i - 1][k]) << k;
  }
  EXPECT_LT(totals.back(), totals.front());
}

TEST(Tracker, SingleStepUsesTheBackendOnceAtThePeak) {
  const auto sc = scenario_with(2, 1e-5, 1);
  const auto cfg = tracker_config_for(sc.config);
  const auto dry = run_tracker(sc, cfg, {});
  std::size_t peak = 0, best = 0;
  for (const auto& s : dry.scans) {
    if (s.prune.hypotheses > best) {
      best = s.prune.hypotheses;
      peak = s.scan;
    }
  }
  TrackerRun run;
  run.mode = TrackerMode::single_step;
  run.backend = PruneBackend::sqa;
  const auto rep = run_tracker(sc, cfg, run);
  ASSERT_TRUE(rep.step_scan.has_value());
  EXPECT_EQ(*rep.step_scan, peak);
  std::size_t invoked = 0;
  for (const auto& s : rep.scans) {
    if (s.backend == "sqa") {
      ++invoked;
      EXPECT_EQ(s.scan, peak);
    } else {
      EXPECT_EQ(s.backend, "exact");
    }
  }
  EXPECT_EQ(invoked, 1u);
  run.step_scan = 99;
  EXPECT_THROW(run_tracker(sc, cfg, run), InputError);
}

TEST(Tracker, NoPruningGrowsHypotheses) {
  const auto sc = scenario_with(2, 1e-5, 1);
  TrackerRun run;
  run.backend = PruneBackend::none;
  run.max_scans = 6;
  const auto rep = run_tracker(sc, tracker_config_for(sc.config), run);
  ASSERT_EQ(rep.scans.size(), 6u);
  for (std::size_t k = 1; k < 6; ++k) EXPECT_GT(rep.scans[k].prune.hypotheses, rep.scans[k - 1].prune.hypotheses);
  EXPECT_TRUE(rep.tracks.empty());
}

TEST(Tracker, DeterministicReports) {
  const auto sc = scenario_with(2, 2e-5, 4);
  const auto cfg = tracker_config_for(sc.config);
  EXPECT_EQ(to_json(run_tracker(sc, cfg, {})), to_json(run_tracker(sc, cfg, {})));
}

TEST(Tracker, ReportJsonAndCsv) {
  const auto sc = scenario_with(1, 1e-5, 2);
  const auto rep = run_tracker(sc, tracker_config_for(sc.config), {});
  const auto j = to_json(rep);
  EXPECT_EQ(to_json(track_report_from_json(j)), j);
  const auto csv = scan_series_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scan,n_hypotheses,n_survivors,backend_time_model_s");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rep.scans.size() + 1);
}

TEST(Tracker, ConfigJsonRoundTrip) {
  TrackerConfig c;
  c.confirm_threshold = 4.0;
  c.weight_policy = WeightPolicy::drop_nonpositive;
  EXPECT_EQ(to_json(tracker_config_from_json(to_json(c))), to_json(c));
  EXPECT_THROW(prune_backend_from_string("quantum"), InputError);
  c.delete_threshold = 10.0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(TrackError, MatchingExamples) {
  std::vector<std::vector<TargetState>> truth(2);
  for (std::size_t k = 0; k < 4; ++k) {
    truth[0].push_back({double(k), 0.0, 1.0, 0.0});
    truth[1].push_back({double(k), 100.0, 1.0, 0.0});
  }
  auto track = [](double y, std::size_t from, std::size_t to) {
    Track t;
    for (std::size_t k = from; k < to; ++k) t.points.push_back({k, double(k), y, true});
    return t;
  };
  // Target 0 split in two fragments offset by 3 and 4; target 1 missed; one far track.
  const auto err = track_error({track(3.0, 0, 2), track(4.0, 2, 4), track(50.0, 0, 4)}, truth, 10.0);
  EXPECT_EQ(err.targets[0].fragments, 2u);
  EXPECT_NEAR(err.targets[0].rms, std::sqrt((2 * 9.0 + 2 * 16.0) / 4), 1e-12);
  EXPECT_DOUBLE_EQ(err.targets[0].coverage, 1.0);
  EXPECT_EQ(err.targets[1].fragments, 0u);
  EXPECT_TRUE(std::isnan(err.targets[1].rms));
  EXPECT_EQ(err.targets[1].coverage, 0.0);
  EXPECT_EQ(err.false_tracks, 1u);
}
