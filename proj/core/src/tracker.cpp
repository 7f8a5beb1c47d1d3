#include "qamht/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "qamht/errors.hpp"
#include "qamht/io.hpp"

namespace qamht {

namespace {

constexpr double kClutterFloor = 1e-12;
constexpr double kSigmaFloor = 1e-3;
constexpr double kShiftEpsilon = 1e-6;

std::uint64_t key_of(std::size_t scan, std::size_t measurement) {
  return (static_cast<std::uint64_t>(scan) << 32) ^ static_cast<std::uint64_t>(measurement);
}

template <class F>
void for_each_key(const TrackHypothesis& h, F&& f) {
  for (const auto& e : h.history) {
    if (e.kind != EntryKind::missed) f(key_of(e.scan, e.measurement));
  }
}

}  // namespace

std::size_t TrackHypothesis::assignments() const {
  return static_cast<std::size_t>(std::count_if(history.begin(), history.end(),
                                                [](const HistoryEntry& e) { return e.kind != EntryKind::missed; }));
}

void TrackerConfig::validate() const {
  if (!(p_detect > 0.0 && p_detect <= 1.0)) throw InputError("tracker config: p_detect must lie in (0, 1]");
  if (!(birth_density > 0.0)) throw InputError("tracker config: birth_density must be positive");
  if (!(dt > 0.0)) throw InputError("tracker config: dt must be positive");
  if (!(gate_threshold > 0.0)) throw InputError("tracker config: gate_threshold must be positive");
  if (!(birth_velocity_sigma > 0.0)) throw InputError("tracker config: birth_velocity_sigma must be positive");
  if (!(delete_threshold <= confirm_threshold)) {
    throw InputError("tracker config: delete_threshold must not exceed confirm_threshold");
  }
  if (!std::isfinite(sigma_m) || sigma_m < 0.0) throw InputError("tracker config: sigma_m must be >= 0");
  anneal.validate();
  qmc.validate();
}

double TrackerConfig::effective_clutter() const { return std::max(clutter_density, kClutterFloor); }
double TrackerConfig::effective_sigma() const { return std::max(sigma_m, kSigmaFloor); }
double TrackerConfig::effective_process_noise() const {
  if (process_noise >= 0.0) return process_noise;
  const double a = 0.1 * effective_sigma() / (dt * dt);
  return a * a;
}

TrackerConfig tracker_config_for(const ScenarioConfig& s) {
  TrackerConfig c;
  c.p_detect = s.p_detect;
  c.clutter_density = s.lambda_c;
  c.sigma_m = s.sigma_m;
  c.dt = s.dt;
  return c;
}

double score_hypothesis(const TrackHypothesis& h, const TrackerConfig& cfg) {
  const double log_clutter = std::log(cfg.effective_clutter());
  double llr = 0.0;
  for (const auto& e : h.history) {
    switch (e.kind) {
      case EntryKind::birth: llr += std::log(cfg.birth_density) - log_clutter; break;
      case EntryKind::assigned: llr += std::log(cfg.p_detect) + e.log_likelihood - log_clutter; break;
      case EntryKind::missed: llr += std::log1p(-cfg.p_detect); break;
    }
  }
  return llr;
}

void extend_hypotheses(TrackerState& st, const std::vector<Measurement>& scan, std::size_t scan_index,
                       const TrackerConfig& cfg) {
  const double sigma = cfg.effective_sigma();
  const double q = cfg.effective_process_noise();
  const double log_clutter = std::log(cfg.effective_clutter());
  const double miss_score = cfg.p_detect < 1.0 ? std::log1p(-cfg.p_detect) : 0.0;
  std::vector<TrackHypothesis> next;
  auto push = [&](TrackHypothesis&& h) {
    if (next.size() >= cfg.max_hypotheses) {
      throw CapacityError("hypothesis count exceeds max_hypotheses = " + std::to_string(cfg.max_hypotheses) +
                          " at scan " + std::to_string(scan_index));
    }
    next.push_back(std::move(h));
  };
  for (const auto& h : st.live) {
    const KalmanState pred = kalman_predict(h.state, cfg.dt, q);
    if (cfg.p_detect < 1.0) {
      TrackHypothesis child = h;
      child.id = st.next_id++;
      child.state = pred;
      child.llr = h.llr + miss_score;
      child.history.push_back({scan_index, EntryKind::missed, 0, 0.0, pred.x(0), pred.x(1)});
      push(std::move(child));
    }
    for (const auto& m : scan) {
      const Eigen::Vector2d z(m.x, m.y);
      const Innovation in = kalman_innovation(pred, z, sigma);
      if (!gate(in, cfg.gate_threshold)) continue;
      const KalmanUpdate up = kalman_update(pred, z, sigma);
      TrackHypothesis child = h;
      child.id = st.next_id++;
      child.state = up.state;
      child.llr = h.llr + std::log(cfg.p_detect) + in.log_likelihood - log_clutter;
      child.history.push_back({scan_index, EntryKind::assigned, m.id, in.log_likelihood, up.state.x(0), up.state.x(1)});
      push(std::move(child));
    }
  }
  const double birth_score = std::log(cfg.birth_density) - log_clutter;
  for (const auto& m : scan) {
    TrackHypothesis b;
    b.id = st.next_id++;
    b.family = st.next_family++;
    b.state.x << m.x, m.y, 0.0, 0.0;
    b.state.P = Eigen::Vector4d(sigma * sigma, sigma * sigma, cfg.birth_velocity_sigma * cfg.birth_velocity_sigma,
                                cfg.birth_velocity_sigma * cfg.birth_velocity_sigma)
                    .asDiagonal();
    b.llr = birth_score;
    b.history.push_back({scan_index, EntryKind::birth, m.id, 0.0, m.x, m.y});
    push(std::move(b));
  }
  st.live = std::move(next);
}

ConflictGraph build_conflict_graph(const std::vector<TrackHypothesis>& hyps, WeightPolicy policy) {
  ConflictGraph cg;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (policy == WeightPolicy::drop_nonpositive && !(hyps[i].llr > 0.0)) continue;
    cg.members.push_back(i);
  }
  std::vector<double> weights;
  double lo = std::numeric_limits<double>::infinity();
  for (auto i : cg.members) lo = std::min(lo, hyps[i].llr);
  for (auto i : cg.members) {
    weights.push_back(policy == WeightPolicy::shift ? hyps[i].llr - lo + kShiftEpsilon : hyps[i].llr);
  }
  std::unordered_map<std::uint64_t, std::vector<Vertex>> users;
  for (Vertex v = 0; v < cg.members.size(); ++v) {
    for_each_key(hyps[cg.members[v]], [&](std::uint64_t k) { users[k].push_back(v); });
  }
  std::vector<Edge> edges;
  for (const auto& [key, vs] : users) {
    for (std::size_t a = 0; a < vs.size(); ++a) {
      for (std::size_t b = a + 1; b < vs.size(); ++b) edges.emplace_back(std::min(vs[a], vs[b]), std::max(vs[a], vs[b]));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  cg.graph = WeightedGraph(std::move(weights), std::move(edges));
  return cg;
}

VertexSet solve_mwis(const WeightedGraph& g, const TrackerConfig& cfg, PruneBackend backend, bool* quantum) {
  if (quantum) *quantum = false;
  if (g.empty()) return {};
  if (backend == PruneBackend::exact || backend == PruneBackend::none) return mwis_exact(g, cfg.exact).set;
  VertexSet out;
  for (const auto& comp : connected_components(g)) {
    if (comp.size() == 1) {
      out.push_back(comp[0]);
      continue;
    }
    const SubGraph sub = induced_subgraph(g, comp);
    AnnealResult r;
    if (backend == PruneBackend::dynamics) {
      if (comp.size() > cfg.anneal.max_qubits) {
        throw CapacityError("conflict component of " + std::to_string(comp.size()) +
                            " vertices exceeds the dynamics backend limit of " +
                            std::to_string(cfg.anneal.max_qubits) + "; use the sqa backend");
      }
      r = anneal(sub.graph, cfg.anneal);
    } else {
      if (comp.size() > cfg.qmc.max_spins) {
        throw CapacityError("conflict component of " + std::to_string(comp.size()) +
                            " vertices exceeds the sqa backend limit of " + std::to_string(cfg.qmc.max_spins) +
                            "; use the exact backend");
      }
      r = sqa_anneal(sub.graph, cfg.qmc, cfg.anneal.penalty_factor);
    }
    if (quantum) *quantum = true;
    for (auto v : sub.lift(r.best_set)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PruneOutcome prune(TrackerState& st, const TrackerConfig& cfg, PruneBackend backend) {
  PruneOutcome out;
  out.hypotheses = st.live.size();
  if (backend == PruneBackend::none) {
    out.survivors = st.live.size();
    return out;
  }
  std::vector<TrackHypothesis> kept;
  std::vector<TrackHypothesis> candidates;
  std::vector<TrackHypothesis> tentative;
  for (auto& h : st.live) {
    if (h.llr < cfg.delete_threshold) {
      ++out.deleted;
    } else if (h.confirmed || h.llr > cfg.confirm_threshold) {
      candidates.push_back(std::move(h));
    } else {
      tentative.push_back(std::move(h));
    }
  }
  out.graph = build_conflict_graph(candidates, cfg.weight_policy);
  const WeightedGraph& g = out.graph.graph;
  out.candidates = g.size();
  out.edges = g.edges().size();
  const auto comps = connected_components(g);
  out.components = comps.size();
  TimingModel tm = cfg.timing;
  tm.t_anneal = cfg.anneal.schedule.t_final;
  tm.shots = cfg.anneal.shots;
  for (const auto& c : comps) {
    out.largest_component = std::max(out.largest_component, c.size());
    if (c.size() < 2) continue;
    tm.n_qubits = c.size();
    out.backend_time_model_s += total_runtime(tm).total;
  }
  out.selected = solve_mwis(g, cfg, backend, &out.quantum);
  out.selected_weight = total_weight(g, out.selected);

  std::unordered_set<std::uint64_t> used;
  std::vector<bool> chosen(candidates.size(), false);
  for (auto v : out.selected) chosen[out.graph.members[v]] = true;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!chosen[i]) {
      tentative.push_back(std::move(candidates[i]));
      continue;
    }
    candidates[i].confirmed = true;
    for_each_key(candidates[i], [&](std::uint64_t k) { used.insert(k); });
    kept.push_back(std::move(candidates[i]));
  }
  out.survivors = kept.size();
  std::stable_sort(tentative.begin(), tentative.end(), [](const TrackHypothesis& a, const TrackHypothesis& b) {
    return a.llr != b.llr ? a.llr > b.llr : a.id < b.id;
  });
  for (auto& h : tentative) {
    bool clash = false;
    for_each_key(h, [&](std::uint64_t k) { clash = clash || used.count(k) > 0; });
    if (clash) {
      ++out.deleted;
      continue;
    }
    for_each_key(h, [&](std::uint64_t k) { used.insert(k); });
    ++out.tentative;
    kept.push_back(std::move(h));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  st.live = std::move(kept);
  for (const auto& h : st.live) {
    if (st.family_last.size() <= h.family) st.family_last.resize(h.family + 1);
    st.family_last[h.family] = h;
  }
  return out;
}

Track make_track(const TrackHypothesis& h, bool alive) {
  Track t;
  t.family = h.family;
  t.assignments = h.assignments();
  t.llr = h.llr;
  t.alive = alive;
  std::size_t last = 0;
  for (std::size_t i = 0; i < h.history.size(); ++i) {
    if (h.history[i].kind != EntryKind::missed) last = i;
  }
  for (std::size_t i = 0; i <= last && i < h.history.size(); ++i) {
    const auto& e = h.history[i];
    t.points.push_back({e.scan, e.x, e.y, e.kind != EntryKind::missed});
  }
  return t;
}

namespace {

struct RunResult {
  std::vector<ScanRecord> scans;
  TrackerState state;
};

RunResult run_once(const Scenario& sc, const TrackerConfig& cfg, const TrackerRun& run, PruneBackend default_backend,
                   std::optional<std::size_t> quantum_scan) {
  RunResult r;
  const std::size_t total = run.max_scans == 0 ? sc.scans.size() : std::min(run.max_scans, sc.scans.size());
  for (std::size_t k = 0; k < total; ++k) {
    extend_hypotheses(r.state, sc.scans[k], k, cfg);
    const PruneBackend b = quantum_scan && *quantum_scan == k ? run.backend : default_backend;
    ScanRecord rec;
    rec.scan = k;
    rec.measurements = sc.scans[k].size();
    rec.backend = to_string(b);
    rec.prune = prune(r.state, cfg, b);
    r.scans.push_back(std::move(rec));
  }
  return r;
}

}  // namespace

TrackReport run_tracker(const Scenario& scenario, TrackerConfig cfg, const TrackerRun& run) {
  if (cfg.clutter_density < 0.0) cfg.clutter_density = scenario.config.lambda_c;
  cfg.validate();
  TrackReport rep;
  rep.mode = run.mode;
  rep.backend = run.backend;
  RunResult res;
  if (run.mode == TrackerMode::sequential || run.backend == PruneBackend::none) {
    res = run_once(scenario, cfg, run, run.backend, std::nullopt);
  } else {
    std::size_t k = 0;
    if (run.step_scan) {
      k = *run.step_scan;
      if (k >= scenario.scans.size()) throw InputError("single-step scan " + std::to_string(k) + " is out of range");
    } else {
      const RunResult dry = run_once(scenario, cfg, run, PruneBackend::exact, std::nullopt);
      std::size_t best = 0;
      for (const auto& s : dry.scans) {
        if (s.prune.hypotheses > best) {
          best = s.prune.hypotheses;
          k = s.scan;
        }
      }
    }
    rep.step_scan = k;
    res = run_once(scenario, cfg, run, PruneBackend::exact, k);
  }
  rep.scans = std::move(res.scans);
  if (run.backend == PruneBackend::none) return rep;
  std::unordered_set<std::size_t> alive;
  for (const auto& h : res.state.live) alive.insert(h.family);
  for (const auto& last : res.state.family_last) {
    if (!last || !last->confirmed || last->assignments() < cfg.min_track_assignments) continue;
    rep.tracks.push_back(make_track(*last, alive.count(last->family) > 0));
  }
  return rep;
}

TrackError track_error(const std::vector<Track>& tracks, const std::vector<std::vector<TargetState>>& truth,
                       double match_distance) {
  TrackError err;
  err.targets.resize(truth.size());
  std::vector<double> sq(truth.size(), 0.0);
  std::vector<std::size_t> npts(truth.size(), 0);
  std::vector<std::vector<bool>> covered(truth.size());
  for (std::size_t t = 0; t < truth.size(); ++t) {
    err.targets[t].target = t;
    covered[t].assign(truth[t].size(), false);
  }
  for (const auto& tr : tracks) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_t = truth.size();
    double best_sq = 0.0;
    std::size_t best_n = 0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
      double s = 0.0;
      std::size_t n = 0;
      for (const auto& p : tr.points) {
        if (p.scan >= truth[t].size()) continue;
        s += std::pow(p.x - truth[t][p.scan].x, 2) + std::pow(p.y - truth[t][p.scan].y, 2);
        ++n;
      }
      if (n == 0) continue;
      const double rms = std::sqrt(s / static_cast<double>(n));
      if (rms < best) {
        best = rms;
        best_t = t;
        best_sq = s;
        best_n = n;
      }
    }
    if (best_t == truth.size() || !(best < match_distance)) {
      ++err.false_tracks;
      continue;
    }
    ++err.targets[best_t].fragments;
    sq[best_t] += best_sq;
    npts[best_t] += best_n;
    for (const auto& p : tr.points) {
      if (p.scan < covered[best_t].size()) covered[best_t][p.scan] = true;
    }
  }
  for (std::size_t t = 0; t < truth.size(); ++t) {
    auto& e = err.targets[t];
    e.rms = npts[t] ? std::sqrt(sq[t] / static_cast<double>(npts[t])) : std::numeric_limits<double>::quiet_NaN();
    const auto hit = std::count(covered[t].begin(), covered[t].end(), true);
    e.coverage = covered[t].empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(covered[t].size());
  }
  return err;
}

const char* to_string(WeightPolicy p) { return p == WeightPolicy::shift ? "shift" : "drop-nonpositive"; }

const char* to_string(PruneBackend b) {
  switch (b) {
    case PruneBackend::exact: return "exact";
    case PruneBackend::dynamics: return "dynamics";
    case PruneBackend::sqa: return "sqa";
    case PruneBackend::none: return "none";
  }
  return "?";
}

const char* to_string(TrackerMode m) { return m == TrackerMode::sequential ? "sequential" : "single-step"; }

WeightPolicy weight_policy_from_string(const std::string& s) {
  if (s == "shift") return WeightPolicy::shift;
  if (s == "drop-nonpositive") return WeightPolicy::drop_nonpositive;
  throw InputError("unknown weight policy '" + s + "' (expected shift|drop-nonpositive)");
}

PruneBackend prune_backend_from_string(const std::string& s) {
  if (s == "exact") return PruneBackend::exact;
  if (s == "dynamics") return PruneBackend::dynamics;
  if (s == "sqa") return PruneBackend::sqa;
  if (s == "none") return PruneBackend::none;
  throw InputError("unknown backend '" + s + "' (expected exact|dynamics|sqa|none)");
}

TrackerMode tracker_mode_from_string(const std::string& s) {
  if (s == "sequential") return TrackerMode::sequential;
  if (s == "single-step") return TrackerMode::single_step;
  throw InputError("unknown tracker mode '" + s + "' (expected sequential|single-step)");
}

nlohmann::json to_json(const TrackerConfig& c) {
  return {{"p_detect", c.p_detect},
          {"clutter_density", c.clutter_density},
          {"birth_density", c.birth_density},
          {"sigma_m", c.sigma_m},
          {"dt", c.dt},
          {"process_noise", c.process_noise},
          {"gate_threshold", c.gate_threshold},
          {"birth_velocity_sigma", c.birth_velocity_sigma},
          {"confirm_threshold", c.confirm_threshold},
          {"delete_threshold", c.delete_threshold},
          {"weight_policy", to_string(c.weight_policy)},
          {"max_hypotheses", c.max_hypotheses},
          {"min_track_assignments", c.min_track_assignments},
          {"anneal", to_json(c.anneal)},
          {"qmc", to_json(c.qmc)},
          {"timing", to_json(c.timing)}};
}

TrackerConfig tracker_config_from_json(const nlohmann::json& j, TrackerConfig c) {
  try {
    c.p_detect = j.value("p_detect", c.p_detect);
    c.clutter_density = j.value("clutter_density", c.clutter_density);
    c.birth_density = j.value("birth_density", c.birth_density);
    c.sigma_m = j.value("sigma_m", c.sigma_m);
    c.dt = j.value("dt", c.dt);
    c.process_noise = j.value("process_noise", c.process_noise);
    c.gate_threshold = j.value("gate_threshold", c.gate_threshold);
    c.birth_velocity_sigma = j.value("birth_velocity_sigma", c.birth_velocity_sigma);
    c.confirm_threshold = j.value("confirm_threshold", c.confirm_threshold);
    c.delete_threshold = j.value("delete_threshold", c.delete_threshold);
    if (j.contains("weight_policy")) c.weight_policy = weight_policy_from_string(j.at("weight_policy").get<std::string>());
    c.max_hypotheses = j.value("max_hypotheses", c.max_hypotheses);
    c.min_track_assignments = j.value("min_track_assignments", c.min_track_assignments);
    if (j.contains("anneal")) c.anneal = anneal_config_from_json(j.at("anneal"));
    if (j.contains("qmc")) c.qmc = qmc_config_from_json(j.at("qmc"));
    if (j.contains("timing")) c.timing = timing_from_json(j.at("timing"));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("tracker config JSON: ") + ex.what());
  }
  return c;
}

nlohmann::json to_json(const TrackReport& r) {
  nlohmann::json scans = nlohmann::json::array();
  for (const auto& s : r.scans) {
    const auto& p = s.prune;
    scans.push_back({{"scan", s.scan},
                     {"measurements", s.measurements},
                     {"backend", s.backend},
                     {"n_hypotheses", p.hypotheses},
                     {"n_candidates", p.candidates},
                     {"n_edges", p.edges},
                     {"n_components", p.components},
                     {"largest_component", p.largest_component},
                     {"n_survivors", p.survivors},
                     {"n_tentative", p.tentative},
                     {"n_deleted", p.deleted},
                     {"selected_weight", p.selected_weight},
                     {"quantum", p.quantum},
                     {"backend_time_model_s", p.backend_time_model_s}});
  }
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : r.tracks) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : t.points) pts.push_back({p.scan, p.x, p.y, p.assigned});
    tracks.push_back({{"family", t.family},
                      {"assignments", t.assignments},
                      {"llr", t.llr},
                      {"alive", t.alive},
                      {"points", std::move(pts)}});
  }
  nlohmann::json j = {{"mode", to_string(r.mode)}, {"backend", to_string(r.backend)},
                      {"scans", std::move(scans)}, {"tracks", std::move(tracks)}};
  j["step_scan"] = r.step_scan ? nlohmann::json(*r.step_scan) : nlohmann::json(nullptr);
  return j;
}

TrackReport track_report_from_json(const nlohmann::json& j) {
  TrackReport r;
  try {
    r.mode = tracker_mode_from_string(j.at("mode").get<std::string>());
    r.backend = prune_backend_from_string(j.at("backend").get<std::string>());
    if (j.contains("step_scan") && !j.at("step_scan").is_null()) r.step_scan = j.at("step_scan").get<std::size_t>();
    for (const auto& s : j.at("scans")) {
      ScanRecord rec;
      rec.scan = s.at("scan").get<std::size_t>();
      rec.measurements = s.value("measurements", std::size_t{0});
      rec.backend = s.value("backend", std::string("exact"));
      auto& p = rec.prune;
      p.hypotheses = s.at("n_hypotheses").get<std::size_t>();
      p.candidates = s.value("n_candidates", std::size_t{0});
      p.edges = s.value("n_edges", std::size_t{0});
      p.components = s.value("n_components", std::size_t{0});
      p.largest_component = s.value("largest_component", std::size_t{0});
      p.survivors = s.at("n_survivors").get<std::size_t>();
      p.tentative = s.value("n_tentative", std::size_t{0});
      p.deleted = s.value("n_deleted", std::size_t{0});
      p.selected_weight = s.value("selected_weight", 0.0);
      p.quantum = s.value("quantum", false);
      p.backend_time_model_s = s.at("backend_time_model_s").get<double>();
      r.scans.push_back(std::move(rec));
    }
    for (const auto& t : j.value("tracks", nlohmann::json::array())) {
      Track tr;
      tr.family = t.at("family").get<std::size_t>();
      tr.assignments = t.at("assignments").get<std::size_t>();
      tr.llr = t.value("llr", 0.0);
      tr.alive = t.value("alive", false);
      for (const auto& p : t.at("points")) {
        tr.points.push_back({p.at(0).get<std::size_t>(), p.at(1).get<double>(), p.at(2).get<double>(), p.at(3).get<bool>()});
      }
      r.tracks.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("track report JSON: ") + ex.what());
  }
  return r;
}

nlohmann::json to_json(const TrackError& e) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : e.targets) {
    targets.push_back({{"target", t.target},
                       {"fragments", t.fragments},
                       {"rms", std::isfinite(t.rms) ? nlohmann::json(t.rms) : nlohmann::json(nullptr)},
                       {"coverage", t.coverage}});
  }
  return {{"targets", std::move(targets)}, {"false_tracks", e.false_tracks}};
}

std::string scan_series_csv(const TrackReport& r) {
  io::CsvWriter csv({"scan", "n_hypotheses", "n_survivors", "backend_time_model_s"});
  for (const auto& s : r.scans) {
    csv.add(static_cast<long long>(s.scan))
        .add(static_cast<long long>(s.prune.hypotheses))
        .add(static_cast<long long>(s.prune.survivors))
        .add(s.prune.backend_time_model_s);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace qamht
