#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qamht/anneal.hpp"
#include "qamht/errors.hpp"
#include "qamht/graph.hpp"
#include "qamht/io.hpp"
#include "qamht/scenario.hpp"
#include "qamht/sqa.hpp"
#include "qamht/timing.hpp"
#include "qamht/tracker.hpp"

#ifndef QAMHT_VERSION
#define QAMHT_VERSION "0.0.0"
#endif

namespace qamht::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kConfigDirVar = "QAMHT_CONFIG_DIR";

struct Context {
  Context(std::ostream& o, std::ostream& e, std::vector<std::string> a) : out(o), err(e), args(std::move(a)) {}

  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
  bool json_output = false;
  std::string config_file;
  /// Effective configuration recorded by an earlier run (replay).
  std::optional<json> forced;
  /// Filled by the command for the manifest.
  json config = json::object();
  json seeds = json::object();
  std::vector<fs::path> artifacts;
  std::optional<fs::path> manifest_path;
};

// FNV-1a, used only to fingerprint artifacts in the manifest.
std::string fingerprint(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

json read_json_file(const fs::path& path) {
  const std::string text = io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw InputError(path.string() + ": " + ex.what());
  }
}

/// defaults, then $QAMHT_CONFIG_DIR/<section>.json, then section of --config.
/// A replay uses the recorded section verbatim.
json layered(const Context& ctx, const std::string& section, json defaults) {
  if (ctx.forced) {
    if (ctx.forced->contains(section)) defaults.merge_patch(ctx.forced->at(section));
    return defaults;
  }
  if (const char* dir = std::getenv(kConfigDirVar); dir != nullptr && *dir != '\0') {
    const fs::path p = fs::path(dir) / (section + ".json");
    if (fs::exists(p)) defaults.merge_patch(read_json_file(p));
  }
  if (!ctx.config_file.empty()) {
    const json j = read_json_file(ctx.config_file);
    if (!j.is_object()) throw InputError(ctx.config_file + ": configuration must be a JSON object");
    if (j.contains(section)) defaults.merge_patch(j.at(section));
  }
  return defaults;
}

AnnealConfig load_anneal(Context& ctx) {
  AnnealConfig c = anneal_config_from_json(layered(ctx, "anneal", to_json(AnnealConfig{})));
  return c;
}

QmcConfig load_qmc(Context& ctx) { return qmc_config_from_json(layered(ctx, "qmc", to_json(QmcConfig{}))); }

TimingModel load_timing(Context& ctx) { return timing_from_json(layered(ctx, "timing", to_json(TimingModel{}))); }

/// "50us", "1.5ms", "2e-5" (seconds).
double parse_duration(const std::string& text) {
  // Divisors are exact, so "5us" becomes the double nearest 5e-6.
  static const std::vector<std::pair<std::string, double>> units = {
      {"ns", 1e9}, {"us", 1e6}, {"ms", 1e3}, {"s", 1.0}};
  std::string number = text;
  double divisor = 1.0;
  for (const auto& [suffix, factor] : units) {
    if (number.size() > suffix.size() && number.compare(number.size() - suffix.size(), suffix.size(), suffix) == 0) {
      number.resize(number.size() - suffix.size());
      divisor = factor;
      break;
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(number, &used);
    if (used != number.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(text);
    return v / divisor;
  } catch (const std::exception&) {
    throw UsageError("cannot parse duration '" + text + "' (examples: 50us, 1ms, 2e-5)");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(parse_duration(item));
  }
  return out;
}

bool parse_switch(const std::string& v, const char* flag) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw UsageError(std::string(flag) + " expects on|off, got '" + v + "'");
}

void write_artifact(Context& ctx, const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_atomic(path, content);
  ctx.artifacts.push_back(path);
}

void emit(Context& ctx, const json& summary, const std::string& human) {
  if (ctx.json_output) {
    ctx.out << summary.dump(2) << '\n';
  } else {
    ctx.out << human;
  }
}

WeightedGraph load_graph(const std::string& path) { return parse_graph(io::read_file(path)); }

std::string set_string(const VertexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs {
  std::size_t targets = 2;
  std::size_t scans = 20;
  double lambda_c = 1e-5;
  double pd = 0.9;
  double sigma = 5.0;
  double dt = 1.0;
  std::string region;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_scenario(Context& ctx, const ScenarioArgs& a) {
  ScenarioConfig c;
  c.scans = a.scans;
  c.lambda_c = a.lambda_c;
  c.p_detect = a.pd;
  c.sigma_m = a.sigma;
  c.dt = a.dt;
  c.seed = a.seed;
  if (!a.region.empty()) {
    std::vector<double> r;
    std::stringstream ss(a.region);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        r.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("--region: cannot parse '" + item + "'");
      }
    }
    if (r.size() == 2) {
      c.region = {0.0, r[0], 0.0, r[1]};
    } else if (r.size() == 4) {
      c.region = {r[0], r[1], r[2], r[3]};
    } else {
      throw UsageError("--region expects W,H or x_min,x_max,y_min,y_max");
    }
  }
  try {
    c.validate();
  } catch (const InputError& ex) {
    throw UsageError(ex.what());
  }
  c.targets = default_targets(a.targets, c.region, c.scans, c.dt);
  const Scenario s = generate_scenario(c);
  ctx.config = {{"scenario", to_json(c)}};
  ctx.seeds = {{"scenario", c.seed}};
  write_artifact(ctx, a.out, to_json(s).dump(1) + "\n");
  ctx.manifest_path = fs::path(a.out + ".manifest.json");

  std::size_t total = 0;
  std::size_t clutter = 0;
  for (const auto& scan : s.scans) {
    total += scan.size();
    clutter += static_cast<std::size_t>(std::count_if(scan.begin(), scan.end(), [](const Measurement& m) { return m.source < 0; }));
  }
  const json summary = {{"command", "scenario"}, {"out", a.out},       {"targets", a.targets},
                        {"scans", c.scans},      {"measurements", total}, {"clutter", clutter}};
  std::ostringstream h;
  h << "scenario: " << a.targets << " target(s), " << c.scans << " scans, " << total << " measurements (" << clutter
    << " clutter) -> " << a.out << '\n';
  emit(ctx, summary, h.str());
}

// -------------------------------------------------------------------- mwis

struct AnnealArgs {
  std::string tf;
  std::optional<std::size_t> shots;
  std::string noise;
  std::optional<std::uint64_t> seed;
  std::string mode;
};

void apply_anneal_args(AnnealConfig& c, QmcConfig& q, const AnnealArgs& a) {
  if (!a.tf.empty()) c.schedule.t_final = parse_duration(a.tf);
  if (a.shots) {
    c.shots = *a.shots;
    q.restarts = *a.shots;
  }
  if (!a.noise.empty()) c.noise = parse_switch(a.noise, "--noise");
  if (a.seed) {
    c.seed = *a.seed;
    q.seed = *a.seed;
  }
  if (!a.mode.empty()) c.mode = anneal_mode_from_string(a.mode);
}

struct MwisArgs {
  std::string graph;
  std::string backend = "exact";
  AnnealArgs anneal;
  std::string out;
};

void cmd_mwis(Context& ctx, const MwisArgs& a) {
  const WeightedGraph g = load_graph(a.graph);
  AnnealConfig acfg = load_anneal(ctx);
  QmcConfig qcfg = load_qmc(ctx);
  apply_anneal_args(acfg, qcfg, a.anneal);
  acfg.validate();
  qcfg.validate();

  const SubGraph pos = drop_nonpositive(g);
  json stats = json::object();
  VertexSet set;
  if (a.backend == "exact") {
    const MwisSolution s = mwis_exact(pos.graph);
    set = pos.lift(s.set);
    stats = {{"nodes", s.nodes}};
    ctx.config = json::object();
  } else if (a.backend == "anneal" || a.backend == "sqa") {
    const AnnealResult r = a.backend == "anneal" ? anneal(pos.graph, acfg)
                                                 : sqa_anneal(pos.graph, qcfg, acfg.penalty_factor);
    set = pos.lift(r.best_set);
    stats = to_json(r);
    if (pos.graph.size() <= 64) {
      const MwisSolution opt = mwis_exact(pos.graph);
      stats["optimum_weight"] = opt.weight;
      stats["success_probability"] = success_probability(r, opt);
    }
    if (a.backend == "anneal") {
      ctx.config = {{"anneal", to_json(acfg)}};
      ctx.seeds = {{"anneal", acfg.seed}};
    } else {
      ctx.config = {{"qmc", to_json(qcfg)}, {"anneal", {{"penalty_factor", acfg.penalty_factor}}}};
      ctx.seeds = {{"qmc", qcfg.seed}};
    }
  } else {
    throw UsageError("--backend must be exact, anneal or sqa");
  }
  const double weight = total_weight(g, set);
  json result = {{"backend", a.backend}, {"n", g.size()}, {"set", set}, {"weight", weight}, {"stats", stats}};
  if (!a.out.empty()) {
    write_artifact(ctx, a.out, result.dump(1) + "\n");
    ctx.manifest_path = fs::path(a.out + ".manifest.json");
  }
  std::ostringstream h;
  h << "mwis (" << a.backend << "): set " << set_string(set) << ", weight " << io::format_number(weight) << '\n';
  if (stats.contains("success_probability")) {
    h << "  success probability " << io::format_number(stats["success_probability"].get<double>()) << " over "
      << stats.value("shots", 0) << " shots\n";
  }
  emit(ctx, result, h.str());
}

// ------------------------------------------------------------------- track

struct TrackArgs {
  std::string scenario;
  std::string backend = "exact";
  std::string mode = "sequential";
  std::optional<std::size_t> step_scan;
  std::size_t max_scans = 0;
  std::optional<double> match_distance;
  AnnealArgs anneal;
  std::string out_dir;
};

std::string tracks_csv(const TrackReport& r) {
  io::CsvWriter csv({"scan", "track_id", "x", "y", "assigned"});
  for (const auto& t : r.tracks) {
    for (const auto& p : t.points) {
      csv.add(static_cast<long long>(p.scan))
          .add(static_cast<long long>(t.family))
          .add(p.x)
          .add(p.y)
          .add(static_cast<long long>(p.assigned));
      csv.end_row();
    }
  }
  return csv.str();
}

void cmd_track(Context& ctx, const TrackArgs& a) {
  const Scenario sc = scenario_from_json(read_json_file(a.scenario));
  TrackerConfig base = tracker_config_for(sc.config);
  base.anneal = load_anneal(ctx);
  base.qmc = load_qmc(ctx);
  base.timing = load_timing(ctx);
  apply_anneal_args(base.anneal, base.qmc, a.anneal);
  json tdefaults = to_json(base);
  for (const char* k : {"anneal", "qmc", "timing"}) tdefaults.erase(k);
  TrackerConfig cfg = tracker_config_from_json(layered(ctx, "tracker", tdefaults), base);

  TrackerRun run;
  run.backend = prune_backend_from_string(a.backend);
  run.mode = tracker_mode_from_string(a.mode);
  run.step_scan = a.step_scan;
  run.max_scans = a.max_scans;
  if (a.step_scan && run.mode != TrackerMode::single_step) throw UsageError("--step-scan requires --mode single-step");
  if (run.mode == TrackerMode::single_step && run.backend == PruneBackend::exact) {
    throw UsageError("--mode single-step needs a quantum backend (dynamics or sqa)");
  }

  const TrackReport rep = run_tracker(sc, cfg, run);
  const double match = a.match_distance.value_or(5.0 * sc.config.sigma_m);
  const TrackError err = track_error(rep.tracks, sc.truth, match);

  json tcfg = to_json(cfg);
  ctx.config = {{"anneal", tcfg["anneal"]}, {"qmc", tcfg["qmc"]}, {"timing", tcfg["timing"]}};
  for (const char* k : {"anneal", "qmc", "timing"}) tcfg.erase(k);
  ctx.config["tracker"] = tcfg;
  ctx.seeds = {{"scenario", sc.config.seed}, {"anneal", cfg.anneal.seed}, {"qmc", cfg.qmc.seed}};

  json report = to_json(rep);
  report["errors"] = to_json(err);
  report["match_distance"] = match;
  const fs::path dir(a.out_dir);
  write_artifact(ctx, dir / "report.json", report.dump(1) + "\n");
  write_artifact(ctx, dir / "counts.csv", scan_series_csv(rep));
  write_artifact(ctx, dir / "tracks.csv", tracks_csv(rep));
  ctx.manifest_path = dir / "manifest.json";

  std::size_t peak = 0;
  for (const auto& s : rep.scans) peak = std::max(peak, s.prune.hypotheses);
  json summary = {{"command", "track"},
                  {"backend", a.backend},
                  {"mode", a.mode},
                  {"scans", rep.scans.size()},
                  {"peak_hypotheses", peak},
                  {"tracks", rep.tracks.size()},
                  {"errors", to_json(err)},
                  {"out_dir", a.out_dir}};
  if (rep.step_scan) summary["step_scan"] = *rep.step_scan;
  std::ostringstream h;
  h << "track (" << a.mode << ", " << a.backend << "): " << rep.scans.size() << " scans, peak " << peak
    << " hypotheses, " << rep.tracks.size() << " track(s)";
  if (rep.step_scan) h << ", quantum step at scan " << *rep.step_scan;
  h << '\n';
  for (const auto& t : err.targets) {
    h << "  target " << t.target << ": " << t.fragments << " fragment(s)";
    if (std::isfinite(t.rms)) h << ", rms " << io::format_number(t.rms);
    h << '\n';
  }
  if (err.false_tracks) h << "  " << err.false_tracks << " unmatched track(s)\n";
  emit(ctx, summary, h.str());
}

// ------------------------------------------------------------------ timing

struct TimingArgs {
  std::string reset;
  bool parallel = false;
  bool serial = false;
  std::optional<std::size_t> shots;
  std::optional<double> anneal_us;
  std::optional<std::size_t> qubits;
  std::string from_report;
  std::size_t bins = 10;
  std::string out;
};

void cmd_timing(Context& ctx, const TimingArgs& a) {
  TimingModel m = load_timing(ctx);
  if (a.parallel && a.serial) throw UsageError("--parallel-readout and --serial-readout are exclusive");
  if (!a.reset.empty()) m.reset_mode = reset_mode_from_string(a.reset);
  if (a.parallel) m.parallel_readout = true;
  if (a.serial) m.parallel_readout = false;
  if (a.shots) m.shots = *a.shots;
  if (a.anneal_us) m.t_anneal = *a.anneal_us / 1e6;
  if (a.qubits) m.n_qubits = *a.qubits;
  m.validate();
  ctx.config = {{"timing", to_json(m)}};

  if (!a.from_report.empty()) {
    if (a.out.empty()) throw UsageError("--from-report needs --out for the histogram CSV");
    const TrackReport rep = track_report_from_json(read_json_file(a.from_report));
    std::vector<double> times;
    for (const auto& s : rep.scans) times.push_back(s.prune.backend_time_model_s);
    const Histogram hist = runtime_histogram(times, a.bins);
    write_artifact(ctx, a.out, histogram_csv(hist));
    ctx.manifest_path = fs::path(a.out + ".manifest.json");
    std::size_t count = 0;
    for (auto c : hist.counts) count += c;
    const json summary = {{"command", "timing"}, {"scans", times.size()}, {"bins", hist.counts.size()},
                          {"counted", count}, {"out", a.out}};
    std::ostringstream h;
    h << "timing histogram: " << times.size() << " scans in " << hist.counts.size() << " bin(s) -> " << a.out << '\n';
    emit(ctx, summary, h.str());
    return;
  }

  const RuntimeEstimate e = total_runtime(m);
  json summary = to_json(e);
  summary["model"] = to_json(m);
  if (!a.out.empty()) {
    write_artifact(ctx, a.out, summary.dump(1) + "\n");
    ctx.manifest_path = fs::path(a.out + ".manifest.json");
  }
  std::ostringstream h;
  h << "per shot: reset " << io::format_number(e.per_shot.reset) << " s, anneal " << io::format_number(e.per_shot.anneal)
    << " s, readout " << io::format_number(e.per_shot.readout) << " s\n";
  h << "total for " << m.shots << " shots: " << io::format_number(e.total) << " s (" << to_string(e.dominant) << " "
    << std::fixed << std::setprecision(1) << 100.0 * e.dominant_share << "%)\n";
  emit(ctx, summary, h.str());
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string graph;
  std::string tf_grid;
  std::string tf_min;
  std::string tf_max;
  std::size_t tf_points = 0;
  AnnealArgs anneal;
  std::string out;
};

void cmd_sweep(Context& ctx, SweepArgs a) {
  std::vector<double> grid;
  if (!a.tf_grid.empty()) {
    grid = parse_list(a.tf_grid);
  } else if (!a.tf_min.empty() && !a.tf_max.empty() && a.tf_points > 0) {
    const double lo = parse_duration(a.tf_min);
    const double hi = parse_duration(a.tf_max);
    if (!(hi >= lo)) throw UsageError("--tf-max must not be below --tf-min");
    for (std::size_t i = 0; i < a.tf_points; ++i) {
      const double f = a.tf_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(a.tf_points - 1);
      grid.push_back(lo * std::pow(hi / lo, f));
    }
  }
  if (grid.empty()) throw UsageError("empty t_f grid: give --tf-grid or --tf-min/--tf-max/--tf-points");
  if (a.anneal.noise.empty()) a.anneal.noise = "on";

  const WeightedGraph g = load_graph(a.graph);
  AnnealConfig base = load_anneal(ctx);
  QmcConfig unused;
  apply_anneal_args(base, unused, a.anneal);
  base.validate();
  const SubGraph pos = drop_nonpositive(g);
  const MwisSolution opt = mwis_exact(pos.graph);

  std::vector<std::future<AnnealResult>> jobs;
  for (double tf : grid) {
    AnnealConfig c = base;
    c.schedule.t_final = tf;
    jobs.push_back(std::async(std::launch::async, [c, &pos] { return anneal(pos.graph, c); }));
  }
  io::CsvWriter csv({"t_final_s", "success_probability", "p_ground", "feasible_fraction"});
  json rows = json::array();
  std::size_t best = 0;
  std::vector<double> success;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const AnnealResult r = jobs[i].get();
    const double p = success_probability(r, opt);
    const double feasible = r.shots ? 1.0 - static_cast<double>(r.infeasible) / static_cast<double>(r.shots) : 0.0;
    csv.add(grid[i]).add(p).add(r.p_ground).add(feasible);
    csv.end_row();
    rows.push_back({{"t_final_s", grid[i]}, {"success_probability", p}, {"p_ground", r.p_ground}});
    success.push_back(p);
    if (p > success[best]) best = i;
  }
  ctx.config = {{"anneal", to_json(base)}, {"grid_s", grid}};
  ctx.seeds = {{"anneal", base.seed}};
  if (!a.out.empty()) {
    write_artifact(ctx, a.out, csv.str());
    ctx.manifest_path = fs::path(a.out + ".manifest.json");
  }
  const bool interior = best > 0 && best + 1 < grid.size();
  const json summary = {{"command", "sweep"},      {"rows", rows},       {"best_t_final_s", grid[best]},
                        {"best_success", success[best]}, {"interior_maximum", interior}};
  std::ostringstream h;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    h << "t_f " << io::format_number(grid[i]) << " s: success " << io::format_number(success[i]) << '\n';
  }
  h << "best t_f " << io::format_number(grid[best]) << " s" << (interior ? " (interior)" : " (grid edge)") << '\n';
  emit(ctx, summary, h.str());
}

// ---------------------------------------------------------------- manifest

void write_manifest(Context& ctx, const std::string& command, double wall_clock) {
  if (!ctx.manifest_path) return;
  json artifacts = json::array();
  for (const auto& p : ctx.artifacts) {
    const std::string bytes = io::read_file(p);
    artifacts.push_back({{"path", p.string()}, {"bytes", bytes.size()}, {"fnv1a64", fingerprint(bytes)}});
  }
  const json m = {{"tool", "qamht"},
                  {"version", QAMHT_VERSION},
                  {"command", command},
                  {"args", ctx.args},
                  {"config", ctx.config},
                  {"seeds", ctx.seeds},
                  {"artifacts", artifacts},
                  {"wall_clock_s", wall_clock}};
  io::write_atomic(*ctx.manifest_path, m.dump(1) + "\n");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<json>& forced, std::vector<fs::path>* produced);

struct ReplayArgs {
  std::string manifest;
  bool verify = false;
};

void cmd_replay(Context& ctx, const ReplayArgs& a) {
  const json m = read_json_file(a.manifest);
  std::vector<std::string> args;
  json config;
  try {
    args = m.at("args").get<std::vector<std::string>>();
    config = m.at("config");
  } catch (const json::exception& ex) {
    throw InputError(a.manifest + ": " + ex.what());
  }
  if (!args.empty() && args.front() == "replay") throw InputError(a.manifest + ": a manifest cannot replay a replay");
  std::ostringstream sink;
  const int code = dispatch(args, ctx.json_output ? sink : ctx.out, ctx.err, config, nullptr);
  if (code != 0) throw InputError("replayed command failed with exit status " + std::to_string(code));
  std::size_t mismatches = 0;
  json checks = json::array();
  if (a.verify) {
    for (const auto& art : m.value("artifacts", json::array())) {
      const std::string path = art.at("path").get<std::string>();
      const std::string now = fingerprint(io::read_file(path));
      const bool same = now == art.at("fnv1a64").get<std::string>();
      mismatches += same ? 0 : 1;
      checks.push_back({{"path", path}, {"identical", same}});
      if (!ctx.json_output) ctx.out << (same ? "identical " : "DIFFERS   ") << path << '\n';
    }
  }
  if (ctx.json_output) ctx.out << json({{"command", "replay"}, {"verified", checks}}).dump(2) << '\n';
  if (mismatches) throw InputError(std::to_string(mismatches) + " artifact(s) differ from the manifest");
}

// ------------------------------------------------------------------ parser

void add_anneal_options(CLI::App* sub, AnnealArgs& a) {
  sub->add_option("--tf", a.tf, "Annealing time (e.g. 100us, 1ms)");
  sub->add_option("--shots", a.shots, "Shots (sqa: restarts)");
  sub->add_option("--noise", a.noise, "on|off");
  sub->add_option("--seed", a.seed, "Sampling seed");
  sub->add_option("--anneal-mode", a.mode, "ideal|device");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<json>& forced, std::vector<fs::path>* produced) {
  Context ctx(out, err, args);
  ctx.forced = forced;

  CLI::App app{"Quantum-annealing emulator and MWIS-pruned multiple hypothesis tracker"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", QAMHT_VERSION);
  app.add_flag("--json", ctx.json_output, "Machine-readable summary on stdout");
  app.add_option("--config", ctx.config_file, "JSON file with anneal/qmc/tracker/timing sections");

  ScenarioArgs sa;
  auto* s = app.add_subcommand("scenario", "Generate a synthetic radar scenario");
  s->add_option("--targets", sa.targets, "Number of targets");
  s->add_option("--scans", sa.scans, "Number of scans");
  s->add_option("--lambda-c", sa.lambda_c, "Clutter density per unit area");
  s->add_option("--pd", sa.pd, "Detection probability");
  s->add_option("--sigma", sa.sigma, "Measurement noise");
  s->add_option("--dt", sa.dt, "Scan interval");
  s->add_option("--region", sa.region, "W,H or x_min,x_max,y_min,y_max");
  s->add_option("--seed", sa.seed, "Scenario seed");
  s->add_option("--out", sa.out, "Scenario JSON path")->required();

  MwisArgs ma;
  auto* mw = app.add_subcommand("mwis", "Solve a maximum-weight independent set");
  mw->add_option("--graph", ma.graph, "Graph file (JSON or DIMACS-style text)")->required();
  mw->add_option("--backend", ma.backend, "exact|anneal|sqa");
  add_anneal_options(mw, ma.anneal);
  mw->add_option("--out", ma.out, "Solution JSON path");

  TrackArgs ta;
  auto* tr = app.add_subcommand("track", "Run the tracker on a scenario");
  tr->add_option("--scenario", ta.scenario, "Scenario JSON")->required();
  tr->add_option("--backend", ta.backend, "exact|dynamics|sqa|none");
  tr->add_option("--mode", ta.mode, "sequential|single-step");
  tr->add_option("--step-scan", ta.step_scan, "Scan for the quantum step (default: largest hypothesis count)");
  tr->add_option("--max-scans", ta.max_scans, "Process only the first N scans");
  tr->add_option("--match-distance", ta.match_distance, "Track-to-truth matching radius (default 5 sigma)");
  add_anneal_options(tr, ta.anneal);
  tr->add_option("--out-dir", ta.out_dir, "Directory for report.json, counts.csv, tracks.csv")->required();

  TimingArgs tm;
  auto* ti = app.add_subcommand("timing", "Hardware run-time estimate or per-scan histogram");
  ti->add_option("--reset", tm.reset, "active|passive");
  ti->add_flag("--parallel-readout", tm.parallel, "Read all qubits at once");
  ti->add_flag("--serial-readout", tm.serial, "Read qubits one after another");
  ti->add_option("--shots", tm.shots, "Shots");
  ti->add_option("--anneal-us", tm.anneal_us, "Annealing time in microseconds");
  ti->add_option("--qubits", tm.qubits, "Register size");
  ti->add_option("--from-report", tm.from_report, "Track report JSON for the histogram");
  ti->add_option("--bins", tm.bins, "Histogram bins");
  ti->add_option("--out", tm.out, "Estimate JSON or histogram CSV path");

  SweepArgs sw;
  auto* sp = app.add_subcommand("sweep", "Success probability versus annealing time");
  sp->add_option("--graph", sw.graph, "Graph file")->required();
  sp->add_option("--tf-grid", sw.tf_grid, "Comma-separated annealing times");
  sp->add_option("--tf-min", sw.tf_min, "Log grid start");
  sp->add_option("--tf-max", sw.tf_max, "Log grid end");
  sp->add_option("--tf-points", sw.tf_points, "Log grid points");
  add_anneal_options(sp, sw.anneal);
  sp->add_option("--out", sw.out, "CSV path");

  ReplayArgs ra;
  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rp->add_option("--manifest", ra.manifest, "Manifest JSON")->required();
  rp->add_flag("--verify", ra.verify, "Compare regenerated artifacts with the recorded fingerprints");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << QAMHT_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  std::string command;
  try {
    if (*s) {
      command = "scenario";
      cmd_scenario(ctx, sa);
    } else if (*mw) {
      command = "mwis";
      cmd_mwis(ctx, ma);
    } else if (*tr) {
      command = "track";
      cmd_track(ctx, ta);
    } else if (*ti) {
      command = "timing";
      cmd_timing(ctx, tm);
    } else if (*sp) {
      command = "sweep";
      cmd_sweep(ctx, sw);
    } else if (*rp) {
      command = "replay";
      cmd_replay(ctx, ra);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, command, wall);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return ex.exit_code();
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return 3;
  }
  if (produced) *produced = ctx.artifacts;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, std::nullopt, nullptr);
}

}  // namespace qamht::cli
