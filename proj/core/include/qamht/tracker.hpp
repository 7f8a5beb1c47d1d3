#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qamht/anneal.hpp"
#include "qamht/graph.hpp"
#include "qamht/kalman.hpp"
#include "qamht/scenario.hpp"
#include "qamht/sqa.hpp"
#include "qamht/timing.hpp"

namespace qamht {

enum class EntryKind { birth, assigned, missed };

struct HistoryEntry {
  std::size_t scan = 0;
  EntryKind kind = EntryKind::missed;
  std::size_t measurement = 0;  ///< meaningless for misses
  double log_likelihood = 0.0;  ///< log N(innovation) for assignments
  double x = 0.0;               ///< filtered (or predicted, on a miss) position
  double y = 0.0;
};

/// One branch of a track tree. Every hypothesis of a family descends from the
/// same birth measurement, so siblings always conflict.
struct TrackHypothesis {
  std::size_t id = 0;
  std::size_t family = 0;
  std::vector<HistoryEntry> history;
  KalmanState state;
  double llr = 0.0;
  bool confirmed = false;

  [[nodiscard]] std::size_t assignments() const;
};

enum class WeightPolicy {
  shift,             ///< w = llr - min(batch) + 1e-6
  drop_nonpositive,  ///< w = llr, vertices with llr <= 0 left out
};

enum class PruneBackend { exact, dynamics, sqa, none };

struct TrackerConfig {
  double p_detect = 0.9;
  /// Clutter density used for scoring; run_tracker fills it from the scenario
  /// when negative.
  double clutter_density = -1.0;
  /// Density of new targets; a birth scores log(birth / clutter).
  double birth_density = 1e-6;
  double sigma_m = 5.0;
  double dt = 1.0;
  /// Acceleration variance per axis; negative means (0.1 sigma_m / dt^2)^2.
  double process_noise = -1.0;
  double gate_threshold = kDefaultGate;
  /// Velocity standard deviation of a freshly born track.
  double birth_velocity_sigma = 15.0;
  /// Hypotheses above this score, and descendants of hypotheses once
  /// selected, are candidates for the MWIS selection.
  double confirm_threshold = 7.0;
  /// Hypotheses below this score are deleted.
  double delete_threshold = -5.0;
  WeightPolicy weight_policy = WeightPolicy::shift;
  std::size_t max_hypotheses = 500'000;
  std::size_t min_track_assignments = 3;
  MwisOptions exact;
  AnnealConfig anneal;
  QmcConfig qmc;
  /// Reset/readout parameters for the modelled backend time; qubit count,
  /// anneal time and shots are taken from each pruning problem.
  TimingModel timing;

  void validate() const;
  [[nodiscard]] double effective_clutter() const;
  [[nodiscard]] double effective_sigma() const;
  [[nodiscard]] double effective_process_noise() const;
};

/// Tracker config consistent with a scenario (p_detect, clutter, sigma, dt).
TrackerConfig tracker_config_for(const ScenarioConfig& s);

/// Cumulative log-likelihood ratio of a history.
double score_hypothesis(const TrackHypothesis& h, const TrackerConfig& cfg);

struct TrackerState {
  std::vector<TrackHypothesis> live;
  std::size_t next_id = 0;
  std::size_t next_family = 0;
  /// Last pruned version of every family ever seen, by family id.
  std::vector<std::optional<TrackHypothesis>> family_last;
};

/// Replaces every live hypothesis by its missed-detection child (omitted when
/// p_detect = 1) and one child per gated measurement, then adds one new-track
/// hypothesis per measurement. Throws CapacityError past max_hypotheses.
void extend_hypotheses(TrackerState& st, const std::vector<Measurement>& scan, std::size_t scan_index,
                       const TrackerConfig& cfg);

/// Conflict graph over `hyps`: one vertex per member, an edge whenever two
/// hypotheses use the same (scan, measurement).
struct ConflictGraph {
  WeightedGraph graph;
  std::vector<std::size_t> members;  ///< vertex -> index into hyps
};
ConflictGraph build_conflict_graph(const std::vector<TrackHypothesis>& hyps, WeightPolicy policy);

struct PruneOutcome {
  std::size_t hypotheses = 0;   ///< before pruning
  std::size_t candidates = 0;   ///< vertices of the conflict graph
  std::size_t edges = 0;
  std::size_t components = 0;
  std::size_t largest_component = 0;
  std::size_t survivors = 0;    ///< selected by the MWIS backend
  std::size_t tentative = 0;    ///< retained below the confirmation score
  std::size_t deleted = 0;
  double selected_weight = 0.0;
  bool quantum = false;         ///< dynamics or sqa solved at least one component
  double backend_time_model_s = 0.0;
  ConflictGraph graph;
  VertexSet selected;
};

/// Deletes hypotheses below delete_threshold, solves the MWIS of the
/// candidates component by component with `backend`, then keeps the
/// remaining hypotheses greedily (highest score first) when they conflict
/// with nothing kept so far. The live set is pairwise conflict-free afterwards.
PruneOutcome prune(TrackerState& st, const TrackerConfig& cfg, PruneBackend backend);

/// MWIS of one conflict graph with the given backend (components solved separately).
VertexSet solve_mwis(const WeightedGraph& g, const TrackerConfig& cfg, PruneBackend backend, bool* quantum = nullptr);

enum class TrackerMode { sequential, single_step };

struct TrackerRun {
  TrackerMode mode = TrackerMode::sequential;
  PruneBackend backend = PruneBackend::exact;
  /// Single-step: the scan handed to `backend`; chosen by an exact dry run
  /// (largest hypothesis count) when unset.
  std::optional<std::size_t> step_scan;
  /// Stop after this many scans (0 = all).
  std::size_t max_scans = 0;
};

struct ScanRecord {
  std::size_t scan = 0;
  std::size_t measurements = 0;
  std::string backend;
  PruneOutcome prune;
};

struct TrackPoint {
  std::size_t scan = 0;
  double x = 0.0;
  double y = 0.0;
  bool assigned = false;
};

struct Track {
  std::size_t family = 0;
  std::size_t assignments = 0;
  double llr = 0.0;
  bool alive = false;
  std::vector<TrackPoint> points;  ///< birth through the last assignment
};

struct TrackReport {
  TrackerMode mode = TrackerMode::sequential;
  PruneBackend backend = PruneBackend::exact;
  std::optional<std::size_t> step_scan;
  std::vector<ScanRecord> scans;
  std::vector<Track> tracks;  ///< families with at least min_track_assignments
};

TrackReport run_tracker(const Scenario& scenario, TrackerConfig cfg, const TrackerRun& run);

/// Track from the last kept hypothesis of a family.
Track make_track(const TrackHypothesis& h, bool alive);

struct TruthError {
  std::size_t target = 0;
  std::size_t fragments = 0;
  double rms = 0.0;        ///< pooled over all matched fragments; NaN when none
  double coverage = 0.0;   ///< fraction of truth scans covered by a fragment
};

struct TrackError {
  std::vector<TruthError> targets;
  std::size_t false_tracks = 0;
};

/// A recovered track is matched to the truth track it is closest to (RMS over
/// the scans both cover) if that RMS is below match_distance.
TrackError track_error(const std::vector<Track>& tracks, const std::vector<std::vector<TargetState>>& truth,
                       double match_distance);

const char* to_string(WeightPolicy p);
const char* to_string(PruneBackend b);
const char* to_string(TrackerMode m);
WeightPolicy weight_policy_from_string(const std::string& s);
PruneBackend prune_backend_from_string(const std::string& s);
TrackerMode tracker_mode_from_string(const std::string& s);

nlohmann::json to_json(const TrackerConfig& c);
TrackerConfig tracker_config_from_json(const nlohmann::json& j, TrackerConfig base = {});
nlohmann::json to_json(const TrackReport& r);
nlohmann::json to_json(const TrackError& e);
TrackReport track_report_from_json(const nlohmann::json& j);
/// scan, n_hypotheses, n_survivors, backend_time_model_s
std::string scan_series_csv(const TrackReport& r);

}  // namespace qamht
