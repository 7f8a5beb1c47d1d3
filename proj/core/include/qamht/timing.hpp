#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qamht {

enum class ResetMode { passive, active };

/// Hardware run-time model of one annealing job. Durations in seconds.
struct TimingModel {
  ResetMode reset_mode = ResetMode::active;
  double t_reset_passive = 5e-3;
  double t_readout_single = 1e-6;
  /// Conditional flip that follows the measurement in an active reset.
  double t_single_qubit_op = 100e-9;
  bool parallel_readout = true;
  std::size_t n_qubits = 1;
  double t_anneal = 50e-6;
  std::size_t shots = 1000;

  /// Throws InputError unless every duration is positive and shots >= 1.
  void validate() const;
};

enum class Phase { reset, anneal, readout };

struct ShotTime {
  double reset = 0.0;
  double anneal = 0.0;
  double readout = 0.0;
  [[nodiscard]] double total() const { return reset + anneal + readout; }
};

struct RuntimeEstimate {
  ShotTime per_shot;
  double total = 0.0;
  Phase dominant = Phase::anneal;
  /// Fraction of the total spent in the dominant phase.
  double dominant_share = 0.0;
};

/// Readout of the register: one measurement if parallel, n sequential otherwise.
double readout_time(const TimingModel& m);
ShotTime per_shot_time(const TimingModel& m);
RuntimeEstimate total_runtime(const TimingModel& m);

struct Histogram {
  std::vector<double> edges;         ///< bins + 1 ascending edges
  std::vector<std::size_t> counts;   ///< one per bin
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// All-equal input yields a single bin. Throws InputError on empty input.
Histogram runtime_histogram(std::span<const double> totals, std::size_t bins = 10);
Histogram runtime_histogram(std::span<const TimingModel> models, std::size_t bins = 10);

/// CSV with header bin_low_s,bin_high_s,count.
std::string histogram_csv(const Histogram& h);

const char* to_string(ResetMode mode);
const char* to_string(Phase phase);
ResetMode reset_mode_from_string(const std::string& name);

nlohmann::json to_json(const TimingModel& m);
TimingModel timing_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RuntimeEstimate& e);

}  // namespace qamht
