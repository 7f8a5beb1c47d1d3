#include "qamht/timing.hpp"

#include <algorithm>
#include <cmath>

#include "qamht/errors.hpp"
#include "qamht/io.hpp"

namespace qamht {

void TimingModel::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(std::string("timing model: ") + name + " must be positive and finite");
    }
  };
  positive(t_reset_passive, "t_reset_passive");
  positive(t_readout_single, "t_readout_single");
  positive(t_single_qubit_op, "t_single_qubit_op");
  positive(t_anneal, "t_anneal");
  if (n_qubits < 1) throw InputError("timing model: n_qubits must be >= 1");
  if (shots < 1) throw InputError("timing model: shots must be >= 1");
}

double readout_time(const TimingModel& m) {
  return m.parallel_readout ? m.t_readout_single
                            : static_cast<double>(m.n_qubits) * m.t_readout_single;
}

ShotTime per_shot_time(const TimingModel& m) {
  m.validate();
  ShotTime t;
  t.readout = readout_time(m);
  t.anneal = m.t_anneal;
  t.reset = m.reset_mode == ResetMode::passive ? m.t_reset_passive
                                               : t.readout + m.t_single_qubit_op;
  return t;
}

RuntimeEstimate total_runtime(const TimingModel& m) {
  RuntimeEstimate e;
  e.per_shot = per_shot_time(m);
  const double shots = static_cast<double>(m.shots);
  e.total = shots * e.per_shot.total();
  const double parts[] = {e.per_shot.reset, e.per_shot.anneal, e.per_shot.readout};
  const auto top = std::max_element(std::begin(parts), std::end(parts)) - std::begin(parts);
  e.dominant = static_cast<Phase>(top);
  e.dominant_share = parts[top] / e.per_shot.total();
  return e;
}

Histogram runtime_histogram(std::span<const double> totals, std::size_t bins) {
  if (totals.empty()) throw InputError("runtime histogram needs at least one value");
  if (bins < 1) throw InputError("runtime histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(totals.begin(), totals.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Histogram h;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.counts = {totals.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : totals) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    h.counts[std::min(b, bins - 1)] += 1;
  }
  return h;
}

Histogram runtime_histogram(std::span<const TimingModel> models, std::size_t bins) {
  std::vector<double> totals;
  totals.reserve(models.size());
  for (const auto& m : models) totals.push_back(total_runtime(m).total);
  return runtime_histogram(totals, bins);
}

std::string histogram_csv(const Histogram& h) {
  io::CsvWriter csv({"bin_low_s", "bin_high_s", "count"});
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    csv.add(h.edges[b]).add(h.edges[b + 1]).add(static_cast<long long>(h.counts[b]));
    csv.end_row();
  }
  return csv.str();
}

const char* to_string(ResetMode mode) { return mode == ResetMode::active ? "active" : "passive"; }

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::reset: return "reset";
    case Phase::anneal: return "anneal";
    case Phase::readout: return "readout";
  }
  return "?";
}

ResetMode reset_mode_from_string(const std::string& name) {
  if (name == "active") return ResetMode::active;
  if (name == "passive") return ResetMode::passive;
  throw InputError("unknown reset mode '" + name + "' (expected active|passive)");
}

nlohmann::json to_json(const TimingModel& m) {
  return {{"reset_mode", to_string(m.reset_mode)},
          {"t_reset_passive_s", m.t_reset_passive},
          {"t_readout_single_s", m.t_readout_single},
          {"t_single_qubit_op_s", m.t_single_qubit_op},
          {"parallel_readout", m.parallel_readout},
          {"n_qubits", m.n_qubits},
          {"t_anneal_s", m.t_anneal},
          {"shots", m.shots}};
}

TimingModel timing_from_json(const nlohmann::json& j) {
  TimingModel m;
  try {
    m.reset_mode = reset_mode_from_string(j.value("reset_mode", std::string(to_string(m.reset_mode))));
    m.t_reset_passive = j.value("t_reset_passive_s", m.t_reset_passive);
    m.t_readout_single = j.value("t_readout_single_s", m.t_readout_single);
    m.t_single_qubit_op = j.value("t_single_qubit_op_s", m.t_single_qubit_op);
    m.parallel_readout = j.value("parallel_readout", m.parallel_readout);
    m.n_qubits = j.value("n_qubits", m.n_qubits);
    m.t_anneal = j.value("t_anneal_s", m.t_anneal);
    m.shots = j.value("shots", m.shots);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("timing JSON: ") + ex.what());
  }
  m.validate();
  return m;
}

nlohmann::json to_json(const RuntimeEstimate& e) {
  return {{"per_shot_s",
           {{"reset", e.per_shot.reset},
            {"anneal", e.per_shot.anneal},
            {"readout", e.per_shot.readout},
            {"total", e.per_shot.total()}}},
          {"total_s", e.total},
          {"dominant_phase", to_string(e.dominant)},
          {"dominant_share", e.dominant_share}};
}

}  // namespace qamht
