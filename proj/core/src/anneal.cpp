#include "qamht/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qamht/errors.hpp"

namespace qamht {

namespace {

struct GridPos {
  std::size_t i;
  double f;
};

GridPos locate(const TimeGrid& grid, double t) {
  const double x = std::clamp(t / grid.dt(), 0.0, static_cast<double>(grid.steps));
  const auto i = std::min(static_cast<std::size_t>(x), grid.steps - 1);
  return {i, x - static_cast<double>(i)};
}

double lerp(const std::vector<double>& v, GridPos p) { return v[p.i] + p.f * (v[p.i + 1] - v[p.i]); }

std::vector<double> rate_series(const DeviceTrajectory& d, std::size_t k, double LindbladRates::*field) {
  std::vector<double> out(d.grid.points());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d.rates[k][i].*field;
  return out;
}

}  // namespace

double success_probability(const AnnealResult& r, double optimum_weight) {
  if (r.weights.empty()) return 0.0;
  const double tol = 1e-9 * std::max(1.0, std::abs(optimum_weight));
  std::size_t hits = 0;
  for (std::size_t s = 0; s < r.weights.size(); ++s) {
    if (r.feasible[s] && r.weights[s] >= optimum_weight - tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(r.weights.size());
}

double success_probability(const AnnealResult& r, const MwisSolution& oracle) {
  return success_probability(r, oracle.weight);
}

void attach_best_energy(AnnealResult& r, const IsingProblem& p) {
  r.energies.resize(r.samples.size());
  r.best_energy = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < r.samples.size(); ++s) {
    r.energies[s] = ising_energy(p, r.samples[s]);
    if (r.energies[s] < r.best_energy) {
      r.best_energy = r.energies[s];
      r.best_spins = r.samples[s];
    }
  }
}

void attach_mwis_decoding(AnnealResult& r, const WeightedGraph& g, const DecodeMap& map) {
  const std::size_t shots = r.samples.size();
  r.raw_sets.resize(shots);
  r.sets.resize(shots);
  r.feasible.assign(shots, false);
  r.weights.assign(shots, 0.0);
  r.infeasible = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    r.raw_sets[s] = decode_spins(r.samples[s], map);
    r.feasible[s] = is_independent(g, r.raw_sets[s]);
    r.weights[s] = total_weight(g, r.raw_sets[s]);
    if (r.feasible[s]) {
      r.sets[s] = r.raw_sets[s];
    } else {
      ++r.infeasible;
      r.sets[s] = repair_independent(g, r.raw_sets[s]);
    }
  }
  // Best feasible raw set; repaired sets only if no shot was feasible.
  const bool any_feasible = r.infeasible < shots;
  const VertexSet* best = nullptr;
  double best_w = 0.0;
  for (std::size_t s = 0; s < shots; ++s) {
    if (any_feasible && !r.feasible[s]) continue;
    const VertexSet& cand = any_feasible ? r.raw_sets[s] : r.sets[s];
    const double w = total_weight(g, cand);
    if (best == nullptr || w > best_w + kWeightTieTolerance ||
        (std::abs(w - best_w) <= kWeightTieTolerance && lex_less(cand, *best))) {
      best = &cand;
      best_w = w;
    }
  }
  r.best_set = best ? *best : VertexSet{};
  r.best_weight = best ? best_w : 0.0;
  const auto same = std::count(r.raw_sets.begin(), r.raw_sets.end(), r.best_set);
  r.best_frequency = shots ? static_cast<double>(same) / static_cast<double>(shots) : 0.0;
}

void AnnealConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("anneal config: ") + name + " must be positive");
  };
  positive(schedule.t_final, "t_final");
  positive(schedule.driver_scale, "driver scale");
  positive(energy_scale, "energy scale");
  positive(evolve.step_factor, "step_factor");
  if (shots < 1) throw InputError("anneal config: shots must be >= 1");
  if (trajectories < 1) throw InputError("anneal config: trajectories must be >= 1");
  if (!(penalty_factor > 1.0)) throw InputError("anneal config: penalty_factor must exceed 1");
  if (max_qubits > kMaxQubits) throw InputError("anneal config: max_qubits is limited to 20");
}

DeviceTrajectory anneal_device_trajectory(const AnnealConfig& cfg, std::size_t qubits) {
  const auto params = device_qubits(cfg.device, qubits);
  BiasTrajectory bias = bias_from_schedule(cfg.schedule, 0.0, qubits, cfg.device.grid_steps);
  for (std::size_t k = 0; k < qubits; ++k) {
    const double eps_max = cfg.device.eps_max_over_gamma * params[k].gamma;
    for (std::size_t i = 0; i < bias.grid.points(); ++i) {
      const double t = bias.grid.time(i);
      bias.eps[k][i] = eps_max * (1.0 - schedule_eval(cfg.schedule, t).target);
      bias.eps_dot[k][i] = -eps_max * schedule_rate(cfg.schedule, t).target;
    }
  }
  return build_device_trajectory(bias, params, cfg.device.resonator, cfg.device.noise);
}

QuantumModel build_anneal_model(const IsingProblem& p, const AnnealConfig& cfg, const DeviceTrajectory* dev) {
  const std::size_t n = p.size();
  const bool use_theta = cfg.mode == AnnealMode::device;
  const bool dev_couplings = cfg.coupling_source == CouplingSource::device;
  if ((use_theta || dev_couplings || cfg.noise) && dev == nullptr) {
    throw InputError("annealing model needs a device trajectory for device mode, device couplings or noise");
  }
  if (dev != nullptr && dev->qubits != n) throw InputError("device trajectory qubit count does not match the problem");
  if (n > cfg.max_qubits) {
    throw CapacityError("the dynamics backend handles at most " + std::to_string(cfg.max_qubits) + " qubits (" +
                        std::to_string(n) + " requested); use the sqa backend");
  }

  QuantumModel m;
  m.qubits = n;
  m.t_final = cfg.schedule.t_final;
  const Schedule sched = cfg.schedule;
  const double ep = cfg.energy_scale;
  const std::vector<double> fields = p.fields();
  std::vector<double> couplings(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) couplings[k * n + j] = k == j ? 0.0 : p.coupling(k, j);
  }
  m.hamiltonian = [=](double t, PauliTerms& out) {
    const double tc = std::clamp(t, 0.0, sched.t_final);
    const Envelope e = schedule_eval(sched, tc);
    const GridPos pos = dev ? locate(dev->grid, tc) : GridPos{};
    for (std::size_t k = 0; k < n; ++k) {
      out.z[k] = e.driver * sched.driver_scale / 2.0;
      out.x[k] = e.target * ep * fields[k];
      out.y[k] = use_theta ? 0.5 * lerp(dev->theta[k], pos) : 0.0;
      for (std::size_t j = k + 1; j < n; ++j) {
        if (dev_couplings) {
          const auto& c = dev->couplings;
          const double a = c[pos.i][k * n + j];
          out.xx[k * n + j] = a + pos.f * (c[pos.i + 1][k * n + j] - a);
        } else {
          out.xx[k * n + j] = e.target * ep * couplings[k * n + j];
        }
      }
    }
  };
  if (cfg.noise) {
    std::vector<std::vector<double>> relax(n), excite(n), dephase(n);
    for (std::size_t k = 0; k < n; ++k) {
      relax[k] = rate_series(*dev, k, &LindbladRates::relax);
      excite[k] = rate_series(*dev, k, &LindbladRates::excite);
      dephase[k] = rate_series(*dev, k, &LindbladRates::dephase);
    }
    const TimeGrid grid = dev->grid;
    m.rates = [=](double t, ChannelRates& out) {
      const GridPos pos = locate(grid, t);
      for (std::size_t k = 0; k < n; ++k) {
        out.relax[k] = lerp(relax[k], pos);
        out.excite[k] = lerp(excite[k], pos);
        out.dephase[k] = lerp(dephase[k], pos);
      }
    };
  }
  m.omega_scale = estimate_omega_scale(m);
  return m;
}

AnnealResult anneal_ising(const IsingProblem& p, const AnnealConfig& cfg) {
  cfg.validate();
  const std::size_t n = p.size();
  AnnealResult r;
  r.backend = "dynamics";
  r.t_final = cfg.schedule.t_final;
  r.shots = cfg.shots;
  if (n == 0) {
    r.samples.assign(cfg.shots, Spins{});
    r.p_ground = 1.0;
    attach_best_energy(r, p);
    return r;
  }
  if (n > cfg.max_qubits) {
    throw CapacityError("the dynamics backend handles at most " + std::to_string(cfg.max_qubits) + " qubits (" +
                        std::to_string(n) + " requested); use the sqa backend");
  }

  std::optional<DeviceTrajectory> dev;
  if (cfg.noise || cfg.mode == AnnealMode::device || cfg.coupling_source == CouplingSource::device) {
    dev = anneal_device_trajectory(cfg, n);
  }
  const QuantumModel model = build_anneal_model(p, cfg, dev ? &*dev : nullptr);
  const StateVector psi0 = basis_state(n, (std::uint64_t{1} << n) - 1);

  std::vector<double> probs;
  nlohmann::json details;
  details["qubits"] = n;
  details["steps"] = step_count(model, cfg.evolve);
  if (!cfg.noise) {
    details["method"] = "pure_state";
    probs = target_basis_probabilities(evolve_pure(model, psi0, cfg.evolve));
  } else if (n <= cfg.dense_limit) {
    details["method"] = "density_matrix";
    EvolveStats stats;
    const DensityMatrix rho = evolve_lindblad(model, pure_density(psi0), cfg.evolve, &stats);
    details["trace_drift"] = stats.trace_drift;
    details["min_eigenvalue"] = stats.min_eigenvalue;
    probs = target_basis_probabilities(rho);
  } else {
    details["method"] = "quantum_jumps";
    details["trajectories"] = cfg.trajectories;
    probs = jump_distribution(model, psi0, cfg.trajectories, cfg.seed, cfg.evolve);
  }
  if (dev) {
    details["max_sw_magnitude"] = dev->max_sw_magnitude;
    details["warnings"] = dev->warnings;
    const auto disc = coupling_discrepancy(p, *dev, cfg.energy_scale);
    details["coupling_discrepancy"] = {{"relative", disc.relative},
                                       {"relative_after_rescale", disc.relative_after_rescale},
                                       {"best_scale", disc.best_scale}};
  }

  if (n <= kExhaustiveMaxSpins) {
    double pg = 0.0;
    for (const auto& s : degenerate_ground_states(p)) pg += probs[spins_to_bits(s)];
    r.p_ground = std::min(1.0, pg);
  }
  const auto bits = sample_measurements(probs, cfg.shots, cfg.seed);
  r.samples.reserve(bits.size());
  for (auto b : bits) r.samples.push_back(bits_to_spins(b, n));
  attach_best_energy(r, p);
  r.details = std::move(details);
  return r;
}

AnnealResult anneal(const WeightedGraph& g, const AnnealConfig& cfg) {
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!(g.weight(v) > 0.0)) throw InputError("anneal: vertex " + std::to_string(v) + " has a non-positive weight");
  }
  const double scale = g.empty() ? 1.0 : g.max_weight();
  std::vector<double> w(g.weights());
  for (double& x : w) x /= scale;
  const WeightedGraph normalized(std::move(w), g.edges());
  const Encoding enc = encode_mwis(normalized, cfg.penalty_factor);
  AnnealResult r = anneal_ising(enc.problem, cfg);
  r.details["weight_scale"] = scale;
  attach_mwis_decoding(r, g, enc.map);
  return r;
}

CouplingDiscrepancy coupling_discrepancy(const IsingProblem& p, const DeviceTrajectory& d, double energy_scale) {
  const std::size_t n = p.size();
  const auto& dev = d.couplings.back();
  double tt = 0.0, dd = 0.0, td = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      const double t = energy_scale * p.coupling(k, j);
      const double v = dev[k * n + j];
      tt += t * t;
      dd += v * v;
      td += t * v;
      diff += (v - t) * (v - t);
    }
  }
  CouplingDiscrepancy out;
  if (tt == 0.0) {
    out.relative = dd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    out.relative_after_rescale = 0.0;
    return out;
  }
  out.relative = std::sqrt(diff / tt);
  out.best_scale = dd > 0.0 ? td / dd : 0.0;
  out.relative_after_rescale = std::sqrt(std::max(0.0, tt - (dd > 0.0 ? td * td / dd : 0.0)) / tt);
  return out;
}

const char* to_string(AnnealMode m) { return m == AnnealMode::device ? "device" : "ideal"; }
const char* to_string(CouplingSource c) { return c == CouplingSource::device ? "device" : "target"; }

AnnealMode anneal_mode_from_string(const std::string& s) {
  if (s == "ideal") return AnnealMode::ideal;
  if (s == "device") return AnnealMode::device;
  throw InputError("unknown anneal mode '" + s + "' (expected ideal|device)");
}

CouplingSource coupling_source_from_string(const std::string& s) {
  if (s == "target") return CouplingSource::target;
  if (s == "device") return CouplingSource::device;
  throw InputError("unknown coupling source '" + s + "' (expected target|device)");
}

nlohmann::json to_json(const AnnealConfig& c) {
  return {{"schedule",
           {{"t_final_s", c.schedule.t_final},
            {"shape", to_string(c.schedule.shape)},
            {"driver_scale_rad_s", c.schedule.driver_scale}}},
          {"energy_scale_rad_s", c.energy_scale},
          {"noise", c.noise},
          {"shots", c.shots},
          {"seed", c.seed},
          {"dense_limit", c.dense_limit},
          {"max_qubits", c.max_qubits},
          {"trajectories", c.trajectories},
          {"step_factor", c.evolve.step_factor},
          {"mode", to_string(c.mode)},
          {"coupling_source", to_string(c.coupling_source)},
          {"penalty_factor", c.penalty_factor},
          {"device", to_json(c.device)}};
}

AnnealConfig anneal_config_from_json(const nlohmann::json& j) {
  AnnealConfig c;
  try {
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      c.schedule.t_final = s.value("t_final_s", c.schedule.t_final);
      c.schedule.shape = schedule_shape_from_string(s.value("shape", std::string(to_string(c.schedule.shape))));
      c.schedule.driver_scale = s.value("driver_scale_rad_s", c.schedule.driver_scale);
    }
    c.energy_scale = j.value("energy_scale_rad_s", c.energy_scale);
    c.noise = j.value("noise", c.noise);
    c.shots = j.value("shots", c.shots);
    c.seed = j.value("seed", c.seed);
    c.dense_limit = j.value("dense_limit", c.dense_limit);
    c.max_qubits = j.value("max_qubits", c.max_qubits);
    c.trajectories = j.value("trajectories", c.trajectories);
    c.evolve.step_factor = j.value("step_factor", c.evolve.step_factor);
    c.mode = anneal_mode_from_string(j.value("mode", std::string(to_string(c.mode))));
    c.coupling_source = coupling_source_from_string(j.value("coupling_source", std::string(to_string(c.coupling_source))));
    c.penalty_factor = j.value("penalty_factor", c.penalty_factor);
    if (j.contains("device")) c.device = device_config_from_json(j.at("device"));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("anneal config JSON: ") + ex.what());
  }
  c.validate();
  return c;
}

std::string spins_string(const Spins& s) {
  std::string out(s.size(), '+');
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k] > 0 ? '+' : '-';
  return out;
}

nlohmann::json to_json(const AnnealResult& r, bool with_samples) {
  nlohmann::json j = {{"backend", r.backend},
                      {"t_final_s", r.t_final},
                      {"shots", r.shots},
                      {"best_energy", r.best_energy},
                      {"best_spins", spins_string(r.best_spins)},
                      {"details", r.details}};
  j["p_ground"] = std::isnan(r.p_ground) ? nlohmann::json(nullptr) : nlohmann::json(r.p_ground);
  if (!r.raw_sets.empty()) {
    j["best_set"] = r.best_set;
    j["best_weight"] = r.best_weight;
    j["best_frequency"] = r.best_frequency;
    j["infeasible_shots"] = r.infeasible;
  }
  if (with_samples) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : r.samples) samples.push_back(spins_string(s));
    j["samples"] = std::move(samples);
  }
  return j;
}

}  // namespace qamht
