#include "qamht/sqa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "qamht/errors.hpp"
#include "qamht/rng.hpp"

namespace qamht {

namespace {

struct Restart {
  Spins spins;
  bool locked = false;
  std::size_t accepted_clusters = 0;
};

class Replica {
 public:
  Replica(const IsingProblem& p, std::size_t slices, Engine& eng)
      : p_(p), n_(p.size()), slices_(slices), spins_(slices * p.size()), local_(slices * p.size()) {
    for (auto& s : spins_) s = uniform01(eng) < 0.5 ? 1 : -1;
    for (std::size_t q = 0; q < slices_; ++q) {
      for (std::size_t k = 0; k < n_; ++k) {
        double l = p_.field(k);
        const double* row = p_.row(k);
        for (std::size_t j = 0; j < n_; ++j) l += row[j] * spin(q, j);
        local_[q * n_ + k] = l;
      }
    }
  }

  int spin(std::size_t q, std::size_t k) const { return spins_[q * n_ + k]; }

  // One Metropolis sweep over every (slice, spin), then one cluster move per spin.
  void sweep(double target_weight, double j_perp, double beta, Engine& eng, std::size_t& clusters) {
    const double w = target_weight / static_cast<double>(slices_);
    for (std::size_t q = 0; q < slices_; ++q) {
      const std::size_t up = (q + 1) % slices_;
      const std::size_t dn = (q + slices_ - 1) % slices_;
      for (std::size_t k = 0; k < n_; ++k) {
        const int s = spin(q, k);
        const double d_e = -2.0 * s * w * local_[q * n_ + k] + 2.0 * j_perp * s * (spin(up, k) + spin(dn, k));
        if (d_e <= 0.0 || uniform01(eng) < std::exp(-beta * d_e)) flip(q, k);
      }
    }
    for (std::size_t k = 0; k < n_; ++k) {
      double d_e = 0.0;
      for (std::size_t q = 0; q < slices_; ++q) d_e += -2.0 * spin(q, k) * w * local_[q * n_ + k];
      if (d_e <= 0.0 || uniform01(eng) < std::exp(-beta * d_e)) {
        for (std::size_t q = 0; q < slices_; ++q) flip(q, k);
        ++clusters;
      }
    }
  }

  Spins slice(std::size_t q) const {
    return Spins(spins_.begin() + static_cast<std::ptrdiff_t>(q * n_),
                 spins_.begin() + static_cast<std::ptrdiff_t>((q + 1) * n_));
  }

  bool locked() const {
    for (std::size_t q = 1; q < slices_; ++q) {
      if (!std::equal(spins_.begin(), spins_.begin() + static_cast<std::ptrdiff_t>(n_),
                      spins_.begin() + static_cast<std::ptrdiff_t>(q * n_))) {
        return false;
      }
    }
    return true;
  }

 private:
  void flip(std::size_t q, std::size_t k) {
    int& s = spins_[q * n_ + k];
    s = -s;
    const double delta = 2.0 * s;
    const double* row = p_.row(k);
    double* l = &local_[q * n_];
    for (std::size_t j = 0; j < n_; ++j) l[j] += row[j] * delta;
  }

  const IsingProblem& p_;
  std::size_t n_;
  std::size_t slices_;
  std::vector<int> spins_;
  std::vector<double> local_;
};

Restart run_restart(const IsingProblem& p, const QmcConfig& cfg, std::size_t index) {
  Engine eng = make_stream(cfg.seed, index, rng_domain::kSqa);
  Replica rep(p, cfg.slices, eng);
  const Schedule unit{1.0, cfg.shape, 1.0};
  Restart out;
  for (std::size_t point = 0; point < cfg.schedule_points; ++point) {
    const double s = cfg.schedule_points == 1 ? 1.0
                                              : static_cast<double>(point) / static_cast<double>(cfg.schedule_points - 1);
    const double h = schedule_eval(unit, s).target;
    const double j_perp = interslice_coupling(qmc_transverse_field(cfg, s), cfg.beta, cfg.slices);
    for (std::size_t sw = 0; sw < cfg.sweeps_per_point; ++sw) rep.sweep(h, j_perp, cfg.beta, eng, out.accepted_clusters);
  }
  out.locked = rep.locked();
  if (cfg.readout == ReadoutPolicy::final_slice) {
    out.spins = rep.slice(cfg.slices - 1);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < cfg.slices; ++q) {
      Spins sl = rep.slice(q);
      const double e = ising_energy(p, sl);
      if (e < best) {
        best = e;
        out.spins = std::move(sl);
      }
    }
  }
  return out;
}

}  // namespace

void QmcConfig::validate() const {
  if (slices < 2) throw InputError("qmc config: trotter slices must be >= 2");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("qmc config: beta must be positive");
  if (sweeps_per_point < 1) throw InputError("qmc config: sweeps per point must be >= 1");
  if (schedule_points < 1) throw InputError("qmc config: schedule points must be >= 1");
  if (restarts < 1) throw InputError("qmc config: restarts must be >= 1");
  if (!(driver_ratio > 0.0) || !std::isfinite(driver_ratio)) throw InputError("qmc config: driver ratio must be positive");
}

double interslice_coupling(double gamma, double beta, std::size_t slices) {
  return -std::log(std::tanh(beta * gamma / static_cast<double>(slices))) / (2.0 * beta);
}

double qmc_transverse_field(const QmcConfig& cfg, double s) {
  const Schedule unit{1.0, cfg.shape, 1.0};
  const double f0 = schedule_eval(unit, 0.0).driver;
  const double f = std::max(schedule_eval(unit, s).driver, 1e-6 * f0);
  return f * cfg.driver_ratio / 2.0;
}

double classical_energy(const IsingProblem& p, const Spins& slice) { return ising_energy(p, slice); }

AnnealResult sqa_anneal(const IsingProblem& p, const QmcConfig& cfg) {
  cfg.validate();
  if (p.size() > cfg.max_spins) {
    throw CapacityError("the sqa backend handles at most " + std::to_string(cfg.max_spins) + " spins (" +
                        std::to_string(p.size()) + " requested)");
  }
  std::vector<Restart> runs(cfg.restarts);
  detail::parallel_for(cfg.restarts, [&](std::size_t r) { runs[r] = run_restart(p, cfg, r); });

  AnnealResult res;
  res.backend = "sqa";
  res.shots = cfg.restarts;
  std::size_t locked = 0;
  std::size_t clusters = 0;
  for (auto& run : runs) {
    locked += run.locked ? 1 : 0;
    clusters += run.accepted_clusters;
    res.samples.push_back(std::move(run.spins));
  }
  attach_best_energy(res, p);
  res.details = {{"slices", cfg.slices},
                 {"beta", cfg.beta},
                 {"locked_fraction", static_cast<double>(locked) / static_cast<double>(cfg.restarts)},
                 {"accepted_cluster_moves", clusters}};
  return res;
}

AnnealResult sqa_anneal(const WeightedGraph& g, const QmcConfig& cfg, double penalty_factor) {
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!(g.weight(v) > 0.0)) throw InputError("sqa: vertex " + std::to_string(v) + " has a non-positive weight");
  }
  const double scale = g.empty() ? 1.0 : g.max_weight();
  std::vector<double> w(g.weights());
  for (double& x : w) x /= scale;
  const Encoding enc = encode_mwis(WeightedGraph(std::move(w), g.edges()), penalty_factor);
  AnnealResult r = sqa_anneal(enc.problem, cfg);
  r.details["weight_scale"] = scale;
  attach_mwis_decoding(r, g, enc.map);
  return r;
}

AgreementReport agreement_report(const AnnealResult& r, double ground_energy) {
  AgreementReport a;
  a.ground_energy = ground_energy;
  a.best_energy = r.best_energy;
  if (r.energies.empty()) return a;
  const double tol = 1e-9 * (1.0 + std::abs(ground_energy));
  std::size_t hits = 0;
  double residual = 0.0;
  for (double e : r.energies) {
    if (e <= ground_energy + tol) ++hits;
    residual += std::max(0.0, e - ground_energy);
  }
  const double n = static_cast<double>(r.energies.size());
  a.success_rate = static_cast<double>(hits) / n;
  a.mean_residual = residual / n;
  a.best_matches = hits > 0;
  if (hits == 0) {
    a.restarts_to_solution = std::numeric_limits<double>::infinity();
  } else if (a.success_rate >= 1.0) {
    a.restarts_to_solution = 1.0;
  } else {
    a.restarts_to_solution = std::ceil(std::log(0.01) / std::log(1.0 - a.success_rate));
  }
  return a;
}

AgreementReport agreement_report(const IsingProblem& p, const QmcConfig& cfg, const GroundState& oracle) {
  return agreement_report(sqa_anneal(p, cfg), oracle.energy);
}

const char* to_string(ReadoutPolicy r) { return r == ReadoutPolicy::best_slice ? "best-energy-slice" : "final-slice"; }

ReadoutPolicy readout_policy_from_string(const std::string& s) {
  if (s == "final-slice") return ReadoutPolicy::final_slice;
  if (s == "best-energy-slice") return ReadoutPolicy::best_slice;
  throw InputError("unknown readout policy '" + s + "' (expected final-slice|best-energy-slice)");
}

nlohmann::json to_json(const QmcConfig& c) {
  return {{"slices", c.slices},
          {"beta", c.beta},
          {"schedule_points", c.schedule_points},
          {"sweeps_per_point", c.sweeps_per_point},
          {"restarts", c.restarts},
          {"seed", c.seed},
          {"readout", to_string(c.readout)},
          {"driver_ratio", c.driver_ratio},
          {"shape", to_string(c.shape)},
          {"max_spins", c.max_spins}};
}

QmcConfig qmc_config_from_json(const nlohmann::json& j) {
  QmcConfig c;
  try {
    c.slices = j.value("slices", c.slices);
    c.beta = j.value("beta", c.beta);
    c.schedule_points = j.value("schedule_points", c.schedule_points);
    c.sweeps_per_point = j.value("sweeps_per_point", c.sweeps_per_point);
    c.restarts = j.value("restarts", c.restarts);
    c.seed = j.value("seed", c.seed);
    c.readout = readout_policy_from_string(j.value("readout", std::string(to_string(c.readout))));
    c.driver_ratio = j.value("driver_ratio", c.driver_ratio);
    c.shape = schedule_shape_from_string(j.value("shape", std::string(to_string(c.shape))));
    c.max_spins = j.value("max_spins", c.max_spins);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("qmc config JSON: ") + ex.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const AgreementReport& a) {
  return {{"success_rate", a.success_rate},
          {"mean_residual", a.mean_residual},
          {"restarts_to_solution", std::isfinite(a.restarts_to_solution) ? nlohmann::json(a.restarts_to_solution)
                                                                          : nlohmann::json(nullptr)},
          {"best_matches", a.best_matches},
          {"best_energy", a.best_energy},
          {"ground_energy", a.ground_energy}};
}

}  // namespace qamht
