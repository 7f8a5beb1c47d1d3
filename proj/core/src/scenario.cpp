#include "qamht/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qamht/errors.hpp"
#include "qamht/rng.hpp"

namespace qamht {

void ScenarioConfig::validate() const {
  if (!(lambda_c >= 0.0) || !std::isfinite(lambda_c)) throw InputError("scenario: lambda_c must be >= 0");
  if (!(p_detect > 0.0 && p_detect <= 1.0)) throw InputError("scenario: p_detect must lie in (0, 1]");
  if (!(region.x_max > region.x_min && region.y_max > region.y_min)) throw InputError("scenario: region is degenerate");
  if (!(sigma_m >= 0.0) || !std::isfinite(sigma_m)) throw InputError("scenario: sigma_m must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("scenario: dt must be positive");
  if (scans < 1) throw InputError("scenario: at least one scan is required");
}

std::vector<TargetState> default_targets(std::size_t count, const Region& region, std::size_t scans, double dt) {
  const double w = region.x_max - region.x_min;
  const double h = region.y_max - region.y_min;
  const double duration = static_cast<double>(std::max<std::size_t>(scans, 1)) * dt;
  std::vector<TargetState> out;
  for (std::size_t i = 0; i < count; ++i) {
    TargetState t;
    t.x = region.x_min + 0.15 * w;
    t.y = region.y_min + h * static_cast<double>(i + 1) / static_cast<double>(count + 1);
    t.vx = 0.4 * w / duration;
    t.vy = (i % 2 == 0 ? 1.0 : -1.0) * 0.03 * h / duration;
    out.push_back(t);
  }
  return out;
}

ScenarioConfig default_scenario_config(std::size_t targets) {
  ScenarioConfig c;
  c.targets = default_targets(targets, c.region, c.scans, c.dt);
  return c;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Scenario s;
  s.config = cfg;
  s.truth.resize(cfg.targets.size());
  for (std::size_t t = 0; t < cfg.targets.size(); ++t) {
    TargetState st = cfg.targets[t];
    for (std::size_t k = 0; k < cfg.scans; ++k) {
      s.truth[t].push_back(st);
      st.x += st.vx * cfg.dt;
      st.y += st.vy * cfg.dt;
    }
  }
  const Region& r = cfg.region;
  s.scans.resize(cfg.scans);
  for (std::size_t k = 0; k < cfg.scans; ++k) {
    auto& scan = s.scans[k];
    for (std::size_t t = 0; t < cfg.targets.size(); ++t) {
      Engine eng = make_stream(cfg.seed, k * 65536 + t, rng_domain::kScenario);
      const bool detected = uniform01(eng) < cfg.p_detect;
      std::normal_distribution<double> noise(0.0, 1.0);
      const double x = s.truth[t][k].x + cfg.sigma_m * noise(eng);
      const double y = s.truth[t][k].y + cfg.sigma_m * noise(eng);
      if (detected && r.contains(x, y)) scan.push_back({k, 0, x, y, static_cast<int>(t)});
    }
    Engine clutter = make_stream(cfg.seed, k, rng_domain::kClutter);
    const double mean = cfg.lambda_c * r.volume();
    const auto count = mean > 0.0 ? std::poisson_distribution<std::size_t>(mean)(clutter) : 0;
    for (std::size_t c = 0; c < count; ++c) {
      const double x = r.x_min + (r.x_max - r.x_min) * uniform01(clutter);
      const double y = r.y_min + (r.y_max - r.y_min) * uniform01(clutter);
      scan.push_back({k, 0, x, y, -1});
    }
    Engine shuffle = make_stream(cfg.seed, k, rng_domain::kShuffle);
    std::shuffle(scan.begin(), scan.end(), shuffle);
    for (std::size_t i = 0; i < scan.size(); ++i) scan[i].id = i;
  }
  return s;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json targets = nlohmann::json::array();
  for (const auto& t : c.targets) targets.push_back({{"x", t.x}, {"y", t.y}, {"vx", t.vx}, {"vy", t.vy}});
  return {{"targets", targets},
          {"dt", c.dt},
          {"scans", c.scans},
          {"sigma_m", c.sigma_m},
          {"p_detect", c.p_detect},
          {"lambda_c", c.lambda_c},
          {"region", {c.region.x_min, c.region.x_max, c.region.y_min, c.region.y_max}},
          {"seed", c.seed}};
}

ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    for (const auto& t : j.at("targets")) {
      c.targets.push_back({t.at("x").get<double>(), t.at("y").get<double>(), t.at("vx").get<double>(),
                           t.at("vy").get<double>()});
    }
    c.dt = j.value("dt", c.dt);
    c.scans = j.value("scans", c.scans);
    c.sigma_m = j.value("sigma_m", c.sigma_m);
    c.p_detect = j.value("p_detect", c.p_detect);
    c.lambda_c = j.value("lambda_c", c.lambda_c);
    if (j.contains("region")) {
      const auto r = j.at("region").get<std::vector<double>>();
      if (r.size() != 4) throw InputError("scenario JSON: region must be [x_min, x_max, y_min, y_max]");
      c.region = {r[0], r[1], r[2], r[3]};
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("scenario JSON: ") + ex.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json truth = nlohmann::json::array();
  for (const auto& track : s.truth) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : track) pts.push_back({p.x, p.y, p.vx, p.vy});
    truth.push_back(std::move(pts));
  }
  nlohmann::json scans = nlohmann::json::array();
  for (const auto& scan : s.scans) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : scan) ms.push_back({{"id", m.id}, {"x", m.x}, {"y", m.y}, {"source", m.source}});
    scans.push_back(std::move(ms));
  }
  return {{"config", to_json(s.config)}, {"truth", std::move(truth)}, {"scans", std::move(scans)}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.config = scenario_config_from_json(j.at("config"));
    for (const auto& track : j.at("truth")) {
      std::vector<TargetState> pts;
      for (const auto& p : track) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>(), p.at(3).get<double>()});
      s.truth.push_back(std::move(pts));
    }
    std::size_t k = 0;
    for (const auto& scan : j.at("scans")) {
      std::vector<Measurement> ms;
      for (const auto& m : scan) {
        Measurement meas{k, m.at("id").get<std::size_t>(), m.at("x").get<double>(), m.at("y").get<double>(),
                         m.value("source", -1)};
        if (meas.id != ms.size()) throw InputError("scenario JSON: measurement ids must be 0..n-1 within a scan");
        if (!s.config.region.contains(meas.x, meas.y)) {
          throw InputError("scenario JSON: measurement outside the region in scan " + std::to_string(k));
        }
        ms.push_back(meas);
      }
      s.scans.push_back(std::move(ms));
      ++k;
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("scenario JSON: ") + ex.what());
  }
  if (s.scans.size() != s.config.scans) throw InputError("scenario JSON: scan count does not match the config");
  return s;
}

}  // namespace qamht
