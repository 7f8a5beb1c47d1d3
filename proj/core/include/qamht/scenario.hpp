#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

namespace qamht {

/// Axis-aligned surveillance box.
struct Region {
  double x_min = 0.0;
  double x_max = 1000.0;
  double y_min = 0.0;
  double y_max = 1000.0;

  [[nodiscard]] double volume() const { return (x_max - x_min) * (y_max - y_min); }
  [[nodiscard]] bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

/// Position and velocity of a constant-velocity target.
struct TargetState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct ScenarioConfig {
  std::vector<TargetState> targets;
  double dt = 1.0;
  std::size_t scans = 20;
  double sigma_m = 5.0;
  double p_detect = 0.9;
  /// Expected false measurements per unit area per scan.
  double lambda_c = 1e-5;
  Region region;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Targets entering on the left at evenly spaced heights, crossing about
/// 40% of the region over the run, with small opposite vertical drifts.
std::vector<TargetState> default_targets(std::size_t count, const Region& region, std::size_t scans, double dt);

/// Config with default_targets for `targets` objects.
ScenarioConfig default_scenario_config(std::size_t targets);

struct Measurement {
  std::size_t scan = 0;
  std::size_t id = 0;   ///< index within its scan
  double x = 0.0;
  double y = 0.0;
  int source = -1;      ///< target index, or -1 for clutter (evaluation only)
};

struct Scenario {
  ScenarioConfig config;
  std::vector<std::vector<TargetState>> truth;     ///< [target][scan]
  std::vector<std::vector<Measurement>> scans;     ///< [scan][id]
};

/// Detections with probability p_detect at truth + N(0, sigma_m^2), Poisson
/// clutter with mean lambda_c * V uniform over the region, shuffled. Target
/// and clutter draws use separate streams, so changing lambda_c leaves the
/// target detections untouched.
Scenario generate_scenario(const ScenarioConfig& cfg);

nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace qamht
