#include "qamht/device.hpp"

#include <algorithm>
#include <cmath>

#include "qamht/errors.hpp"
#include "qamht/io.hpp"

namespace qamht {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// hbar / k_B in kelvin seconds.
constexpr double kHbarOverKb = 7.638232577577646e-12;

struct Spectrum {
  double k;  // mean of the squared energies
  double r;  // quarter of their splitting
};

// H^2 = K +- 2R, each twice degenerate.
Spectrum spectrum(double eps, const QubitParams& q) {
  const double as2 = q.alpha_s * q.alpha_s;
  const double aa2 = q.alpha_as * q.alpha_as;
  const double k = eps * eps / 4.0 + q.gamma * q.gamma + as2 / 4.0 + aa2 / 4.0;
  const double r = 0.25 * std::sqrt(eps * eps * (as2 + aa2) + 4.0 * q.gamma * q.gamma * as2);
  return {k, r};
}

// Spin-orbit admixture of the spin and orbital excitations.
double admixture(double eps, const QubitParams& q) {
  if (q.alpha_as == 0.0) return 0.0;
  const double orbital = std::hypot(eps, 2.0 * q.gamma);
  return std::abs(q.alpha_as) / std::hypot(q.alpha_as, orbital - q.alpha_s);
}

}  // namespace

void QubitParams::validate() const {
  require(finite_all({gamma, alpha_s, alpha_as, g0}), "qubit parameters must be finite");
  require(gamma > 0.0, "qubit parameter gamma must be positive");
  require(g0 >= 0.0, "qubit parameter g0 must be non-negative");
}

void ResonatorParams::validate() const {
  require(finite_all({omega_c, kappa}), "resonator parameters must be finite");
  require(omega_c > 0.0, "resonator omega_c must be positive");
  require(kappa >= 0.0, "resonator kappa must be non-negative");
}

void NoiseParams::validate() const {
  require(finite_all({charge_noise, phonon_relax, temperature}), "noise parameters must be finite");
  require(charge_noise >= 0.0 && phonon_relax >= 0.0 && temperature >= 0.0,
          "noise parameters must be non-negative");
}

NoiseParams default_noise() {
  NoiseParams n;
  n.charge_noise = 1.0e9;
  n.phonon_relax = 2.0e3;
  return n;
}

DeviceConfig default_device_config() {
  DeviceConfig c;
  c.noise = default_noise();
  return c;
}

std::vector<QubitParams> device_qubits(const DeviceConfig& c, std::size_t n) {
  if (c.qubits.empty()) return std::vector<QubitParams>(n);
  if (c.qubits.size() == 1) return std::vector<QubitParams>(n, c.qubits.front());
  if (c.qubits.size() != n) {
    throw InputError("device config lists " + std::to_string(c.qubits.size()) + " qubits but the problem has " +
                     std::to_string(n));
  }
  return c.qubits;
}

double TimeGrid::time(std::size_t i) const {
  return i == steps ? t_final : t_final * static_cast<double>(i) / static_cast<double>(steps);
}

std::size_t TimeGrid::index_of(double t) const {
  const double x = t / dt();
  const double r = std::round(x);
  if (!(r >= 0.0) || r > static_cast<double>(steps) || std::abs(x - r) > 1e-6) {
    throw InputError("time " + io::format_number(t) + " s is not on the trajectory grid");
  }
  return static_cast<std::size_t>(r);
}

void TimeGrid::validate() const {
  require(std::isfinite(t_final) && t_final > 0.0, "time grid needs t_final > 0");
  require(steps >= 1, "time grid needs at least one step");
}

void BiasTrajectory::validate() const {
  grid.validate();
  require(eps.size() == eps_dot.size(), "bias trajectory: eps and eps_dot qubit counts differ");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    require(eps[k].size() == grid.points() && eps_dot[k].size() == grid.points(),
            "bias trajectory: qubit " + std::to_string(k) + " does not cover the grid");
    for (std::size_t i = 0; i < grid.points(); ++i) {
      require(std::isfinite(eps[k][i]) && std::isfinite(eps_dot[k][i]),
              "bias trajectory: non-finite value for qubit " + std::to_string(k));
    }
  }
}

BiasTrajectory bias_from_samples(const TimeGrid& grid, std::vector<std::vector<double>> eps) {
  grid.validate();
  BiasTrajectory b;
  b.grid = grid;
  const double h = grid.dt();
  const std::size_t m = grid.points();
  b.eps_dot.resize(eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const auto& e = eps[k];
    require(e.size() == m, "bias samples for qubit " + std::to_string(k) + " do not cover the grid");
    auto& d = b.eps_dot[k];
    d.resize(m);
    if (m == 2) {
      d[0] = d[1] = (e[1] - e[0]) / h;
      continue;
    }
    d[0] = (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (e[i + 1] - e[i - 1]) / (2.0 * h);
    d[m - 1] = (3.0 * e[m - 1] - 4.0 * e[m - 2] + e[m - 3]) / (2.0 * h);
  }
  b.eps = std::move(eps);
  b.validate();
  return b;
}

BiasTrajectory bias_from_schedule(const Schedule& s, double eps_max, std::size_t qubits,
                                  std::size_t steps) {
  BiasTrajectory b;
  b.grid = {s.t_final, steps};
  b.grid.validate();
  std::vector<double> e(b.grid.points());
  std::vector<double> d(b.grid.points());
  for (std::size_t i = 0; i < b.grid.points(); ++i) {
    const double t = b.grid.time(i);
    e[i] = eps_max * (1.0 - schedule_eval(s, t).target);
    d[i] = -eps_max * schedule_rate(s, t).target;
  }
  b.eps.assign(qubits, e);
  b.eps_dot.assign(qubits, d);
  return b;
}

double qubit_frequency(double eps, const QubitParams& q) {
  const auto [k, r] = spectrum(eps, q);
  return std::sqrt(k + 2.0 * r) - std::sqrt(std::max(0.0, k - 2.0 * r));
}

double qubit_frequency_slope(double eps, const QubitParams& q) {
  if (eps == 0.0) return 0.0;
  const auto [k, r] = spectrum(eps, q);
  const double s2 = q.alpha_s * q.alpha_s + q.alpha_as * q.alpha_as;
  const double dk = eps / 2.0;
  const double dr = r > 0.0 ? eps * s2 / (16.0 * r) : std::copysign(std::sqrt(s2) / 4.0, eps);
  const double hi = std::sqrt(k + 2.0 * r);
  const double lo = std::sqrt(std::max(0.0, k - 2.0 * r));
  const double d_hi = (dk + 2.0 * dr) / (2.0 * hi);
  const double d_lo = lo > 0.0 ? (dk - 2.0 * dr) / (2.0 * lo) : 0.0;
  return d_hi - d_lo;
}

double mixing_angle(double eps, const QubitParams& q) { return std::atan2(2.0 * q.gamma, eps); }

double mixing_angle_slope(double eps, const QubitParams& q) {
  return -2.0 * q.gamma / (eps * eps + 4.0 * q.gamma * q.gamma);
}

DipoleCouplings dipole_couplings(double eps, const QubitParams& q) {
  const double orbital = std::hypot(eps, 2.0 * q.gamma);
  const double sin_phi = 2.0 * q.gamma / orbital;
  const double cos_phi = eps / orbital;
  const double eta = admixture(eps, q);
  return {q.g0 * sin_phi * eta, q.g0 * cos_phi * sin_phi * eta};
}

double theta_rate(double eps, double eps_dot, const QubitParams& q) {
  return mixing_angle_slope(eps, q) * eps_dot;
}

double diabatic_theta(const BiasTrajectory& traj, std::size_t k, const QubitParams& q, double t) {
  if (k >= traj.qubits()) throw InputError("diabatic_theta: qubit index out of range");
  const std::size_t i = traj.grid.index_of(t);
  return theta_rate(traj.eps[k][i], traj.eps_dot[k][i], q);
}

double pair_coupling(const SwCoefficients& a, double g_a, const SwCoefficients& b, double g_b) {
  return a.alpha.real() * g_b + b.alpha.real() * g_a;
}

std::vector<double> ising_couplings(const std::vector<SwCoefficients>& sw,
                                    const std::vector<double>& g_sigma) {
  if (sw.size() != g_sigma.size()) throw InputError("ising_couplings: size mismatch");
  const std::size_t n = sw.size();
  std::vector<double> j(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = pair_coupling(sw[a], g_sigma[a], sw[b], g_sigma[b]);
      j[a * n + b] = v;
      j[b * n + a] = v;
    }
  }
  return j;
}

double static_coupling(double g_k, double omega_k, double g_j, double omega_j, double omega_c) {
  const double dk = omega_k - omega_c;
  const double dj = omega_j - omega_c;
  const double sk = omega_k + omega_c;
  const double sj = omega_j + omega_c;
  return 0.5 * g_k * g_j * (1.0 / dk + 1.0 / dj - 1.0 / sk - 1.0 / sj);
}

LindbladRates lindblad_rates(const SwCoefficients& sw, double omega_q, double d_omega_d_eps,
                             const NoiseParams& noise, const ResonatorParams& r) {
  const double co_rotating = std::norm(sw.alpha + Complex(0.0, 1.0) * sw.beta);
  const double base = r.kappa * co_rotating + noise.phonon_relax;
  LindbladRates out;
  out.relax = base;
  if (noise.temperature > 0.0 && omega_q > 0.0) {
    const double n_th = 1.0 / std::expm1(kHbarOverKb * omega_q / noise.temperature);
    out.relax = base * (1.0 + n_th);
    out.excite = base * n_th;
  }
  out.dephase = noise.charge_noise * d_omega_d_eps * d_omega_d_eps + 2.0 * r.kappa * std::norm(sw.gamma);
  return out;
}

double interpolate(const TimeGrid& grid, const std::vector<double>& series, double t) {
  const double x = std::clamp(t / grid.dt(), 0.0, static_cast<double>(grid.steps));
  const auto i = std::min(static_cast<std::size_t>(x), grid.steps - 1);
  const double f = x - static_cast<double>(i);
  return series[i] + f * (series[i + 1] - series[i]);
}

DeviceTrajectory build_device_trajectory(const BiasTrajectory& bias,
                                         const std::vector<QubitParams>& qubits,
                                         const ResonatorParams& r, const NoiseParams& noise,
                                         SwIntegrator method) {
  bias.validate();
  r.validate();
  noise.validate();
  if (qubits.size() != bias.qubits()) {
    throw InputError("device: " + std::to_string(qubits.size()) + " qubit parameter sets for " +
                     std::to_string(bias.qubits()) + " bias traces");
  }
  for (const auto& q : qubits) q.validate();

  DeviceTrajectory d;
  d.grid = bias.grid;
  d.qubits = qubits.size();
  d.eps = bias.eps;
  const std::size_t m = d.grid.points();
  auto per_qubit = [&] { return std::vector<std::vector<double>>(d.qubits, std::vector<double>(m)); };
  d.omega = per_qubit();
  d.theta = per_qubit();
  d.g_sigma = per_qubit();
  d.lambda_sigma = per_qubit();
  d.sw.resize(d.qubits);
  d.rates.assign(d.qubits, std::vector<LindbladRates>(m));

  for (std::size_t k = 0; k < d.qubits; ++k) {
    const auto& q = qubits[k];
    SwDrive drive;
    drive.grid = d.grid;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = bias.eps[k][i];
      d.omega[k][i] = qubit_frequency(e, q);
      d.theta[k][i] = theta_rate(e, bias.eps_dot[k][i], q);
      const auto c = dipole_couplings(e, q);
      d.g_sigma[k][i] = c.g_sigma;
      d.lambda_sigma[k][i] = c.lambda_sigma;
    }
    drive.omega_q = d.omega[k];
    drive.theta = d.theta[k];
    drive.g_sigma = d.g_sigma[k];
    drive.lambda_sigma = d.lambda_sigma[k];
    d.sw[k] = solve_sw_ode(drive, r.omega_c, method);
    d.max_sw_magnitude = std::max(d.max_sw_magnitude, sw_magnitude(d.sw[k]));
    for (std::size_t i = 0; i < m; ++i) {
      d.rates[k][i] = lindblad_rates(d.sw[k][i], d.omega[k][i],
                                     qubit_frequency_slope(bias.eps[k][i], q), noise, r);
    }
  }

  d.couplings.resize(m);
  std::vector<SwCoefficients> sw_t(d.qubits);
  std::vector<double> g_t(d.qubits);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d.qubits; ++k) {
      sw_t[k] = d.sw[k][i];
      g_t[k] = d.g_sigma[k][i];
    }
    d.couplings[i] = ising_couplings(sw_t, g_t);
  }
  if (d.max_sw_magnitude > kDispersiveWarn) {
    d.warnings.push_back("generator coefficients reach " + io::format_number(d.max_sw_magnitude) +
                         ", outside the dispersive regime");
  }
  return d;
}

std::string trajectory_csv(const DeviceTrajectory& d) {
  std::vector<std::string> header{"t"};
  for (const char* name : {"omega", "theta", "g_sigma", "lambda_sigma", "relax", "dephase"}) {
    for (std::size_t k = 0; k < d.qubits; ++k) header.push_back(std::string(name) + "_" + std::to_string(k));
  }
  io::CsvWriter csv(std::move(header));
  for (std::size_t i = 0; i < d.grid.points(); ++i) {
    csv.add(d.grid.time(i));
    for (const auto* series : {&d.omega, &d.theta, &d.g_sigma, &d.lambda_sigma}) {
      for (std::size_t k = 0; k < d.qubits; ++k) csv.add((*series)[k][i]);
    }
    for (std::size_t k = 0; k < d.qubits; ++k) csv.add(d.rates[k][i].relax);
    for (std::size_t k = 0; k < d.qubits; ++k) csv.add(d.rates[k][i].dephase);
    csv.end_row();
  }
  return csv.str();
}

const char* to_string(SwIntegrator m) { return m == SwIntegrator::rk4 ? "rk4" : "exponential"; }

nlohmann::json to_json(const QubitParams& q) {
  return {{"gamma", q.gamma}, {"alpha_s", q.alpha_s}, {"alpha_as", q.alpha_as}, {"g0", q.g0}};
}

nlohmann::json to_json(const ResonatorParams& r) {
  return {{"omega_c", r.omega_c}, {"kappa", r.kappa}};
}

nlohmann::json to_json(const NoiseParams& n) {
  return {{"charge_noise", n.charge_noise}, {"phonon_relax", n.phonon_relax}, {"temperature", n.temperature}};
}

nlohmann::json to_json(const DeviceConfig& c) {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : c.qubits) qs.push_back(to_json(q));
  return {{"qubits", qs},
          {"resonator", to_json(c.resonator)},
          {"noise", to_json(c.noise)},
          {"eps_max_over_gamma", c.eps_max_over_gamma},
          {"grid_steps", c.grid_steps}};
}

DeviceConfig device_config_from_json(const nlohmann::json& j) {
  DeviceConfig c;
  c.noise = default_noise();
  try {
    for (const auto& qj : j.value("qubits", nlohmann::json::array())) {
      QubitParams q;
      q.gamma = qj.value("gamma", q.gamma);
      q.alpha_s = qj.value("alpha_s", q.alpha_s);
      q.alpha_as = qj.value("alpha_as", q.alpha_as);
      q.g0 = qj.value("g0", q.g0);
      q.validate();
      c.qubits.push_back(q);
    }
    if (j.contains("resonator")) {
      const auto& rj = j.at("resonator");
      c.resonator.omega_c = rj.value("omega_c", c.resonator.omega_c);
      c.resonator.kappa = rj.value("kappa", c.resonator.kappa);
    }
    if (j.contains("noise")) {
      const auto& nj = j.at("noise");
      c.noise.charge_noise = nj.value("charge_noise", c.noise.charge_noise);
      c.noise.phonon_relax = nj.value("phonon_relax", c.noise.phonon_relax);
      c.noise.temperature = nj.value("temperature", c.noise.temperature);
    }
    c.eps_max_over_gamma = j.value("eps_max_over_gamma", c.eps_max_over_gamma);
    c.grid_steps = j.value("grid_steps", c.grid_steps);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("device JSON: ") + ex.what());
  }
  c.resonator.validate();
  c.noise.validate();
  require(c.grid_steps >= 1, "device JSON: grid_steps must be >= 1");
  require(std::isfinite(c.eps_max_over_gamma) && c.eps_max_over_gamma >= 0.0,
          "device JSON: eps_max_over_gamma must be non-negative");
  return c;
}

}  // namespace qamht
