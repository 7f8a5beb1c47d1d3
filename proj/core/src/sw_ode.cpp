#include <cmath>

#include <Eigen/Dense>

#include "qamht/device.hpp"
#include "qamht/errors.hpp"
#include "qamht/io.hpp"

namespace qamht {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

constexpr Complex kI{0.0, 1.0};

// Real antisymmetric part of the generator: x' = (i wc + K) x + b.
Eigen::Matrix3d rotation_part(double omega_q, double theta) {
  Eigen::Matrix3d k;
  k << 0.0, omega_q, -theta,
       -omega_q, 0.0, 0.0,
       theta, 0.0, 0.0;
  return k;
}

Mat3 generator(double omega_q, double theta, double omega_c) {
  Mat3 l = rotation_part(omega_q, theta).cast<Complex>();
  l.diagonal().array() += kI * omega_c;
  return l;
}

Vec3 drive_vector(double g, double lambda) { return {kI * g, 0.0, kI * lambda}; }

Vec3 pack(const SwCoefficients& c) { return {c.alpha, c.beta, c.gamma}; }
SwCoefficients unpack(const Vec3& v) { return {v(0), v(1), v(2)}; }

// exp(L h) for L = i wc + K, with K = [k]x a rotation generator (Rodrigues).
Mat3 propagator(double omega_q, double theta, double omega_c, double h) {
  const Eigen::Matrix3d k = rotation_part(omega_q, theta);
  const double norm = std::hypot(omega_q, theta);
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  if (norm > 0.0) {
    const double a = norm * h;
    rot += (std::sin(a) / norm) * k + ((1.0 - std::cos(a)) / (norm * norm)) * (k * k);
  }
  return std::exp(kI * (omega_c * h)) * rot.cast<Complex>();
}

void check_finite(const Vec3& x, std::size_t step) {
  if (!x.allFinite()) {
    throw NumericalError("generator ODE diverged at step " + std::to_string(step) +
                         "; the drive is probably resonant with the cavity");
  }
}

}  // namespace

SwCoefficients sw_fixed_point(double omega_q, double theta, double g_sigma, double lambda_sigma,
                              double omega_c) {
  const Mat3 l = generator(omega_q, theta, omega_c);
  Eigen::PartialPivLU<Mat3> lu(l);
  if (std::abs(lu.determinant()) < 1e-300) {
    throw NumericalError("generator ODE has no fixed point: qubit resonant with the cavity");
  }
  const Vec3 x = -lu.solve(drive_vector(g_sigma, lambda_sigma));
  return unpack(x);
}

std::vector<SwCoefficients> solve_sw_ode(const SwDrive& drive, double omega_c, SwIntegrator method,
                                         const SwCoefficients* initial) {
  drive.grid.validate();
  const std::size_t m = drive.grid.points();
  if (drive.omega_q.size() != m || drive.theta.size() != m || drive.g_sigma.size() != m ||
      drive.lambda_sigma.size() != m) {
    throw InputError("generator ODE: drive series do not match the grid");
  }
  const double h = drive.grid.dt();
  if (method == SwIntegrator::rk4 && omega_c * h >= 0.1) {
    throw ConfigError("generator ODE: omega_c * dt = " + io::format_number(omega_c * h) +
                      " violates the RK4 step guard (< 0.1); use more grid steps");
  }

  std::vector<SwCoefficients> out(m);
  Vec3 x = initial ? pack(*initial)
                   : pack(sw_fixed_point(drive.omega_q[0], drive.theta[0], drive.g_sigma[0],
                                         drive.lambda_sigma[0], omega_c));
  out[0] = unpack(x);

  for (std::size_t i = 0; i + 1 < m; ++i) {
    const Vec3 b0 = drive_vector(drive.g_sigma[i], drive.lambda_sigma[i]);
    const Vec3 b1 = drive_vector(drive.g_sigma[i + 1], drive.lambda_sigma[i + 1]);
    if (method == SwIntegrator::exponential) {
      // Frozen midpoint rotation, drive linear over the step; exact for that model.
      const double wq = 0.5 * (drive.omega_q[i] + drive.omega_q[i + 1]);
      const double th = 0.5 * (drive.theta[i] + drive.theta[i + 1]);
      const Mat3 l = generator(wq, th, omega_c);
      const Mat3 e = propagator(wq, th, omega_c, h);
      const Mat3 l_inv = l.inverse();
      const Mat3 em1 = e - Mat3::Identity();
      x = e * x + l_inv * (em1 * b0) + (l_inv * l_inv * em1 / h - l_inv) * (b1 - b0);
    } else {
      auto rhs = [&](double s, const Vec3& y) {
        const double wq = drive.omega_q[i] + s * (drive.omega_q[i + 1] - drive.omega_q[i]);
        const double th = drive.theta[i] + s * (drive.theta[i + 1] - drive.theta[i]);
        const Vec3 b = b0 + s * (b1 - b0);
        return Vec3(generator(wq, th, omega_c) * y + b);
      };
      const Vec3 k1 = rhs(0.0, x);
      const Vec3 k2 = rhs(0.5, x + 0.5 * h * k1);
      const Vec3 k3 = rhs(0.5, x + 0.5 * h * k2);
      const Vec3 k4 = rhs(1.0, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    check_finite(x, i + 1);
    out[i + 1] = unpack(x);
  }
  return out;
}

double sw_magnitude(const std::vector<SwCoefficients>& sw) {
  double m = 0.0;
  for (const auto& c : sw) m = std::max({m, std::abs(c.alpha), std::abs(c.beta), std::abs(c.gamma)});
  return m;
}

}  // namespace qamht
