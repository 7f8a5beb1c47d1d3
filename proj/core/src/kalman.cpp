#include "qamht/kalman.hpp"

#include <cmath>
#include <numbers>

#include "qamht/errors.hpp"

namespace qamht {

namespace {

void require_spd(const Eigen::Matrix4d& p, const char* where) {
  if (!is_spd(p)) throw NumericalError(std::string(where) + ": covariance is not symmetric positive definite");
}

}  // namespace

bool is_spd(const Eigen::Matrix4d& p) {
  if (!p.allFinite()) return false;
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
  Eigen::LLT<Eigen::Matrix4d> llt(p);
  return llt.info() == Eigen::Success;
}

KalmanState kalman_predict(const KalmanState& s, double dt, double q) {
  require_spd(s.P, "kalman_predict");
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  Eigen::Matrix4d qm = Eigen::Matrix4d::Zero();
  const double a = dt * dt * dt * dt / 4.0;
  const double b = dt * dt * dt / 2.0;
  const double c = dt * dt;
  for (int axis = 0; axis < 2; ++axis) {
    qm(axis, axis) = a * q;
    qm(axis, axis + 2) = qm(axis + 2, axis) = b * q;
    qm(axis + 2, axis + 2) = c * q;
  }
  KalmanState out;
  out.x = f * s.x;
  out.P = f * s.P * f.transpose() + qm;
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

Innovation kalman_innovation(const KalmanState& s, const Eigen::Vector2d& z, double sigma_m) {
  Innovation in;
  in.nu = z - s.x.head<2>();
  in.S = s.P.topLeftCorner<2, 2>();
  in.S.diagonal().array() += sigma_m * sigma_m;
  Eigen::LLT<Eigen::Matrix2d> llt(in.S);
  if (llt.info() != Eigen::Success) throw NumericalError("kalman update: innovation covariance is not positive definite");
  const Eigen::Vector2d w = llt.matrixL().solve(in.nu);
  in.distance2 = w.squaredNorm();
  const double log_det = 2.0 * std::log(llt.matrixL()(0, 0) * llt.matrixL()(1, 1));
  in.log_likelihood = -0.5 * in.distance2 - std::log(2.0 * std::numbers::pi) - 0.5 * log_det;
  return in;
}

KalmanUpdate kalman_update(const KalmanState& s, const Eigen::Vector2d& z, double sigma_m) {
  require_spd(s.P, "kalman_update");
  KalmanUpdate out;
  out.innovation = kalman_innovation(s, z, sigma_m);
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix<double, 4, 2> k = s.P * h.transpose() * out.innovation.S.inverse();
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * h;
  out.state.x = s.x + k * out.innovation.nu;
  out.state.P = ikh * s.P * ikh.transpose() + (sigma_m * sigma_m) * (k * k.transpose());
  out.state.P = 0.5 * (out.state.P + out.state.P.transpose());
  return out;
}

}  // namespace qamht
