#pragma once

#include <Eigen/Dense>

namespace qamht {

/// Constant-velocity state [x, y, vx, vy] with covariance.
struct KalmanState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
};

struct Innovation {
  Eigen::Vector2d nu = Eigen::Vector2d::Zero();
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  double distance2 = 0.0;       ///< nu' S^-1 nu
  double log_likelihood = 0.0;  ///< log N(nu; 0, S)
};

/// Discrete white-noise acceleration with variance q per axis.
KalmanState kalman_predict(const KalmanState& s, double dt, double q);

/// Innovation of a position measurement against a (predicted) state.
Innovation kalman_innovation(const KalmanState& s, const Eigen::Vector2d& z, double sigma_m);

struct KalmanUpdate {
  KalmanState state;
  Innovation innovation;
};

/// Joseph-form update. Throws NumericalError if S is not positive definite.
KalmanUpdate kalman_update(const KalmanState& s, const Eigen::Vector2d& z, double sigma_m);

/// Chi-square gate with 2 degrees of freedom at 0.99.
inline constexpr double kDefaultGate = 9.21;

inline bool gate(const Innovation& in, double threshold = kDefaultGate) { return in.distance2 <= threshold; }

/// True if s is symmetric within 1e-9 relative and has a Cholesky factor.
bool is_spd(const Eigen::Matrix4d& p);

}  // namespace qamht
