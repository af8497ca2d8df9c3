#include "tsd/kalman.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace tsd {

MeasurementVector to_measurement(const BBox& box) {
  const double h = box.height();
  return {box.center_x(), box.center_y(), box.width() / h, h};
}

BBox to_bbox(const MeasurementVector& m) {
  const double h = m[3];
  const double w = m[2] * h;
  return {m[0] - 0.5 * w, m[1] - 0.5 * h, m[0] + 0.5 * w, m[1] + 0.5 * h};
}

KalmanFilter::KalmanFilter(const KalmanConfig& config) : config_(config) {
  motion_.setIdentity();
  for (int i = 0; i < 4; ++i) motion_(i, 4 + i) = 1.0;
}

KalmanState KalmanFilter::initiate(const MeasurementVector& z) const {
  KalmanState s;
  s.mean.head<4>() = z;
  s.mean.tail<4>().setZero();
  const double h = z[3];
  const double wp = config_.std_weight_position, wv = config_.std_weight_velocity;
  Eigen::Matrix<double, 8, 1> std;
  std << 2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h, 10 * wv * h, 10 * wv * h, 1e-5, 10 * wv * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanState KalmanFilter::predict(const KalmanState& state) const {
  if (!state.mean.allFinite() || !state.covariance.allFinite())
    throw ValidationError("Kalman state is not finite");
  const double h = state.mean[3];
  const double wp = config_.std_weight_position, wv = config_.std_weight_velocity;
  Eigen::Matrix<double, 8, 1> std;
  std << wp * h, wp * h, 1e-2, wp * h, wv * h, wv * h, 1e-5, wv * h;
  const StateCovariance q =
      (config_.process_noise_scale * std.array().square()).matrix().asDiagonal();
  KalmanState out;
  out.mean = motion_ * state.mean;
  out.covariance = motion_ * state.covariance * motion_.transpose() + q;
  return out;
}

MeasurementCovariance KalmanFilter::measurement_noise(double h, double confidence) const {
  const double wp = config_.std_weight_position;
  Eigen::Vector4d var;
  var << wp * h, wp * h, 1e-1, wp * h;
  var = var.array().square();
  const double floor_std = config_.measurement_std_floor * std::fabs(h);
  const double floor_var = floor_std * floor_std;
  const double scale = 1.0 - std::clamp(confidence, 0.0, 1.0);
  for (int i = 0; i < 4; ++i) var[i] = std::max(scale * var[i], floor_var);
  return var.asDiagonal();
}

void KalmanFilter::project(const KalmanState& state, double confidence, MeasurementVector& mean,
                           MeasurementCovariance& cov) const {
  mean = state.mean.head<4>();
  cov = state.covariance.topLeftCorner<4, 4>() + measurement_noise(state.mean[3], confidence);
}

KalmanState KalmanFilter::update(const KalmanState& state, const MeasurementVector& z,
                                 double confidence) const {
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw ValidationError("confidence outside [0,1]");
  if (!z.allFinite()) throw ValidationError("measurement is not finite");
  MeasurementVector projected;
  MeasurementCovariance s;
  project(state, confidence, projected, s);
  const Eigen::LLT<MeasurementCovariance> llt(s);
  if (llt.info() != Eigen::Success) throw ValidationError("innovation covariance is degenerate");
  // K = P H^T S^-1, with H selecting the first four state components.
  const Eigen::Matrix<double, 8, 4> pht = state.covariance.leftCols<4>();
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();
  KalmanState out;
  out.mean = state.mean + gain * (z - projected);
  out.covariance = state.covariance - gain * s * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

double KalmanFilter::gating_distance(const KalmanState& state, const MeasurementVector& z) const {
  MeasurementVector projected;
  MeasurementCovariance s;
  project(state, 0.0, projected, s);
  const Eigen::LLT<MeasurementCovariance> llt(s);
  if (llt.info() != Eigen::Success) throw ValidationError("innovation covariance is degenerate");
  const MeasurementVector d = z - projected;
  const MeasurementVector y = llt.matrixL().solve(d);
  return y.squaredNorm();
}

}  // namespace tsd
