#pragma once

// Constant-velocity Kalman filter over (cx, cy, aspect, h) box states, with
// measurement noise scaled by detection confidence.

#include <Eigen/Core>

#include "tsd/common.hpp"

namespace tsd {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;
using MeasurementCovariance = Eigen::Matrix<double, 4, 4>;

/// mean = (cx, cy, aspect = w/h, h, and per-frame velocities of each).
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();
};

MeasurementVector to_measurement(const BBox& box);
BBox to_bbox(const MeasurementVector& m);

struct KalmanConfig {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
  /// Multiplies the process noise; 0 gives a noise-free motion model.
  double process_noise_scale = 1.0;
  /// Lower bound on the measurement-noise standard deviation, relative to h.
  double measurement_std_floor = 1e-6;

  friend bool operator==(const KalmanConfig&, const KalmanConfig&) = default;
};

class KalmanFilter {
 public:
  explicit KalmanFilter(const KalmanConfig& config = {});

  KalmanState initiate(const MeasurementVector& measurement) const;
  /// One frame of constant-velocity motion. Throws ValidationError on a non-finite state.
  KalmanState predict(const KalmanState& state) const;
  /// Projects into measurement space with noise R scaled by (1 - confidence).
  void project(const KalmanState& state, double confidence, MeasurementVector& mean,
               MeasurementCovariance& cov) const;
  /// Throws ValidationError when the innovation covariance is not positive definite.
  KalmanState update(const KalmanState& state, const MeasurementVector& measurement,
                     double confidence) const;
  /// Squared Mahalanobis distance of a measurement from the projected state
  /// (unscaled measurement noise, all four components).
  double gating_distance(const KalmanState& state, const MeasurementVector& measurement) const;

  const KalmanConfig& config() const noexcept { return config_; }

 private:
  MeasurementCovariance measurement_noise(double h, double confidence) const;

  KalmanConfig config_;
  StateCovariance motion_;
};

}  // namespace tsd
