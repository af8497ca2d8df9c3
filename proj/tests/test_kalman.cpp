#include <gtest/gtest.h>

#include <random>

#include "tsd/kalman.hpp"

using namespace tsd;

namespace {

KalmanState state_with_mean(std::initializer_list<double> values) {
  KalmanFilter kf;
  KalmanState s = kf.initiate(to_measurement(BBox{75, 75, 125, 125}));
  int i = 0;
  for (double v : values) s.mean(i++) = v;
  return s;
}

}  // namespace

TEST(Kalman, BoxRoundTrip) {
  const BBox b{10, 20, 50, 100};
  const MeasurementVector m = to_measurement(b);
  EXPECT_DOUBLE_EQ(m(0), 30);
  EXPECT_DOUBLE_EQ(m(1), 60);
  EXPECT_DOUBLE_EQ(m(2), 0.5);
  EXPECT_DOUBLE_EQ(m(3), 80);
  const BBox back = to_bbox(m);
  EXPECT_NEAR(back.left, b.left, 1e-12);
  EXPECT_NEAR(back.bottom, b.bottom, 1e-12);
}

TEST(Kalman, PredictLinearPropagation) {
  const KalmanFilter kf;
  const KalmanState s = state_with_mean({100, 100, 2, 50, 5, 0, 0, 0});
  const KalmanState p = kf.predict(s);
  StateVector expected;
  expected << 105, 100, 2, 50, 5, 0, 0, 0;
  EXPECT_TRUE(p.mean.isApprox(expected, 1e-15));
  const KalmanState p2 = kf.predict(p);
  EXPECT_DOUBLE_EQ(p2.mean(0), 110.0);
}

TEST(Kalman, PredictWithZeroVelocityGrowsCovariance) {
  const KalmanFilter kf;
  const KalmanState s = state_with_mean({40, 60, 1, 30, 0, 0, 0, 0});
  const KalmanState p = kf.predict(s);
  EXPECT_TRUE(p.mean.head<4>().isApprox(s.mean.head<4>()));
  for (int i = 0; i < 8; ++i) EXPECT_GT(p.covariance(i, i), s.covariance(i, i));
  // Transition-matrix power: P2 = F^2 P F^2' + F Q F' + Q, checked against two predicts.
  const KalmanState two = kf.predict(p);
  StateCovariance f = StateCovariance::Identity();
  for (int i = 0; i < 4; ++i) f(i, 4 + i) = 1.0;
  KalmanFilter noiseless(KalmanConfig{1.0 / 20, 1.0 / 160, 0.0, 1e-6});
  const KalmanState n2 = noiseless.predict(noiseless.predict(s));
  EXPECT_TRUE(n2.covariance.isApprox(f * f * s.covariance * (f * f).transpose(), 1e-12));
  EXPECT_GT(two.covariance(0, 0), n2.covariance(0, 0));
}

TEST(Kalman, RejectsNonFiniteState) {
  const KalmanFilter kf;
  KalmanState s = state_with_mean({1, 1, 1, 1, 0, 0, 0, 0});
  s.mean(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(kf.predict(s), ValidationError);
}

TEST(Kalman, UpdateWithPredictedMeasurementKeepsMean) {
  const KalmanFilter kf;
  const KalmanState s = kf.predict(state_with_mean({100, 100, 0.5, 50, 2, -1, 0, 0.5}));
  MeasurementVector z = s.mean.head<4>();
  const KalmanState u = kf.update(s, z, 0.8);
  EXPECT_TRUE(u.mean.isApprox(s.mean, 1e-12));
  for (int i = 0; i < 8; ++i) EXPECT_LE(u.covariance(i, i), s.covariance(i, i) + 1e-12);
}

TEST(Kalman, HigherConfidencePullsCloser) {
  const KalmanFilter kf;
  const KalmanState s = kf.predict(state_with_mean({100, 100, 0.5, 50, 0, 0, 0, 0}));
  MeasurementVector z = s.mean.head<4>();
  z(0) += 12;
  z(1) -= 7;
  z(3) += 4;
  const KalmanState lo = kf.update(s, z, 0.0);
  const KalmanState hi = kf.update(s, z, 0.99);
  const double d_lo = (lo.mean.head<4>() - z).norm();
  const double d_hi = (hi.mean.head<4>() - z).norm();
  EXPECT_LT(d_hi, d_lo);
  // Both posteriors lie between prior and measurement on each displaced axis.
  EXPECT_GT(lo.mean(0), s.mean(0));
  EXPECT_LT(hi.mean(0), z(0));
}

TEST(Kalman, RepeatedUpdatesContractTowardsConstantMeasurement) {
  const KalmanFilter kf;
  KalmanState s = state_with_mean({0, 0, 1, 40, 0, 0, 0, 0});
  MeasurementVector z;
  z << 30, -10, 1, 40;
  double previous = (s.mean.head<4>() - z).norm();
  for (int k = 0; k < 30; ++k) {
    s = kf.update(kf.predict(s), z, 0.5);
    const double now = (s.mean.head<4>() - z).norm();
    if (k > 5) {
      EXPECT_LT(now, previous + 1e-9);
    }
    previous = now;
  }
  EXPECT_LT(previous, 1.0);
}

TEST(Kalman, GatingDistanceZeroAtMean) {
  const KalmanFilter kf;
  const KalmanState s = kf.predict(state_with_mean({50, 50, 1, 20, 1, 1, 0, 0}));
  EXPECT_NEAR(kf.gating_distance(s, s.mean.head<4>()), 0.0, 1e-12);
  MeasurementVector z = s.mean.head<4>();
  z(0) += 3;
  const double d1 = kf.gating_distance(s, z);
  z(0) += 3;
  EXPECT_NEAR(kf.gating_distance(s, z), 4 * d1, 1e-9 * d1);
}
