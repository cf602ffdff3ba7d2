#include <gtest/gtest.h>

#include <random>

#include "coopnav/errors.hpp"
#include "coopnav/mechanization.hpp"
#include "coopnav/private_updates.hpp"

namespace coopnav {
namespace {

Mat15 random_spd(std::mt19937_64& gen, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Mat15 A;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) A(i, j) = normal(gen);
  return A * A.transpose() + 1e-6 * Mat15::Identity();
}

TEST(Innovations, PosVel) {
  NavState state;
  state.v = Vec3(0.2, 0.0, 0.0);
  state.r = Vec3(1.0, 2.0, 0.0);
  const Vec6 zero = innovation_posvel(state.v, state.r, state);
  EXPECT_EQ(zero.norm(), 0.0);

  const Vec6 z = innovation_posvel(Vec3(0.25, 0.0, 0.0), state.r, state);
  EXPECT_NEAR(z(0), 0.05, 1e-15);
  EXPECT_EQ(z.tail<3>().norm(), 0.0);
}

TEST(Innovations, Zupt) {
  const Vec6 z = zupt_innovation(Vec3(0.001, 0.0, 0.0),
                                 Vec3(0.01, 0.0, 0.02));
  Vec6 expected;
  expected << -0.001, 0.0, 0.0, -0.01, 0.0, -0.02;
  EXPECT_LT((z - expected).norm(), 1e-18);
  EXPECT_EQ(zupt_innovation(Vec3::Zero(), Vec3::Zero()).norm(), 0.0);
}

TEST(Jacobians, PosVelShape) {
  const Mat6x15 H = H_posvel();
  for (int row = 0; row < 6; ++row) {
    int nonzero = 0;
    for (int col = 0; col < 15; ++col) {
      if (H(row, col) != 0.0) {
        ++nonzero;
        EXPECT_EQ(H(row, col), -1.0);
      }
    }
    EXPECT_EQ(nonzero, 1);
  }
  // Attitude errors are unobserved by this update.
  Vec15 att_only = Vec15::Zero();
  att_only.segment<3>(kAttIdx) = Vec3(1.0, -2.0, 0.5);
  EXPECT_EQ((H * att_only).norm(), 0.0);

  Vec15 dvx = Vec15::Zero();
  dvx(kVelIdx) = 1.0;
  EXPECT_EQ((H * dvx)(0), -1.0);
}

TEST(Jacobians, ZuptAndOdomBlocks) {
  const Mat6x15 Hz = H_zupt();
  Vec15 dv = Vec15::Zero();
  dv.segment<3>(kVelIdx) = Vec3::Ones();
  const Vec6 from_dv = Hz * dv;
  EXPECT_EQ(from_dv.head<3>().norm(), 0.0);
  EXPECT_TRUE(from_dv.tail<3>().isApprox(-Vec3::Ones(), 0.0));

  Vec15 bg = Vec15::Zero();
  bg.segment<3>(kBgIdx) = Vec3::Ones();
  const Vec6 from_bg = Hz * bg;
  EXPECT_TRUE(from_bg.head<3>().isApprox(-Vec3::Ones(), 0.0));
  EXPECT_EQ(from_bg.tail<3>().norm(), 0.0);

  const Mat3x15 Ho = H_odomvel();
  Vec15 dr = Vec15::Zero();
  dr.segment<3>(kPosIdx) = Vec3::Ones();
  EXPECT_EQ((Ho * dr).norm(), 0.0);

  const Mat3x15 Hp = H_posonly();
  EXPECT_TRUE((Hp * dr).isApprox(-Vec3::Ones(), 0.0));
  EXPECT_EQ((Hp * dv).norm(), 0.0);
}

TEST(ApplyPrivate, UninformativeMeasurementIsNoOp) {
  std::mt19937_64 gen(5);
  BeliefBlock belief;
  belief.P = random_spd(gen, 0.1);
  ErrorState err;
  const Eigen::MatrixXd R = 1e12 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd z = Vec3(0.5, -0.2, 0.1);
  auto res = apply_private(belief, err, H_odomvel(), z, R);
  EXPECT_LT((res.belief.P - belief.P).norm() / belief.P.norm(), 1e-6);
  EXPECT_LT(res.err.x.norm(), 1e-6);
}

TEST(ApplyPrivate, OneDimensionalClosedForm) {
  // Reduce to the hand-solved scalar filter: P=1, H=-1, R=1, z=0.5
  // gives K=-0.5, x+ = -0.25, P+ = 0.5.
  BeliefBlock belief;
  belief.P = Mat15::Zero();
  belief.P(kVelIdx, kVelIdx) = 1.0;
  ErrorState err;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(1, 15);
  H(0, kVelIdx) = -1.0;
  const Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 0.5);
  const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(1, 1);
  auto res = apply_private(belief, err, H, z, R);
  EXPECT_NEAR(res.err.x(kVelIdx), -0.25, 1e-15);
  EXPECT_NEAR(res.belief.P(kVelIdx, kVelIdx), 0.5, 1e-15);
}

TEST(ApplyPrivate, JosephEqualsShortFormAtOptimalGain) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 50; ++trial) {
    BeliefBlock belief;
    belief.P = random_spd(gen, 0.3);
    ErrorState err;
    const Eigen::MatrixXd H = H_odomvel();
    const Eigen::MatrixXd R = 1e-4 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd z = Vec3(0.01, -0.02, 0.005);

    auto res = apply_private(belief, err, H, z, R);

    const Eigen::MatrixXd S = H * belief.P * H.transpose() + R;
    const Eigen::MatrixXd K = belief.P * H.transpose() * S.inverse();
    const Mat15 short_form =
        (Mat15::Identity() - K * H) * belief.P;
    EXPECT_LT((res.belief.P - short_form).norm() / short_form.norm(), 1e-9);
  }
}

TEST(ApplyPrivate, TraceNeverIncreases) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    BeliefBlock belief;
    belief.P = random_spd(gen, 0.2);
    ErrorState err;
    const Eigen::MatrixXd R =
        random_spd(gen, 0.05).topLeftCorner(6, 6).eval() +
        1e-6 * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
    auto res = apply_private(belief, err, H_posvel(), z, R);
    EXPECT_LE(res.belief.P.trace(), belief.P.trace() + 1e-12);
  }
}

TEST(ApplyPrivate, PositionOnlyUpdatePullsTowardFix) {
  // Motion-capture-style fix: position innovation folds into the state.
  BeliefBlock belief;
  Vec15 diag;
  diag << 1e-4, 1e-4, 1e-4, 4e-4, 4e-4, 4e-4, 0.25, 0.25, 0.25, 2.5e-5,
      2.5e-5, 2.5e-5, 2.5e-7, 2.5e-7, 2.5e-7;
  belief.P = diag.asDiagonal();
  ErrorState err;
  NavState nav;
  nav.r = Vec3(1.0, 2.0, 0.0);
  const Vec3 fix(1.3, 2.0, 0.0);
  const Eigen::MatrixXd R = 1e-4 * Eigen::MatrixXd::Identity(3, 3);
  auto res = apply_private(belief, err, H_posonly(),
                           innovation_posonly(fix, nav), R);
  const FoldResult folded = fold_correction(nav, res.err, ImuBiases{});
  EXPECT_LT((folded.nav.r - fix).norm(), 0.01);
  EXPECT_LT(res.belief.P(kPosIdx, kPosIdx), belief.P(kPosIdx, kPosIdx));
}

TEST(ApplyPrivate, SingularInnovationThrows) {
  BeliefBlock belief;
  belief.P = Mat15::Zero();
  ErrorState err;
  const Eigen::MatrixXd R = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::VectorXd z = Vec3::Zero();
  EXPECT_THROW(apply_private(belief, err, H_odomvel(), z, R),
               InnovationCovSingular);
}

TEST(ApplyPrivate, CorrelationFactorTransformBothModes) {
  std::mt19937_64 gen(17);
  BeliefBlock belief;
  belief.P = random_spd(gen, 0.2);
  std::normal_distribution<double> normal(0.0, 0.1);
  Mat15 sigma;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) sigma(i, j) = normal(gen);
  belief.sigma.emplace(7, sigma);
  ErrorState err;
  const Eigen::MatrixXd H = H_odomvel();
  const Eigen::MatrixXd R = 1e-4 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd z = Vec3(0.02, 0.0, -0.01);

  const Eigen::MatrixXd S = H * belief.P * H.transpose() + R;
  const Eigen::MatrixXd K = belief.P * H.transpose() * S.inverse();
  const Mat15 IKH = Mat15::Identity() - K * H;

  UpdateOptions off;
  off.eq18_additive_term = false;
  auto res_off = apply_private(belief, err, H, z, R, off);
  EXPECT_LT((res_off.belief.sigma.at(7) - IKH * sigma).norm(), 1e-12);

  UpdateOptions on;
  on.eq18_additive_term = true;
  auto res_on = apply_private(belief, err, H, z, R, on);
  const Mat15 expected =
      IKH * sigma * IKH.transpose() + K * R * K.transpose();
  EXPECT_LT((res_on.belief.sigma.at(7) - expected).norm(), 1e-12);
}

TEST(Zupt, PinsVelocityBelowMillimeterPerSecond) {
  BeliefBlock belief;
  Vec15 diag;
  diag << 1e-4, 1e-4, 1e-4, 1e-2, 1e-2, 1e-2, 0.5, 0.5, 0.5, 2.5e-5, 2.5e-5,
      2.5e-5, 2.5e-7, 2.5e-7, 2.5e-7;
  belief.P = diag.asDiagonal();
  ErrorState err;
  NavState nav;
  nav.v = Vec3(0.05, -0.03, 0.08);  // drifted estimate, truly stationary

  Eigen::Matrix<double, 6, 1> r;
  r << 1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6;
  const Vec6 z = zupt_innovation(Vec3::Zero(), nav.v);
  auto res = apply_private(belief, err, H_zupt(), z, r.asDiagonal());
  const FoldResult folded = fold_correction(nav, res.err, ImuBiases{});
  EXPECT_LT(folded.nav.v.norm(), 1e-3);
}

TEST(Zupt, VelocityErrorContraction) {
  // A stationary robot with a drifted velocity estimate: the error norm
  // immediately after the ZU is smaller than immediately before.
  BeliefBlock belief;
  Vec15 diag;
  diag << 1e-4, 1e-4, 1e-4, 4e-2, 4e-2, 4e-2, 1.0, 1.0, 1.0, 2.5e-5, 2.5e-5,
      2.5e-5, 2.5e-7, 2.5e-7, 2.5e-7;
  belief.P = diag.asDiagonal();
  ErrorState err;
  NavState nav;
  nav.v = Vec3(0.12, -0.07, 0.2);
  const Vec3 v_true = Vec3::Zero();

  Eigen::Matrix<double, 6, 1> r;
  r << 1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6;
  const double err_before = (nav.v - v_true).norm();
  const Vec6 z = zupt_innovation(Vec3(0.002, -0.001, 0.0005), nav.v);
  auto res = apply_private(belief, err, H_zupt(), z, r.asDiagonal());
  const FoldResult folded = fold_correction(nav, res.err, ImuBiases{});
  EXPECT_LT((folded.nav.v - v_true).norm(), err_before);
}

TEST(Zupt, GyroBiasConvergesOverRepeatedUpdates) {
  // Repeated ZUs at truth-stationary moments drive the estimated gyro
  // bias toward the simulated true bias.
  const Vec3 true_bias(0.004, -0.002, 0.003);
  NavState nav;
  ErrorState err;
  ImuBiases biases;
  BeliefBlock belief;
  Vec15 diag;
  diag << 1e-4, 1e-4, 1e-4, 1e-4, 1e-4, 1e-4, 0.01, 0.01, 0.01, 2.5e-5,
      2.5e-5, 2.5e-5, 2.5e-5, 2.5e-5, 2.5e-5;
  belief.P = diag.asDiagonal();

  NoiseSpec noise{1.4e-4, 1.4e-4, 5e-4, 5e-3};
  Eigen::Matrix<double, 6, 1> r;
  r << 1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6;

  std::mt19937_64 gen(23);
  std::normal_distribution<double> gyro_noise(0.0, 1e-3);

  std::vector<double> bias_errors;
  for (int stop = 0; stop < 10; ++stop) {
    // One second of stationary propagation between stops.
    for (int k = 0; k < 50; ++k) {
      ImuSample imu;
      imu.dt = 0.02;
      imu.accel = Vec3(0.0, 0.0, kGravity);
      imu.gyro = true_bias + Vec3(gyro_noise(gen), gyro_noise(gen),
                                  gyro_noise(gen));
      const Mat3 c_minus = nav.C_bn;
      nav = mechanize(nav, imu, biases);
      auto [b, e] = propagate(std::move(belief), err,
                              build_phi(build_F(c_minus, imu.accel -
                                                             biases.accel),
                                        0.02),
                              build_Q(noise, 0.02));
      belief = std::move(b);
      err = e;
    }
    const Vec3 omega_corrected =
        true_bias +
        Vec3(gyro_noise(gen), gyro_noise(gen), gyro_noise(gen)) -
        biases.gyro;
    const Vec6 z = zupt_innovation(omega_corrected, nav.v);
    auto res = apply_private(std::move(belief), err, H_zupt(), z,
                             r.asDiagonal());
    belief = std::move(res.belief);
    err = res.err;
    FoldResult folded = fold_correction(nav, err, biases);
    nav = folded.nav;
    err = folded.err;
    biases = folded.biases;
    bias_errors.push_back((biases.gyro - true_bias).norm());
  }

  EXPECT_LT(bias_errors.back(), bias_errors.front());
  const double sigma_marginal =
      std::sqrt(belief.P.diagonal().segment<3>(kBgIdx).maxCoeff());
  EXPECT_LT(bias_errors.back(), 3.0 * sigma_marginal * std::sqrt(3.0));
}

}  // namespace
}  // namespace coopnav
