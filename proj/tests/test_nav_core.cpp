#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "coopnav/mechanization.hpp"
#include "coopnav/sensors.hpp"

namespace coopnav {
namespace {

TEST(AttitudeUpdate, ZeroNetRotationLeavesDcm) {
  NavState state;
  state.C_bn = orthonormalized(
      (Mat3::Identity() + skew(Vec3(0.1, -0.2, 0.3))).eval());
  ImuSample imu;
  imu.dt = 0.02;
  imu.gyro = Vec3(0.01, -0.02, 0.03);
  const NavState out = attitude_update(state, imu, imu.gyro);
  EXPECT_LT((out.C_bn - state.C_bn).norm(), 1e-14);
  EXPECT_EQ(out.v, state.v);
  EXPECT_EQ(out.r, state.r);
}

TEST(AttitudeUpdate, FirstOrderZRotation) {
  NavState state;
  ImuSample imu;
  imu.dt = 0.02;  // the 50 Hz IMU interval
  imu.gyro = Vec3(0.0, 0.0, M_PI / 2.0);
  const NavState out = attitude_update(state, imu, Vec3::Zero());

  const double angle = M_PI / 2.0 * 0.02;  // ~0.0314 rad about z
  EXPECT_NEAR(out.C_bn(0, 1), -angle, 2e-5);
  EXPECT_NEAR(out.C_bn(1, 0), angle, 2e-5);

  // Against the exact rotation: first-order integration is O(dt^2).
  const Mat3 exact =
      Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  EXPECT_LT((out.C_bn - exact).norm(), angle * angle);
}

TEST(AttitudeUpdate, OrthonormalOverMillionSteps) {
  NavState state;
  ImuSample imu;
  imu.dt = 0.02;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);
  for (int i = 0; i < 1000000; ++i) {
    imu.gyro = Vec3(rate(gen), rate(gen), rate(gen));
    state = attitude_update(state, imu, Vec3::Zero());
  }
  EXPECT_LT(state.orthonormality_error(), 1e-9);
  EXPECT_NEAR(state.C_bn.determinant(), 1.0, 1e-9);
}

TEST(VelocityUpdate, GravityCancellation) {
  NavState state;
  state.v = Vec3(0.3, -0.1, 0.05);
  ImuSample imu;
  imu.dt = 0.02;
  imu.accel = Vec3(0.0, 0.0, kGravity);
  const NavState out = velocity_update(state, imu, Vec3::Zero());
  EXPECT_LT((out.v - state.v).norm(), 1e-15);
}

TEST(VelocityUpdate, DirectArithmetic) {
  NavState state;
  state.v = Vec3(0.2, 0.0, 0.0);
  ImuSample imu;
  imu.dt = 0.02;
  imu.accel = Vec3(0.1, 0.0, kGravity);
  const NavState out = velocity_update(state, imu, Vec3::Zero());
  EXPECT_NEAR(out.v.x(), 0.202, 1e-15);
  EXPECT_NEAR(out.v.y(), 0.0, 1e-15);
  EXPECT_NEAR(out.v.z(), 0.0, 1e-12);
}

TEST(PositionUpdate, Trivials) {
  NavState state;
  const NavState unchanged = position_update(state, Vec3::Zero(), 0.02);
  EXPECT_EQ(unchanged.r, Vec3::Zero());

  state.v = Vec3(0.2, 0.0, 0.0);
  const NavState moved = position_update(state, state.v, 0.02);
  EXPECT_NEAR(moved.r.x(), 0.004, 1e-15);
}

TEST(PositionUpdate, TelescopingConstantVelocity) {
  // 10 s of constant 0.2 m/s at 50 Hz covers 2 m exactly.
  NavState state;
  state.v = Vec3(0.2, 0.0, 0.0);
  for (int i = 0; i < 500; ++i) {
    state = position_update(state, state.v, 0.02);
  }
  EXPECT_NEAR(state.r.x(), 2.0, 1e-12);
}

TEST(BuildF, BlockLayout) {
  const Mat15 F0 = build_F(Mat3::Identity(), Vec3::Zero());
  Mat15 expected = Mat15::Zero();
  expected.block<3, 3>(kAttIdx, kBgIdx) = Mat3::Identity();
  expected.block<3, 3>(kVelIdx, kBaIdx) = Mat3::Identity();
  expected.block<3, 3>(kPosIdx, kVelIdx) = Mat3::Identity();
  EXPECT_LT((F0 - expected).norm(), 1e-15);

  const Mat15 F = build_F(Mat3::Identity(), Vec3(0.0, 0.0, kGravity));
  EXPECT_NEAR(F(3, 1), kGravity, 1e-12);
  EXPECT_NEAR(F(4, 0), -kGravity, 1e-12);
  const Mat3 block = F.block<3, 3>(kVelIdx, kAttIdx);
  EXPECT_LT((block + block.transpose()).norm(), 1e-12);
}

TEST(BuildPhi, MatchesDefinitionExactly) {
  Mat15 F = Mat15::Zero();
  EXPECT_TRUE(build_phi(F, 0.02).isApprox(Mat15::Identity(), 0.0));
  F(6, 3) = 1.0;
  const Mat15 phi = build_phi(F, 0.02);
  EXPECT_EQ(phi(6, 3), 0.02);
  EXPECT_EQ(phi(0, 0), 1.0);

  // Element-wise equality with I + F dt on a random dense F.
  std::mt19937_64 gen(101);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j) F(i, j) = normal(gen);
  const Mat15 expected = Mat15::Identity() + F * 0.02;
  EXPECT_TRUE(build_phi(F, 0.02).isApprox(expected, 0.0));
}

TEST(BuildPhi, SecondOrderAgreementWithExponential) {
  const Mat3 C = Eigen::AngleAxisd(0.4, Vec3(1, 2, 3).normalized())
                     .toRotationMatrix();
  const Mat15 F = build_F(C, Vec3(0.1, -0.05, kGravity));
  const double dt = 0.02;

  // Truncated series oracle for expm(F dt).
  Mat15 expm = Mat15::Identity();
  Mat15 term = Mat15::Identity();
  for (int k = 1; k <= 8; ++k) {
    term = (term * F * dt / k).eval();
    expm += term;
  }
  EXPECT_LT((build_phi(F, dt) - expm).norm(), F.norm() * F.norm() * dt * dt);
}

TEST(BuildQ, Structure) {
  NoiseSpec zero;
  EXPECT_EQ(build_Q(zero, 0.02).norm(), 0.0);

  NoiseSpec noise{1e-4, 2e-4, 3e-5, 4e-3};
  const Mat15 Q = build_Q(noise, 0.02);
  EXPECT_LT((Q - Q.transpose()).norm(), 1e-18);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat15>(Q).eigenvalues().minCoeff(),
            0.0);
  EXPECT_EQ((Q.block<3, 3>(kPosIdx, kPosIdx).norm()), 0.0);
  EXPECT_NEAR(Q(kAttIdx, kAttIdx), 1e-8 * 0.02, 1e-20);
  EXPECT_NEAR(Q(kVelIdx, kVelIdx), 4e-8 * 0.02, 1e-20);
  EXPECT_NEAR(Q(kBaIdx, kBaIdx), 4e-3 * 4e-3 * 0.02, 1e-15);
  EXPECT_NEAR(Q(kBgIdx, kBgIdx), 3e-5 * 3e-5 * 0.02, 1e-18);
  EXPECT_TRUE(build_Q(noise, 0.04).isApprox(2.0 * Q, 1e-12));
}

TEST(Propagate, IdentityAndZeroNoiseIsNoOp) {
  BeliefBlock belief;
  belief.P = Mat15::Identity() * 0.3;
  belief.sigma.emplace(1, Mat15::Identity() * 0.1);
  ErrorState err;
  auto [out, err_out] =
      propagate(belief, err, Mat15::Identity(), Mat15::Zero());
  EXPECT_LT((out.P - belief.P).norm(), 1e-15);
  EXPECT_LT((out.sigma.at(1) - belief.sigma.at(1)).norm(), 1e-15);
  EXPECT_EQ(err_out.x.norm(), 0.0);
}

TEST(Propagate, ZeroErrorStaysZero) {
  BeliefBlock belief;
  belief.P = Mat15::Identity();
  ErrorState err;
  const Mat15 F = build_F(Mat3::Identity(), Vec3(0, 0, kGravity));
  auto [out, err_out] = propagate(belief, err, build_phi(F, 0.02),
                                  build_Q(NoiseSpec{1e-4, 1e-4, 1e-5, 1e-3},
                                          0.02));
  (void)out;
  EXPECT_EQ(err_out.x.norm(), 0.0);
}

TEST(Propagate, TraceGrowsUnderAdditiveNoise) {
  BeliefBlock belief;
  belief.P = Mat15::Identity() * 0.1;
  ErrorState err;
  const Mat15 Q = build_Q(NoiseSpec{1e-3, 1e-3, 1e-4, 1e-2}, 0.02);
  auto [out, err_out] = propagate(belief, err, Mat15::Identity(), Q);
  (void)err_out;
  EXPECT_GE(out.P.trace(), belief.P.trace());
}

TEST(Propagate, SymmetryAndPsdOverTenThousandRandomSteps) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  BeliefBlock belief;
  belief.P = Mat15::Identity() * 0.01;
  ErrorState err;
  const Mat15 Q = build_Q(NoiseSpec{1e-4, 1e-4, 1e-5, 1e-3}, 0.02);
  for (int i = 0; i < 10000; ++i) {
    const Mat3 C = Eigen::AngleAxisd(small(gen), Vec3(small(gen), small(gen),
                                                      1.0)
                                                     .normalized())
                       .toRotationMatrix();
    const Mat15 F = build_F(C, Vec3(small(gen), small(gen), kGravity));
    auto [out, err_out] = propagate(std::move(belief), err,
                                    build_phi(F, 0.02), Q);
    belief = std::move(out);
    err = err_out;
  }
  EXPECT_LT(belief.symmetry_error(), 1e-10);
  EXPECT_GT(belief.min_eigenvalue(), -1e-9 * belief.P.trace());
}

TEST(Propagate, CorrelationFactorCommutesWithJointPropagation) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    Mat15 sigma_ab, sigma_ba;
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        sigma_ab(i, j) = normal(gen);
        sigma_ba(i, j) = normal(gen);
      }
    }
    const Mat3 C_a = Eigen::AngleAxisd(normal(gen), Vec3::UnitZ())
                         .toRotationMatrix();
    const Mat3 C_b = Eigen::AngleAxisd(normal(gen), Vec3::UnitX())
                         .toRotationMatrix();
    const Mat15 phi_a =
        build_phi(build_F(C_a, Vec3(normal(gen), 0, kGravity)), 0.02);
    const Mat15 phi_b =
        build_phi(build_F(C_b, Vec3(0, normal(gen), kGravity)), 0.02);

    const Mat15 joint = phi_a * (sigma_ab * sigma_ba.transpose()) *
                        phi_b.transpose();
    const Mat15 factored =
        (phi_a * sigma_ab) * (phi_b * sigma_ba).transpose();
    EXPECT_LT((joint - factored).norm() / joint.norm(), 1e-12);
  }
}

TEST(FoldCorrection, Trivials) {
  NavState nav;
  nav.v = Vec3(0.1, 0.2, 0.3);
  nav.r = Vec3(1.0, 2.0, 3.0);
  ErrorState err;
  ImuBiases biases;

  const FoldResult same = fold_correction(nav, err, biases);
  EXPECT_LT((same.nav.r - nav.r).norm(), 1e-15);
  EXPECT_LT((same.nav.v - nav.v).norm(), 1e-15);

  err.position() = Vec3(0.1, 0.0, 0.0);
  err.accel_bias() = Vec3(0.01, 0.0, 0.0);
  const FoldResult folded = fold_correction(nav, err, biases);
  EXPECT_NEAR(folded.nav.r.x(), 0.9, 1e-15);
  EXPECT_NEAR(folded.biases.accel.x(), 0.01, 1e-15);
  EXPECT_EQ(folded.err.x.norm(), 0.0);

  // Second fold of the already-reset error is a no-op.
  const FoldResult again =
      fold_correction(folded.nav, folded.err, folded.biases);
  EXPECT_LT((again.nav.r - folded.nav.r).norm(), 1e-15);
  EXPECT_LT((again.biases.accel - folded.biases.accel).norm(), 1e-15);
}

TEST(FoldCorrection, AttitudeSignConvention) {
  // A pure-z attitude error folds as C <- (I - skew(dpsi)) C.
  NavState nav;
  ErrorState err;
  err.attitude() = Vec3(0.0, 0.0, 0.01);
  const FoldResult folded = fold_correction(nav, err, ImuBiases{});
  const Mat3 expected = orthonormalized(
      (Mat3::Identity() - skew(Vec3(0.0, 0.0, 0.01))).eval());
  EXPECT_LT((folded.nav.C_bn - expected).norm(), 1e-12);
}

// Perfect IMU data from a smooth analytic trajectory, mechanized at
// 50 Hz, must land within 1 mm of a fine RK-style reference after 60 s.
TEST(Mechanization, ZeroNoiseRoundTrip) {
  const double yaw_rate = 0.01;     // rad/s
  const double base_speed = 0.2;    // m/s
  const double speed_amp = 0.05;    // m/s
  const double speed_omega = 2.0 * M_PI / 30.0;

  auto heading = [&](double t) { return yaw_rate * t; };
  auto speed = [&](double t) {
    return base_speed + speed_amp * std::sin(speed_omega * t);
  };
  auto velocity = [&](double t) {
    return Vec3(speed(t) * std::cos(heading(t)),
                speed(t) * std::sin(heading(t)), 0.0);
  };
  auto accel_nav = [&](double t) {
    const double ds = speed_amp * speed_omega * std::cos(speed_omega * t);
    const Vec3 dir(std::cos(heading(t)), std::sin(heading(t)), 0.0);
    const Vec3 perp(-std::sin(heading(t)), std::cos(heading(t)), 0.0);
    return Vec3(ds * dir + speed(t) * yaw_rate * perp);
  };
  auto dcm = [&](double t) {
    return Eigen::AngleAxisd(heading(t), Vec3::UnitZ()).toRotationMatrix();
  };

  // Reference position by fine trapezoidal quadrature of the analytic
  // velocity (independent of the mechanization path).
  const double duration = 60.0;
  Vec3 r_ref = Vec3::Zero();
  const int fine = 600000;
  const double h = duration / fine;
  for (int i = 0; i < fine; ++i) {
    r_ref += 0.5 * h * (velocity(i * h) + velocity((i + 1) * h));
  }

  (void)accel_nav;
  NavState state;
  state.C_bn = dcm(0.0);
  state.v = velocity(0.0);
  const double dt = 0.02;
  const Vec3 g(0.0, 0.0, -kGravity);
  for (int k = 0; k < 3000; ++k) {
    const double t1 = (k + 1) * dt;
    ImuSample imu;
    imu.dt = dt;
    imu.gyro = Vec3(0.0, 0.0, yaw_rate);
    // Integrating sensor: interval-averaged specific force.
    imu.accel =
        dcm(t1).transpose() *
        ((velocity(t1) - velocity(k * dt)) / dt - g);
    state = mechanize(state, imu, ImuBiases{});
  }
  EXPECT_LT((state.r - r_ref).norm(), 1e-3);
  EXPECT_LT((state.v - velocity(duration)).norm(), 1e-4);
}

}  // namespace
}  // namespace coopnav
