#pragma once

#include <cstdint>
#include <map>

#include "coopnav/geometry.hpp"

namespace coopnav {

using RobotId = std::uint32_t;

/// Error-state vector layout. 15 states ordered
/// [attitude, velocity, position, accel bias, gyro bias], three each.
inline constexpr int kAttIdx = 0;
inline constexpr int kVelIdx = 3;
inline constexpr int kPosIdx = 6;
inline constexpr int kBaIdx = 9;
inline constexpr int kBgIdx = 12;
inline constexpr int kStateDim = 15;

inline constexpr double kGravity = 9.81;

/// Total navigation state in the local ENU frame.
struct NavState {
  Mat3 C_bn = Mat3::Identity();  // body-to-nav DCM
  Vec3 v = Vec3::Zero();         // m/s, ENU
  Vec3 r = Vec3::Zero();         // m, ENU
  double t = 0.0;                // s

  /// Frobenius departure from orthonormality.
  double orthonormality_error() const {
    return (C_bn.transpose() * C_bn - Mat3::Identity()).norm();
  }
};

/// 15-dim error state. Attitude/velocity/position components carry the
/// estimate-minus-truth error and are subtracted at fold time; the bias
/// components carry corrections that are added to the bias registers.
struct ErrorState {
  Vec15 x = Vec15::Zero();

  auto attitude() { return x.segment<3>(kAttIdx); }
  auto velocity() { return x.segment<3>(kVelIdx); }
  auto position() { return x.segment<3>(kPosIdx); }
  auto accel_bias() { return x.segment<3>(kBaIdx); }
  auto gyro_bias() { return x.segment<3>(kBgIdx); }

  auto attitude() const { return x.segment<3>(kAttIdx); }
  auto velocity() const { return x.segment<3>(kVelIdx); }
  auto position() const { return x.segment<3>(kPosIdx); }
  auto accel_bias() const { return x.segment<3>(kBaIdx); }
  auto gyro_bias() const { return x.segment<3>(kBgIdx); }
};

/// Estimated IMU biases, removed from raw measurements before mechanization.
struct ImuBiases {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
};

/// One IMU sample: specific force and angular rate in the body frame.
struct ImuSample {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
  double dt = 0.0;            // sampling interval, s
};

/// Continuous-time noise densities driving the process noise matrix.
struct NoiseSpec {
  double arw = 0.0;                // angular random walk, rad/sqrt(s)
  double vrw = 0.0;                // velocity random walk, m/s/sqrt(s)
  double gyro_bias_instab = 0.0;   // rad/s
  double accel_bias_instab = 0.0;  // m/s^2
};

/// Per-robot covariance plus the correlation factors toward every peer.
/// The product sigma[B] * (B's sigma[A])' reconstructs the joint
/// cross-covariance block at coupling time.
struct BeliefBlock {
  RobotId own_id = 0;
  Mat15 P = Mat15::Zero();
  std::map<RobotId, Mat15> sigma;

  void symmetrize() { P = (0.5 * (P + P.transpose())).eval(); }

  double symmetry_error() const {
    return (P - P.transpose()).cwiseAbs().maxCoeff();
  }

  /// Smallest eigenvalue, for PSD checks.
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat15> es(P, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

}  // namespace coopnav
