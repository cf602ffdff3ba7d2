#pragma once

#include <Eigen/Dense>

#include "coopnav/types.hpp"

namespace coopnav {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6x15 = Eigen::Matrix<double, 6, 15>;
using Mat3x15 = Eigen::Matrix<double, 3, 15>;

enum class PrivateKind { PosVel, PosOnly, OdomVel, ZeroVel };

/// Loosely coupled position/velocity innovation,
/// z = [v_meas - v; r_meas - r].
Vec6 innovation_posvel(const Vec3& v_meas, const Vec3& r_meas,
                       const NavState& state);

/// Position-only innovation (motion-capture style), z = r_meas - r.
Vec3 innovation_posonly(const Vec3& r_meas, const NavState& state);

/// Odometry velocity innovation; the measurement is already expressed in
/// the navigation frame.
Vec3 innovation_odomvel(const Vec3& v_meas, const NavState& state);

/// Zero-velocity innovation, z = [-w; -v]. The angular rate must already
/// be bias-corrected; the caller is responsible for having verified the
/// stationary condition.
Vec6 zupt_innovation(const Vec3& omega_corrected, const Vec3& v_estimate);

/// Measurement Jacobians, constant block matrices with -I on the observed
/// error states.
Mat6x15 H_posvel();
Mat3x15 H_posonly();
Mat3x15 H_odomvel();
Mat6x15 H_zupt();

struct UpdateOptions {
  /// When set, correlation factors are transformed with the full
  /// (I-KH) sigma (I-KH)' + K R K' form; otherwise with the one-sided
  /// product (I-KH) sigma, which keeps the factored cross-covariances
  /// exact for robots outside the update.
  bool eq18_additive_term = true;
};

struct PrivateResult {
  BeliefBlock belief;
  ErrorState err;
  Eigen::VectorXd innovation;  // z - H x, as consumed by the gain
};

/// Kalman measurement update on one robot's belief:
/// K = P H' (H P H' + R)^-1, Joseph-form covariance, and every stored
/// correlation factor transformed per `opts`.
/// Throws InnovationCovSingular when H P H' + R is numerically singular.
PrivateResult apply_private(BeliefBlock belief, ErrorState err,
                            const Eigen::MatrixXd& H, const Eigen::VectorXd& z,
                            const Eigen::MatrixXd& R,
                            const UpdateOptions& opts = {});

}  // namespace coopnav
