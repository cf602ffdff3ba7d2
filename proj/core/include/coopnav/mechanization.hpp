#pragma once

#include "coopnav/types.hpp"

namespace coopnav {

/// First-order DCM attitude integration, C(+) = C(-)(I + skew(w - bg) dt),
/// followed by Gram-Schmidt reorthonormalization. Velocity and position
/// are untouched.
NavState attitude_update(const NavState& state, const ImuSample& imu,
                         const Vec3& gyro_bias);

/// Velocity integration, v(+) = v(-) + (C (a - ba) + g) dt, using the DCM
/// currently stored in `state`. The mechanization cycle passes the
/// pre-attitude-update state here so the product uses C(-).
NavState velocity_update(const NavState& state, const ImuSample& imu,
                         const Vec3& accel_bias);

/// Trapezoidal position integration, r(+) = r(-) + dt/2 (v(-) + v(+)).
NavState position_update(const NavState& state, const Vec3& v_minus,
                         double dt);

/// One full strapdown cycle: attitude, velocity (with the pre-update DCM),
/// trapezoidal position, timestamp advance.
NavState mechanize(const NavState& state, const ImuSample& imu,
                   const ImuBiases& biases);

/// Continuous-time error-state dynamics matrix. Nonzero blocks:
/// attitude<-gyro bias (C), velocity<-attitude (skew(-C a)),
/// velocity<-accel bias (C), position<-velocity (I).
Mat15 build_F(const Mat3& c_bn, const Vec3& accel_corrected);

/// First-order transition matrix, Phi = I + F dt.
Mat15 build_phi(const Mat15& F, double dt);

/// Block-diagonal process noise from the sensor noise densities. The
/// position block is zero; position noise enters through velocity coupling.
Mat15 build_Q(const NoiseSpec& noise, double dt);

/// Time propagation of error state, covariance, and every stored
/// correlation factor:
///   x <- Phi x,  P <- Phi P Phi' + Q (re-symmetrized),  sigma <- Phi sigma.
struct Propagated {
  BeliefBlock belief;
  ErrorState err;
};
Propagated propagate(BeliefBlock belief, ErrorState err, const Mat15& phi,
                     const Mat15& Q);

/// Closed-loop correction: attitude/velocity/position errors are folded
/// into the total state with the subtraction convention implied by the
/// -I measurement Jacobians, bias corrections accumulate into the
/// registers, and the whole error state resets to zero.
struct FoldResult {
  NavState nav;
  ErrorState err;
  ImuBiases biases;
};
FoldResult fold_correction(const NavState& nav, const ErrorState& err,
                           const ImuBiases& biases);

}  // namespace coopnav
