#include "coopnav/mechanization.hpp"

namespace coopnav {

namespace {
const Vec3 kGravityEnu(0.0, 0.0, -kGravity);
}

NavState attitude_update(const NavState& state, const ImuSample& imu,
                         const Vec3& gyro_bias) {
  NavState out = state;
  const Vec3 w = imu.gyro - gyro_bias;
  out.C_bn = orthonormalized(state.C_bn *
                             (Mat3::Identity() + skew(w) * imu.dt));
  return out;
}

NavState velocity_update(const NavState& state, const ImuSample& imu,
                         const Vec3& accel_bias) {
  NavState out = state;
  const Vec3 f = imu.accel - accel_bias;
  out.v = state.v + (state.C_bn * f + kGravityEnu) * imu.dt;
  return out;
}

NavState position_update(const NavState& state, const Vec3& v_minus,
                         double dt) {
  NavState out = state;
  out.r = state.r + 0.5 * dt * (v_minus + state.v);
  return out;
}

NavState mechanize(const NavState& state, const ImuSample& imu,
                   const ImuBiases& biases) {
  const Vec3 v_minus = state.v;
  NavState out = attitude_update(state, imu, biases.gyro);
  // Velocity integrates with the pre-update DCM.
  out.v = velocity_update(state, imu, biases.accel).v;
  out = position_update(out, v_minus, imu.dt);
  out.t = state.t + imu.dt;
  return out;
}

Mat15 build_F(const Mat3& c_bn, const Vec3& accel_corrected) {
  Mat15 F = Mat15::Zero();
  F.block<3, 3>(kAttIdx, kBgIdx) = c_bn;
  F.block<3, 3>(kVelIdx, kAttIdx) = skew(-c_bn * accel_corrected);
  F.block<3, 3>(kVelIdx, kBaIdx) = c_bn;
  F.block<3, 3>(kPosIdx, kVelIdx) = Mat3::Identity();
  return F;
}

Mat15 build_phi(const Mat15& F, double dt) {
  return Mat15::Identity() + F * dt;
}

Mat15 build_Q(const NoiseSpec& noise, double dt) {
  Mat15 Q = Mat15::Zero();
  Q.block<3, 3>(kAttIdx, kAttIdx) =
      noise.arw * noise.arw * dt * Mat3::Identity();
  Q.block<3, 3>(kVelIdx, kVelIdx) =
      noise.vrw * noise.vrw * dt * Mat3::Identity();
  Q.block<3, 3>(kBaIdx, kBaIdx) =
      noise.accel_bias_instab * noise.accel_bias_instab * dt * Mat3::Identity();
  Q.block<3, 3>(kBgIdx, kBgIdx) =
      noise.gyro_bias_instab * noise.gyro_bias_instab * dt * Mat3::Identity();
  return Q;
}

Propagated propagate(BeliefBlock belief, ErrorState err, const Mat15& phi,
                     const Mat15& Q) {
  err.x = phi * err.x;
  belief.P = phi * belief.P * phi.transpose() + Q;
  belief.symmetrize();
  for (auto& [peer, sigma] : belief.sigma) {
    sigma = phi * sigma;
  }
  return {std::move(belief), err};
}

FoldResult fold_correction(const NavState& nav, const ErrorState& err,
                           const ImuBiases& biases) {
  FoldResult out{nav, err, biases};
  out.nav.C_bn = orthonormalized(
      (Mat3::Identity() - skew(err.attitude())) * nav.C_bn);
  out.nav.v = nav.v - err.velocity();
  out.nav.r = nav.r - err.position();
  out.biases.accel = biases.accel + err.accel_bias();
  out.biases.gyro = biases.gyro + err.gyro_bias();
  out.err.x.setZero();
  return out;
}

}  // namespace coopnav
