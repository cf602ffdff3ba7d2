#include "coopnav/private_updates.hpp"

#include "coopnav/errors.hpp"

namespace coopnav {

Vec6 innovation_posvel(const Vec3& v_meas, const Vec3& r_meas,
                       const NavState& state) {
  Vec6 z;
  z.head<3>() = v_meas - state.v;
  z.tail<3>() = r_meas - state.r;
  return z;
}

Vec3 innovation_posonly(const Vec3& r_meas, const NavState& state) {
  return r_meas - state.r;
}

Vec3 innovation_odomvel(const Vec3& v_meas, const NavState& state) {
  return v_meas - state.v;
}

Vec6 zupt_innovation(const Vec3& omega_corrected, const Vec3& v_estimate) {
  Vec6 z;
  z.head<3>() = -omega_corrected;
  z.tail<3>() = -v_estimate;
  return z;
}

Mat6x15 H_posvel() {
  Mat6x15 H = Mat6x15::Zero();
  H.block<6, 6>(0, kVelIdx) = -Eigen::Matrix<double, 6, 6>::Identity();
  return H;
}

Mat3x15 H_posonly() {
  Mat3x15 H = Mat3x15::Zero();
  H.block<3, 3>(0, kPosIdx) = -Mat3::Identity();
  return H;
}

Mat3x15 H_odomvel() {
  Mat3x15 H = Mat3x15::Zero();
  H.block<3, 3>(0, kVelIdx) = -Mat3::Identity();
  return H;
}

Mat6x15 H_zupt() {
  Mat6x15 H = Mat6x15::Zero();
  H.block<3, 3>(0, kBgIdx) = -Mat3::Identity();
  H.block<3, 3>(3, kVelIdx) = -Mat3::Identity();
  return H;
}

PrivateResult apply_private(BeliefBlock belief, ErrorState err,
                            const Eigen::MatrixXd& H, const Eigen::VectorXd& z,
                            const Eigen::MatrixXd& R,
                            const UpdateOptions& opts) {
  const Eigen::MatrixXd S = H * belief.P * H.transpose() + R;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!std::isfinite(lmax) || !(lmin > 0.0) || lmin < 1e-16 * lmax) {
    throw InnovationCovSingular(
        "innovation covariance is numerically singular");
  }

  const Eigen::MatrixXd K =
      S.ldlt().solve(H * belief.P).transpose();  // K = P H' S^-1

  PrivateResult out{std::move(belief), err, z - H * err.x};
  out.err.x = err.x + K * out.innovation;

  const Mat15 IKH = Mat15::Identity() - K * H;
  const Mat15 KRKt = K * R * K.transpose();
  out.belief.P = IKH * out.belief.P * IKH.transpose() + KRKt;
  out.belief.symmetrize();

  for (auto& [peer, sigma] : out.belief.sigma) {
    if (opts.eq18_additive_term) {
      sigma = IKH * sigma * IKH.transpose() + KRKt;
    } else {
      sigma = IKH * sigma;
    }
  }
  return out;
}

}  // namespace coopnav
