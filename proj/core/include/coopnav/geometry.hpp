#pragma once

#include <Eigen/Dense>

namespace coopnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Vec30 = Eigen::Matrix<double, 30, 1>;
using Mat30 = Eigen::Matrix<double, 30, 30>;

/// Skew-symmetric cross-product matrix of a 3-vector.
inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

/// Axial vector of the antisymmetric part of a matrix.
inline Vec3 vee(const Mat3& m) {
  const Mat3 a = 0.5 * (m - m.transpose());
  return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

/// Gram-Schmidt reorthonormalization of a near-rotation matrix.
/// The third column is rebuilt from a cross product so the result is
/// right-handed (det +1).
inline Mat3 orthonormalized(const Mat3& c) {
  Vec3 c0 = c.col(0).normalized();
  Vec3 c1 = (c.col(1) - c0.dot(c.col(1)) * c0).normalized();
  Vec3 c2 = c0.cross(c1);
  Mat3 out;
  out.col(0) = c0;
  out.col(1) = c1;
  out.col(2) = c2;
  return out;
}

/// Yaw, pitch, roll (ZYX) extracted from a body-to-nav DCM.
inline Vec3 euler_zyx(const Mat3& c_bn) {
  const double pitch = -std::asin(std::clamp(c_bn(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(c_bn(1, 0), c_bn(0, 0));
  const double roll = std::atan2(c_bn(2, 1), c_bn(2, 2));
  return Vec3(yaw, pitch, roll);
}

}  // namespace coopnav
