#pragma once

#include <Eigen/Dense>
#include <vector>

#include "coopnav/types.hpp"

namespace coopnav::test {

/// Joint error-state EKF over all robots, maintained as one explicit
/// (15n x 15n) covariance with no factorization. This is the reference
/// the decentralized correlation-factor bookkeeping is checked against.
///
/// Private measurements honor the decentralized information flow: only
/// the measuring robot's block receives gain (no other robot's belief can
/// change without communication). Range updates use the full joint gain,
/// exactly as the pairwise update does.
class CentralizedEkf {
 public:
  CentralizedEkf(int n_robots, const std::vector<Mat15>& P0);

  void propagate(int robot, const Mat15& phi, const Mat15& Q);

  void private_update(int robot, const Eigen::MatrixXd& H,
                      const Eigen::VectorXd& z, const Eigen::MatrixXd& R);

  void range_update(int robot_a, int robot_b, const Vec3& r_a,
                    const Vec3& r_b, double z, double variance);

  /// Return the robot's error slice and reset it (the caller folds it
  /// into the total state).
  Vec15 take_fold(int robot);

  Eigen::MatrixXd P;  // 15n x 15n
  Eigen::VectorXd x;  // 15n

 private:
  int n_;
};

}  // namespace coopnav::test
