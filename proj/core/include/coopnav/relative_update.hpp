#pragma once

#include "coopnav/types.hpp"

namespace coopnav {

using Row30 = Eigen::Matrix<double, 1, 30>;

/// One UWB range sample.
struct RangeMeasurement {
  double range = 0.0;     // m
  double variance = 0.0;  // m^2
};

/// Joint 30-state system formed for a pairwise update. Robot A is the
/// detecting robot and occupies the leading block.
struct CoupledBelief {
  Mat30 P = Mat30::Zero();
  Vec30 x_err = Vec30::Zero();
  RobotId id_a = 0;
  RobotId id_b = 0;
};

/// Assemble the joint covariance [[P_A, S_AB],[S_AB', P_B]] with
/// S_AB = sigma_AB sigma_BA'. Throws NotPsd when the assembled matrix
/// fails the positive-semidefinite check beyond tolerance.
CoupledBelief couple(const BeliefBlock& belief_a, const ErrorState& err_a,
                     const BeliefBlock& belief_b, const ErrorState& err_b,
                     const Mat15& sigma_ba);

/// Euclidean range between two position estimates. Throws
/// DegenerateGeometry below 1e-6 m separation.
double range_model(const Vec3& r_a, const Vec3& r_b);

/// Derivative of the predicted range with respect to the joint error
/// state, under the same subtraction convention used by fold_correction:
/// the A position block is (r_B - r_A)'/h and the B block its negation.
Row30 range_jacobian(const Vec3& r_a, const Vec3& r_b);

/// Scalar-innovation Kalman update on the joint system,
/// innovation = z - h(r_A, r_B) - H x, Joseph-form covariance.
struct RelativeResult {
  CoupledBelief coupled;
  double innovation = 0.0;
};
RelativeResult relative_update(const CoupledBelief& coupled,
                               const RangeMeasurement& meas,
                               const NavState& state_a,
                               const NavState& state_b);

/// Split a posterior joint belief back into per-robot blocks. The
/// detecting robot keeps the identity factor; the detected robot stores
/// the joint posterior cross block, so the factored product reconstructs
/// it exactly.
struct DecomposedPair {
  Mat15 P_a;
  Mat15 P_b;
  Mat15 sigma_ab;  // stored by A, toward B (identity)
  Mat15 sigma_ba;  // stored by B, toward A (posterior cross block)
  Vec15 x_a;
  Vec15 x_b;
};
DecomposedPair decompose(const CoupledBelief& coupled);

/// Which operand order to use for the absent-robot correlation map.
enum class Eq33Order {
  AsPrinted,   // P_prior * P_post^-1
  Literature,  // P_post * P_prior^-1
};

/// Transform the correlation factors toward robots absent from the update
/// by the map relating this robot's prior and posterior covariance. The
/// factor toward `peer_in_update` is left alone (decompose already set
/// it). If the inversion fails, the posterior is regularized by
/// lambda = 1e-12 trace/15 and retried once; a second failure leaves the
/// factors unchanged and reports a warning.
struct AbsentCorrelationResult {
  BeliefBlock belief;
  bool regularized = false;
  bool skipped = false;
};
AbsentCorrelationResult update_absent_correlations(BeliefBlock belief,
                                                   const Mat15& P_prior,
                                                   const Mat15& P_post,
                                                   RobotId peer_in_update,
                                                   Eq33Order order);

}  // namespace coopnav
