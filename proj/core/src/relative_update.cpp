#include "coopnav/relative_update.hpp"

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {
constexpr double kMinSeparation = 1e-6;  // m
}

CoupledBelief couple(const BeliefBlock& belief_a, const ErrorState& err_a,
                     const BeliefBlock& belief_b, const ErrorState& err_b,
                     const Mat15& sigma_ba) {
  const auto it = belief_a.sigma.find(belief_b.own_id);
  if (it == belief_a.sigma.end()) {
    throw Error("no correlation factor stored for the requested peer");
  }
  const Mat15 cross = it->second * sigma_ba.transpose();

  CoupledBelief out;
  out.id_a = belief_a.own_id;
  out.id_b = belief_b.own_id;
  out.P.block<15, 15>(0, 0) = belief_a.P;
  out.P.block<15, 15>(0, 15) = cross;
  out.P.block<15, 15>(15, 0) = cross.transpose();
  out.P.block<15, 15>(15, 15) = belief_b.P;
  out.x_err.head<15>() = err_a.x;
  out.x_err.tail<15>() = err_b.x;

  Eigen::SelfAdjointEigenSolver<Mat30> es(out.P, Eigen::EigenvaluesOnly);
  const double tol = 1e-9 * std::max(1.0, out.P.trace());
  if (es.eigenvalues().minCoeff() < -tol) {
    throw NotPsd("assembled joint covariance is not positive semidefinite");
  }
  return out;
}

double range_model(const Vec3& r_a, const Vec3& r_b) {
  const double h = (r_a - r_b).norm();
  if (h < kMinSeparation) {
    throw DegenerateGeometry("robots are co-located; range Jacobian undefined");
  }
  return h;
}

Row30 range_jacobian(const Vec3& r_a, const Vec3& r_b) {
  const double h = range_model(r_a, r_b);
  const Vec3 u = (r_a - r_b) / h;
  Row30 H = Row30::Zero();
  // d h(r_A - dr_A, r_B - dr_B) / d dr, evaluated at zero error.
  H.segment<3>(kPosIdx) = -u.transpose();
  H.segment<3>(15 + kPosIdx) = u.transpose();
  return H;
}

RelativeResult relative_update(const CoupledBelief& coupled,
                               const RangeMeasurement& meas,
                               const NavState& state_a,
                               const NavState& state_b) {
  const double h = range_model(state_a.r, state_b.r);
  const Row30 H = range_jacobian(state_a.r, state_b.r);

  const double S = (H * coupled.P * H.transpose())(0, 0) + meas.variance;
  if (!(S > 0.0) || S < 1e-14) {
    throw InnovationCovSingular(
        "range innovation covariance is numerically singular");
  }

  const Vec30 K = coupled.P * H.transpose() / S;
  const double innovation = meas.range - h - (H * coupled.x_err)(0, 0);

  RelativeResult out{coupled, innovation};
  out.coupled.x_err = coupled.x_err + K * innovation;
  const Mat30 IKH = Mat30::Identity() - K * H;
  out.coupled.P = IKH * coupled.P * IKH.transpose() +
                  K * meas.variance * K.transpose();
  out.coupled.P = (0.5 * (out.coupled.P + out.coupled.P.transpose())).eval();
  return out;
}

DecomposedPair decompose(const CoupledBelief& coupled) {
  DecomposedPair out;
  out.P_a = coupled.P.block<15, 15>(0, 0);
  out.P_b = coupled.P.block<15, 15>(15, 15);
  out.sigma_ab = Mat15::Identity();
  out.sigma_ba = coupled.P.block<15, 15>(15, 0);
  out.x_a = coupled.x_err.head<15>();
  out.x_b = coupled.x_err.tail<15>();
  return out;
}

AbsentCorrelationResult update_absent_correlations(BeliefBlock belief,
                                                   const Mat15& P_prior,
                                                   const Mat15& P_post,
                                                   RobotId peer_in_update,
                                                   Eq33Order order) {
  AbsentCorrelationResult out{std::move(belief)};

  auto invertible = [](const Mat15& m) {
    Eigen::FullPivLU<Mat15> f(m);
    return f.isInvertible();
  };

  // The as_printed order inverts the posterior, the literature order the
  // prior; either way the other operand left-multiplies.
  Mat15 target = order == Eq33Order::AsPrinted ? P_post : P_prior;
  if (!invertible(target)) {
    const double lambda = 1e-12 * target.trace() / 15.0;
    target += lambda * Mat15::Identity();
    out.regularized = true;
    if (!invertible(target)) {
      out.skipped = true;
      return out;
    }
  }

  const Mat15 map = order == Eq33Order::AsPrinted
                        ? Mat15(P_prior * target.inverse())
                        : Mat15(P_post * target.inverse());
  for (auto& [peer, sigma] : out.belief.sigma) {
    if (peer == peer_in_update) continue;
    sigma = map * sigma;
  }
  return out;
}

}  // namespace coopnav
