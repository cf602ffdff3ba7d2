#pragma once

#include <map>
#include <vector>

#include "coopnav/runner.hpp"

namespace coopnav {

struct AxisStats {
  double rmse = 0.0;
  double max_abs = 0.0;
  double median = 0.0;
  double std_dev = 0.0;
};

struct RobotMetrics {
  AxisStats east;
  AxisStats north;
  AxisStats up;
  AxisStats err3d;
  double initial_h_err = 0.0;
  double final_h_err = 0.0;
  double correction = 0.0;       // initial - final horizontal error, m
  double improvement_pct = 0.0;  // 100 * correction / initial error
};

struct MetricsReport {
  std::map<RobotId, RobotMetrics> per_robot;
};

/// Summary statistics of estimate-minus-truth position errors, with the
/// traces aligned nearest-neighbor within `align_tol` seconds. Throws
/// EmptyTrace when a robot has no aligned samples.
MetricsReport compute_metrics(const std::vector<TraceRow>& beliefs,
                              const std::vector<TruthRow>& truth,
                              double align_tol);

/// Paired A/B study: each seed runs twice, toggling the ZU flag of the
/// robots that have it enabled in `cfg`; every other noise stream is
/// identical between the two runs of a seed.
struct AbTrial {
  std::uint64_t seed = 0;
  MetricsReport with_zu;
  MetricsReport without_zu;
};

struct AbResult {
  std::vector<AbTrial> trials;
  std::vector<RobotId> zu_robots;
  /// 100 * (mean_without - mean_with) / mean_without, keyed by
  /// "<metric>" for each ZU robot (e.g. "rmse_u", "rmse_3d").
  std::map<RobotId, std::map<std::string, double>> improvement;
};

AbResult run_ab(const ScenarioConfig& cfg, int n_trials,
                const RunOptions& opts = {});

}  // namespace coopnav
