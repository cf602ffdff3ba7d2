#pragma once

#include <map>
#include <vector>

#include "coopnav/agent.hpp"
#include "coopnav/scenario.hpp"

namespace coopnav {

/// One belief-trace sample (recorded at the IMU rate).
struct TraceRow {
  double t = 0.0;
  RobotId robot = 0;
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 ypr = Vec3::Zero();        // yaw, pitch, roll
  Vec3 p_pos_diag = Vec3::Zero();  // P(6,6), P(7,7), P(8,8)
  bool zu_active = false;
  int rel_peer = -1;  // peer id of a relative update since the last row
};

struct TruthRow {
  double t = 0.0;
  RobotId robot = 0;
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// Velocity-estimate error around each applied ZU, resolved against truth.
struct ZuErrorRecord {
  double t = 0.0;
  RobotId robot = 0;
  double err_before = 0.0;
  double err_after = 0.0;
};

/// Bias estimate vs truth around each applied ZU (pre- and post-update).
struct BiasSnapshot {
  double t = 0.0;
  RobotId robot = 0;
  Vec3 accel_est_pre = Vec3::Zero();
  Vec3 gyro_est_pre = Vec3::Zero();
  Vec3 accel_est = Vec3::Zero();  // posterior
  Vec3 gyro_est = Vec3::Zero();
  Vec3 accel_true = Vec3::Zero();
  Vec3 gyro_true = Vec3::Zero();
  Vec3 accel_var = Vec3::Zero();  // posterior marginals, diagonal
  Vec3 gyro_var = Vec3::Zero();
};

/// Structural health counters collected when validation is enabled.
struct InvariantReport {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double worst_symmetry = 0.0;
  double worst_min_eig = 0.0;  // most negative eigenvalue seen
};

struct RunOptions {
  /// Check covariance symmetry/PSD after every processed tick.
  bool validate_invariants = false;
};

struct RunArtifacts {
  std::vector<TruthRow> truth;
  std::vector<TraceRow> beliefs;
  std::vector<UpdateRecord> events;
  std::vector<ZuErrorRecord> zu_errors;
  std::vector<BiasSnapshot> bias_at_zu;
  std::map<RobotId, Vec3> true_accel_bias;
  std::map<RobotId, Vec3> true_gyro_bias;
  std::map<RobotId, std::uint64_t> stale_dropped;
  InvariantReport invariants;
};

/// Run one scenario to completion. Deterministic for a fixed config and
/// seed: the global event queue is ordered by timestamp with class and
/// robot-id tie-breaking, and every (robot, sensor) noise stream is
/// independently seeded.
RunArtifacts run_scenario(const ScenarioConfig& cfg,
                          const RunOptions& opts = {});

}  // namespace coopnav
