#pragma once

#include <map>
#include <vector>

#include "coopnav/types.hpp"

namespace coopnav {

/// Waypoint-following script. The robot moves at constant speed toward
/// each waypoint in turn; with `loop` set it bounces back and forth along
/// the list. Stops and resumes are instantaneous; velocity is exactly
/// zero while stopped or holding.
struct MotionScript {
  Vec3 start = Vec3::Zero();
  std::vector<Vec3> waypoints;
  double speed = 0.2;  // m/s
  bool loop = false;
  bool hold_until_first_relative = false;
  /// Extra wait between the releasing relative update and actually
  /// moving off (lets the partner complete its fly-by).
  double hold_release_delay = 0.0;  // s
};

/// Ground-truth kinematic state plus the true sensor biases.
struct RobotTruth {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 C = Mat3::Identity();
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();

  std::size_t target_wp = 0;
  int direction = 1;
  bool holding = false;
  double hold_release_at = -1.0;  // set when the hold is released
  bool stopped = false;
  bool finished = false;
};

/// Deterministic multi-robot ground truth, integrated exactly between
/// events (piecewise-constant velocity, waypoint arrivals handled at
/// their exact times).
class TruthWorld {
 public:
  explicit TruthWorld(std::map<RobotId, MotionScript> scripts);

  /// Integrate all robots forward to `t_to` (no-op when t_to <= now).
  void advance(double t_to);

  void command_stop(RobotId id);
  void command_resume(RobotId id);
  /// Release a robot held by `hold_until_first_relative`; motion begins
  /// after the script's hold_release_delay has elapsed.
  void release_hold(RobotId id);

  const RobotTruth& truth(RobotId id) const { return robots_.at(id); }
  RobotTruth& mutable_truth(RobotId id) { return robots_.at(id); }
  double time() const { return t_; }

 private:
  void advance_robot(const MotionScript& script, RobotTruth& robot,
                     double dt);

  double t_ = 0.0;
  std::map<RobotId, MotionScript> scripts_;
  std::map<RobotId, RobotTruth> robots_;
};

}  // namespace coopnav
