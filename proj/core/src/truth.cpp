#include "coopnav/truth.hpp"

namespace coopnav {

TruthWorld::TruthWorld(std::map<RobotId, MotionScript> scripts)
    : scripts_(std::move(scripts)) {
  for (const auto& [id, script] : scripts_) {
    RobotTruth robot;
    robot.r = script.start;
    robot.holding = script.hold_until_first_relative;
    robot.finished = script.waypoints.empty();
    if (!robot.holding && !robot.finished) {
      robot.v = script.speed *
                (script.waypoints.front() - script.start).normalized();
    }
    robots_.emplace(id, robot);
  }
}

void TruthWorld::advance(double t_to) {
  if (t_to <= t_) return;
  for (auto& [id, robot] : robots_) {
    double dt = t_to - t_;
    if (robot.holding) {
      if (robot.hold_release_at < 0.0 || robot.hold_release_at >= t_to) {
        robot.v.setZero();
        continue;
      }
      dt = t_to - std::max(t_, robot.hold_release_at);
      robot.holding = false;
    }
    advance_robot(scripts_.at(id), robot, dt);
  }
  t_ = t_to;
}

void TruthWorld::advance_robot(const MotionScript& script, RobotTruth& robot,
                               double dt) {
  double remaining = dt;
  while (remaining > 0.0) {
    if (robot.holding || robot.stopped || robot.finished) {
      robot.v.setZero();
      return;
    }
    const Vec3 target = script.waypoints[robot.target_wp];
    const Vec3 delta = target - robot.r;
    const double dist = delta.norm();
    if (dist < 1e-12) {
      // Already at the waypoint; pick the next one.
      if (robot.direction > 0 &&
          robot.target_wp + 1 < script.waypoints.size()) {
        ++robot.target_wp;
      } else if (robot.direction < 0 && robot.target_wp > 0) {
        --robot.target_wp;
      } else if (script.loop && script.waypoints.size() > 1) {
        robot.direction = -robot.direction;
        robot.target_wp += robot.direction;
      } else {
        robot.finished = true;
        robot.v.setZero();
        return;
      }
      continue;
    }
    const Vec3 dir = delta / dist;
    robot.v = script.speed * dir;
    const double time_to_wp = dist / script.speed;
    if (time_to_wp > remaining) {
      robot.r += robot.v * remaining;
      return;
    }
    robot.r = target;
    remaining -= time_to_wp;
  }
}

void TruthWorld::command_stop(RobotId id) {
  RobotTruth& robot = robots_.at(id);
  robot.stopped = true;
  robot.v.setZero();
}

void TruthWorld::command_resume(RobotId id) {
  RobotTruth& robot = robots_.at(id);
  robot.stopped = false;
}

void TruthWorld::release_hold(RobotId id) {
  RobotTruth& robot = robots_.at(id);
  if (!robot.holding || robot.hold_release_at >= 0.0) return;
  robot.hold_release_at = t_ + scripts_.at(id).hold_release_delay;
}

}  // namespace coopnav
