#pragma once

#include <string>
#include <vector>

#include "coopnav/agent.hpp"
#include "coopnav/config_text.hpp"
#include "coopnav/sensors.hpp"
#include "coopnav/truth.hpp"

namespace coopnav {

/// Per-robot scenario entry: motion script, stopping policy, and the
/// initial belief description.
struct RobotSpec {
  RobotId id = 0;
  MotionScript script;
  StopPolicy policy;
  bool zu_enabled = false;
  bool odom_enabled = true;

  /// Lost-robot initialization: the position estimate is offset from
  /// truth by this magnitude in a seeded random horizontal direction and
  /// the position covariance diagonal is its square.
  double init_error_horizontal = 0.0;
  double init_att_sigma = 0.01;  // rad
  double init_vel_sigma = 0.02;  // m/s
  double init_pos_sigma = 0.05;  // m, per axis (overridden by init error)
  /// Up-axis position prior; negative follows the horizontal prior. The
  /// lost-robot offset is horizontal, so a flat-world robot usually knows
  /// its height much better than its horizontal position.
  double init_pos_up_sigma = -1.0;  // m
  /// Draw the initial estimate errors from the initial covariance
  /// (used by consistency studies).
  bool draw_initial_errors = false;

  /// Initial bias knowledge. Negative means uncalibrated: the estimate
  /// starts at zero with the full draw-scale prior. Non-negative means
  /// the robot was navigating before and keeps a calibrated estimate:
  /// bias_hat = bias_true + N(0, sigma^2), prior diagonal sigma^2.
  double init_accel_bias_sigma = -1.0;  // m/s^2
  double init_gyro_bias_sigma = -1.0;   // rad/s
};

/// How the true IMU biases behave: constant per run, drawn from
/// N(0, instability^2) at seed time, optionally walking with the same
/// density the filter models.
struct BiasTruthModel {
  double accel_instability = 0.005;  // m/s^2
  double gyro_instability = 5e-4;    // rad/s
  bool random_walk = false;
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 120.0;  // s
  std::uint64_t seed = 1;
  double gate_distance = 2.5;  // m, UWB communication gate

  SensorModel sensors;
  NoiseSpec filter_noise;
  BiasTruthModel bias;

  double dwell = 0.5;             // s, stationary wait before the ZU
  double eps_enc = 1e-3;          // m/s, encoder standstill threshold
  double periodic_period = 20.0;  // s of motion between periodic stops

  double zu_r_gyro_var = 1e-6;  // (rad/s)^2
  double zu_r_vel_var = 1e-6;   // (m/s)^2

  UpdateOptions update_opts;                 // eq18_additive_term
  Eq33Order eq33 = Eq33Order::AsPrinted;

  std::vector<RobotSpec> robots;
  /// Communication whitelist; the first robot of each pair is the
  /// detector that initiates and computes the relative update.
  std::vector<std::pair<RobotId, RobotId>> pairs;

  const RobotSpec* find_robot(RobotId id) const;
  /// Throws ConfigError with a field-level message.
  void validate() const;
};

/// Bind a parsed document to a ScenarioConfig. Unset keys take the
/// defaults above (the published sensor table and scenario constants).
ScenarioConfig scenario_from_config(const ConfigDoc& doc);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace coopnav
