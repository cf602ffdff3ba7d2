#include "coopnav/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "coopnav/errors.hpp"

namespace coopnav {

const RobotSpec* ScenarioConfig::find_robot(RobotId id) const {
  for (const RobotSpec& r : robots) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

void ScenarioConfig::validate() const {
  if (duration <= 0.0) throw ConfigError("duration: must be positive");
  if (gate_distance <= 0.0) {
    throw ConfigError("gate_distance: must be positive");
  }
  if (sensors.imu.rate <= 0.0 || sensors.encoder.rate <= 0.0 ||
      sensors.gnss.rate <= 0.0 || sensors.uwb.rate <= 0.0) {
    throw ConfigError("sensors: all rates must be positive");
  }
  if (sensors.imu.accel_sigma < 0.0 || sensors.imu.gyro_sigma < 0.0 ||
      sensors.encoder.sigma < 0.0 || sensors.gnss.pos_sigma < 0.0 ||
      sensors.gnss.vel_sigma < 0.0 || sensors.uwb.sigma < 0.0) {
    throw ConfigError("sensors: noise sigmas must be non-negative");
  }
  if (filter_noise.arw < 0.0 || filter_noise.vrw < 0.0 ||
      filter_noise.gyro_bias_instab < 0.0 ||
      filter_noise.accel_bias_instab < 0.0) {
    throw ConfigError("filter: noise densities must be non-negative");
  }
  if (dwell <= 0.0) throw ConfigError("stopping.dwell: must be positive");
  if (robots.empty()) throw ConfigError("robot: at least one robot required");
  for (const RobotSpec& r : robots) {
    const std::string prefix = "robot." + std::to_string(r.id) + ".";
    if (r.script.speed <= 0.0) {
      throw ConfigError(prefix + "speed: must be positive");
    }
    if (r.policy.cov_threshold <= 0.0) {
      throw ConfigError(prefix + "cov_threshold: must be positive");
    }
    if (r.init_error_horizontal < 0.0) {
      throw ConfigError(prefix + "init_error_horizontal: must be >= 0");
    }
  }
  for (const auto& [a, b] : pairs) {
    if (a == b) throw ConfigError("comm.pairs: a robot cannot pair itself");
    if (!find_robot(a) || !find_robot(b)) {
      throw ConfigError("comm.pairs: pair references an unknown robot id");
    }
  }
}

ScenarioConfig scenario_from_config(const ConfigDoc& doc) {
  ScenarioConfig cfg;
  cfg.name = doc.get_string("name", cfg.name);
  cfg.duration = doc.get_double("duration", cfg.duration);
  cfg.seed = doc.get_u64("seed", cfg.seed);
  cfg.gate_distance = doc.get_double("gate_distance", cfg.gate_distance);

  cfg.sensors.imu.rate = doc.get_double("sensors.imu_rate", 50.0);
  cfg.sensors.imu.accel_sigma =
      doc.get_double("sensors.imu_accel_sigma", 0.001);
  cfg.sensors.imu.gyro_sigma = doc.get_double("sensors.imu_gyro_sigma", 0.001);
  cfg.sensors.encoder.rate = doc.get_double("sensors.encoder_rate", 30.0);
  cfg.sensors.encoder.sigma = doc.get_double("sensors.encoder_sigma", 0.01);
  cfg.sensors.encoder.up_sigma =
      doc.get_double("sensors.encoder_up_sigma", 1e3);
  cfg.sensors.gnss.rate = doc.get_double("sensors.gnss_rate", 1.0);
  cfg.sensors.gnss.pos_sigma = doc.get_double("sensors.gnss_pos_sigma", 0.1);
  cfg.sensors.gnss.vel_sigma = doc.get_double("sensors.gnss_vel_sigma", 0.02);
  cfg.sensors.gnss.enabled = doc.get_bool("sensors.gnss_enabled", false);
  cfg.sensors.uwb.rate = doc.get_double("sensors.uwb_rate", 1.0);
  cfg.sensors.uwb.sigma = doc.get_double("sensors.uwb_sigma", 0.05);

  cfg.bias.accel_instability =
      doc.get_double("bias_truth.accel_instability", 0.005);
  cfg.bias.gyro_instability =
      doc.get_double("bias_truth.gyro_instability", 5e-4);
  cfg.bias.random_walk = doc.get_bool("bias_truth.random_walk", false);

  const double imu_dt = 1.0 / cfg.sensors.imu.rate;
  cfg.filter_noise.arw = doc.get_double(
      "filter.arw", cfg.sensors.imu.gyro_sigma * std::sqrt(imu_dt));
  cfg.filter_noise.vrw = doc.get_double(
      "filter.vrw", cfg.sensors.imu.accel_sigma * std::sqrt(imu_dt));
  cfg.filter_noise.accel_bias_instab = doc.get_double(
      "filter.accel_bias_instability", cfg.bias.accel_instability);
  cfg.filter_noise.gyro_bias_instab = doc.get_double(
      "filter.gyro_bias_instability", cfg.bias.gyro_instability);
  cfg.zu_r_gyro_var = doc.get_double("filter.zu_r_gyro_var", 1e-6);
  cfg.zu_r_vel_var = doc.get_double("filter.zu_r_vel_var", 1e-6);
  cfg.update_opts.eq18_additive_term =
      doc.get_bool("filter.eq18_additive_term", true);
  const std::string order =
      doc.get_string("filter.eq33_order", "as_printed");
  if (order == "as_printed") {
    cfg.eq33 = Eq33Order::AsPrinted;
  } else if (order == "literature") {
    cfg.eq33 = Eq33Order::Literature;
  } else {
    throw ConfigError(
        "filter.eq33_order: expected as_printed or literature, got '" +
        order + "'");
  }

  cfg.dwell = doc.get_double("stopping.dwell", 0.5);
  cfg.eps_enc = doc.get_double("stopping.eps_enc", 1e-3);
  cfg.periodic_period = doc.get_double("stopping.periodic_period", 20.0);

  for (const std::string& name : doc.subsections("robot")) {
    RobotSpec spec;
    const std::string prefix = "robot." + name + ".";
    try {
      spec.id = static_cast<RobotId>(std::stoul(name));
    } catch (const std::exception&) {
      throw ConfigError("robot section name must be an integer id, got '" +
                        name + "'");
    }
    spec.script.start = doc.get_vec3(prefix + "start", Vec3::Zero());
    spec.script.waypoints = doc.get_vec3_list(prefix + "waypoints");
    spec.script.speed = doc.get_double(prefix + "speed", 0.2);
    spec.script.loop = doc.get_bool(prefix + "loop", false);
    spec.script.hold_until_first_relative =
        doc.get_bool(prefix + "hold_until_first_relative", false);
    spec.script.hold_release_delay =
        doc.get_double(prefix + "hold_release_delay", 0.0);
    spec.zu_enabled = doc.get_bool(prefix + "zu", false);
    spec.odom_enabled = doc.get_bool(prefix + "odom", true);

    const std::string mode = doc.get_string(prefix + "stop_mode", "none");
    if (mode == "none") {
      spec.policy.mode = StopPolicy::Mode::None;
    } else if (mode == "autonomous") {
      spec.policy.mode = StopPolicy::Mode::Autonomous;
    } else if (mode == "periodic") {
      spec.policy.mode = StopPolicy::Mode::Periodic;
    } else if (mode == "auto_then_periodic") {
      spec.policy.mode = StopPolicy::Mode::AutoThenPeriodic;
    } else {
      throw ConfigError(prefix + "stop_mode: expected one of none, "
                        "autonomous, periodic, auto_then_periodic; got '" +
                        mode + "'");
    }
    spec.policy.cov_threshold = doc.get_double(prefix + "cov_threshold", 5.0);
    spec.policy.period =
        doc.get_double(prefix + "period", cfg.periodic_period);
    spec.policy.dwell = cfg.dwell;

    spec.init_error_horizontal =
        doc.get_double(prefix + "init_error_horizontal", 0.0);
    spec.init_att_sigma = doc.get_double(prefix + "init_att_sigma", 0.01);
    spec.init_vel_sigma = doc.get_double(prefix + "init_vel_sigma", 0.02);
    spec.init_pos_sigma = doc.get_double(prefix + "init_pos_sigma", 0.05);
    spec.init_pos_up_sigma =
        doc.get_double(prefix + "init_pos_up_sigma", -1.0);
    spec.draw_initial_errors =
        doc.get_bool(prefix + "draw_initial_errors", false);
    spec.init_accel_bias_sigma =
        doc.get_double(prefix + "init_accel_bias_sigma", -1.0);
    spec.init_gyro_bias_sigma =
        doc.get_double(prefix + "init_gyro_bias_sigma", -1.0);

    cfg.robots.push_back(std::move(spec));
  }
  std::sort(cfg.robots.begin(), cfg.robots.end(),
            [](const RobotSpec& a, const RobotSpec& b) { return a.id < b.id; });

  for (const auto& [a, b] : doc.get_int_pairs("comm.pairs")) {
    cfg.pairs.emplace_back(static_cast<RobotId>(a), static_cast<RobotId>(b));
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return scenario_from_config(ConfigDoc::parse_file(path));
}

}  // namespace coopnav
