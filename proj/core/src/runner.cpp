#include "coopnav/runner.hpp"

#include <memory>
#include <queue>

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {

enum TickClass : int { kImu = 0, kEncoder = 1, kGnss = 2, kUwb = 3 };

struct Tick {
  double t;
  int klass;
  std::uint64_t index;  // robot id, or pair index for UWB
  std::uint64_t k;      // tick counter for re-arming
};

struct TickAfter {
  bool operator()(const Tick& a, const Tick& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.klass != b.klass) return a.klass > b.klass;
    return a.index > b.index;
  }
};

struct RunnerRobot {
  RobotSpec spec;
  std::unique_ptr<Agent> agent;
  GaussianStream imu_stream;
  GaussianStream enc_stream;
  GaussianStream gnss_stream;
  GaussianStream walk_stream;
  Vec3 prev_v = Vec3::Zero();
  Mat3 prev_C = Mat3::Identity();
  std::size_t scanned = 0;  // update records already folded into the trace
  int rel_peer_since_row = -1;
  bool had_relative = false;
};

AgentConfig make_agent_config(const ScenarioConfig& cfg,
                              const RobotSpec& spec) {
  AgentConfig acfg;
  acfg.id = spec.id;
  for (const RobotSpec& other : cfg.robots) {
    if (other.id != spec.id) acfg.peers.push_back(other.id);
  }
  acfg.noise = cfg.filter_noise;
  acfg.policy = spec.policy;
  acfg.policy.dwell = cfg.dwell;
  acfg.zu_enabled = spec.zu_enabled;
  acfg.odom_enabled = spec.odom_enabled;
  acfg.gnss_enabled = cfg.sensors.gnss.enabled;
  acfg.R_odom = Vec3(cfg.sensors.encoder.sigma * cfg.sensors.encoder.sigma,
                     cfg.sensors.encoder.sigma * cfg.sensors.encoder.sigma,
                     cfg.sensors.encoder.up_sigma * cfg.sensors.encoder.up_sigma)
                    .asDiagonal();
  Eigen::Matrix<double, 6, 1> r_gnss;
  const double sv2 = cfg.sensors.gnss.vel_sigma * cfg.sensors.gnss.vel_sigma;
  const double sp2 = cfg.sensors.gnss.pos_sigma * cfg.sensors.gnss.pos_sigma;
  r_gnss << sv2, sv2, sv2, sp2, sp2, sp2;
  acfg.R_gnss = r_gnss.asDiagonal();
  Eigen::Matrix<double, 6, 1> r_zu;
  r_zu << cfg.zu_r_gyro_var, cfg.zu_r_gyro_var, cfg.zu_r_gyro_var,
      cfg.zu_r_vel_var, cfg.zu_r_vel_var, cfg.zu_r_vel_var;
  acfg.R_zupt = r_zu.asDiagonal();
  acfg.update_opts = cfg.update_opts;
  acfg.eq33 = cfg.eq33;
  acfg.eps_enc = cfg.eps_enc;
  return acfg;
}

Mat15 initial_covariance(const ScenarioConfig& cfg, const RobotSpec& spec) {
  Vec15 d;
  const double att2 = spec.init_att_sigma * spec.init_att_sigma;
  const double vel2 = spec.init_vel_sigma * spec.init_vel_sigma;
  double pos2 = spec.init_pos_sigma * spec.init_pos_sigma;
  if (spec.init_error_horizontal > 0.0) {
    pos2 = spec.init_error_horizontal * spec.init_error_horizontal;
  }
  const double pos_up2 = spec.init_pos_up_sigma >= 0.0
                             ? spec.init_pos_up_sigma * spec.init_pos_up_sigma
                             : pos2;
  // Bias priors: the draw scale for a cold start, or the calibration
  // level for a robot that kept its estimates; the filter's process-noise
  // densities govern only the in-run walk.
  const double ba_sigma = spec.init_accel_bias_sigma >= 0.0
                              ? spec.init_accel_bias_sigma
                              : cfg.bias.accel_instability;
  const double bg_sigma = spec.init_gyro_bias_sigma >= 0.0
                              ? spec.init_gyro_bias_sigma
                              : cfg.bias.gyro_instability;
  const double ba2 = ba_sigma * ba_sigma;
  const double bg2 = bg_sigma * bg_sigma;
  d << att2, att2, att2, vel2, vel2, vel2, pos2, pos2, pos_up2, ba2, ba2,
      ba2, bg2, bg2, bg2;
  Mat15 P = d.asDiagonal();
  return P;
}

NavState initial_estimate(const RobotSpec& spec, const RobotTruth& truth,
                          GaussianStream& init_stream) {
  NavState nav;
  nav.C_bn = truth.C;
  nav.v = truth.v;
  nav.r = truth.r;
  nav.t = 0.0;

  if (spec.init_error_horizontal > 0.0) {
    // Seeded random horizontal direction for the initial position offset.
    double gx = init_stream.next();
    double gy = init_stream.next();
    double norm = std::hypot(gx, gy);
    while (norm < 1e-9) {
      gx = init_stream.next();
      gy = init_stream.next();
      norm = std::hypot(gx, gy);
    }
    nav.r += spec.init_error_horizontal * Vec3(gx / norm, gy / norm, 0.0);
  }
  if (spec.draw_initial_errors) {
    const Vec3 dpsi = init_stream.next_vec3(spec.init_att_sigma);
    nav.C_bn = orthonormalized((Mat3::Identity() + skew(dpsi)) * truth.C);
    nav.v = truth.v + init_stream.next_vec3(spec.init_vel_sigma);
    nav.r = truth.r + init_stream.next_vec3(spec.init_pos_sigma);
  }
  return nav;
}

class Runner {
 public:
  Runner(const ScenarioConfig& cfg, const RunOptions& opts)
      : cfg_(cfg), opts_(opts), world_(make_scripts(cfg)) {
    const std::uint64_t seed = cfg.seed;
    for (const RobotSpec& spec : cfg.robots) {
      GaussianStream bias_stream(
          stream_seed(seed, spec.id, SensorChannel::BiasDraw));
      GaussianStream init_stream(
          stream_seed(seed, spec.id, SensorChannel::Init));

      RobotTruth& truth = world_.mutable_truth(spec.id);
      truth.accel_bias = bias_stream.next_vec3(cfg.bias.accel_instability);
      truth.gyro_bias = bias_stream.next_vec3(cfg.bias.gyro_instability);
      artifacts_.true_accel_bias[spec.id] = truth.accel_bias;
      artifacts_.true_gyro_bias[spec.id] = truth.gyro_bias;

      BeliefBlock belief;
      belief.own_id = spec.id;
      belief.P = initial_covariance(cfg, spec);

      ImuBiases init_biases;
      if (spec.init_accel_bias_sigma >= 0.0) {
        init_biases.accel = truth.accel_bias +
                            init_stream.next_vec3(spec.init_accel_bias_sigma);
      }
      if (spec.init_gyro_bias_sigma >= 0.0) {
        init_biases.gyro = truth.gyro_bias +
                           init_stream.next_vec3(spec.init_gyro_bias_sigma);
      }

      RunnerRobot robot{
          spec,
          std::make_unique<Agent>(make_agent_config(cfg, spec),
                                  initial_estimate(spec, truth, init_stream),
                                  std::move(belief), init_biases),
          GaussianStream(stream_seed(seed, spec.id, SensorChannel::Imu)),
          GaussianStream(stream_seed(seed, spec.id, SensorChannel::Encoder)),
          GaussianStream(stream_seed(seed, spec.id, SensorChannel::Gnss)),
          GaussianStream(stream_seed(seed, spec.id, SensorChannel::BiasDraw) ^
                         0x5a5a5a5aULL),
          truth.v,
          truth.C};
      robots_.emplace(spec.id, std::move(robot));
    }
    for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
      uwb_streams_.emplace_back(stream_seed(seed, cfg.pairs[i].first,
                                            cfg.pairs[i].second,
                                            SensorChannel::Uwb));
    }
  }

  RunArtifacts run() {
    arm_ticks();
    record_rows(0.0);

    while (!queue_.empty()) {
      const Tick tick = queue_.top();
      queue_.pop();
      if (tick.t > cfg_.duration + 1e-9) continue;
      world_.advance(tick.t);
      switch (tick.klass) {
        case kImu:
          process_imu(tick);
          break;
        case kEncoder:
          process_encoder(tick);
          break;
        case kGnss:
          process_gnss(tick);
          break;
        case kUwb:
          process_uwb(tick);
          break;
      }
      rearm(tick);
      if (opts_.validate_invariants) validate_beliefs();
    }

    finalize();
    return std::move(artifacts_);
  }

 private:
  static std::map<RobotId, MotionScript> make_scripts(
      const ScenarioConfig& cfg) {
    std::map<RobotId, MotionScript> scripts;
    for (const RobotSpec& spec : cfg.robots) {
      scripts.emplace(spec.id, spec.script);
    }
    return scripts;
  }

  void arm_ticks() {
    for (const RobotSpec& spec : cfg_.robots) {
      queue_.push({1.0 / cfg_.sensors.imu.rate, kImu, spec.id, 1});
      queue_.push({1.0 / cfg_.sensors.encoder.rate, kEncoder, spec.id, 1});
      if (cfg_.sensors.gnss.enabled) {
        queue_.push({1.0 / cfg_.sensors.gnss.rate, kGnss, spec.id, 1});
      }
    }
    for (std::size_t i = 0; i < cfg_.pairs.size(); ++i) {
      queue_.push({1.0 / cfg_.sensors.uwb.rate, kUwb, i, 1});
    }
  }

  void rearm(const Tick& tick) {
    const double rate = tick.klass == kImu       ? cfg_.sensors.imu.rate
                        : tick.klass == kEncoder ? cfg_.sensors.encoder.rate
                        : tick.klass == kGnss    ? cfg_.sensors.gnss.rate
                                                 : cfg_.sensors.uwb.rate;
    const double t_next = static_cast<double>(tick.k + 1) / rate;
    if (t_next <= cfg_.duration + 1e-9) {
      queue_.push({t_next, tick.klass, tick.index, tick.k + 1});
    }
  }

  void process_imu(const Tick& tick) {
    RunnerRobot& robot = robots_.at(static_cast<RobotId>(tick.index));
    RobotTruth& truth = world_.mutable_truth(robot.spec.id);
    const double dt = 1.0 / cfg_.sensors.imu.rate;

    if (cfg_.bias.random_walk) {
      // The walk density matches what the filter's Q models.
      truth.accel_bias += robot.walk_stream.next_vec3(
          cfg_.filter_noise.accel_bias_instab * std::sqrt(dt));
      truth.gyro_bias += robot.walk_stream.next_vec3(
          cfg_.filter_noise.gyro_bias_instab * std::sqrt(dt));
    }

    const ImuSample sample = sample_imu(
        robot.prev_v, truth.v, robot.prev_C, truth.C, dt, truth.accel_bias,
        truth.gyro_bias, cfg_.sensors.imu.accel_sigma,
        cfg_.sensors.imu.gyro_sigma, robot.imu_stream);
    robot.prev_v = truth.v;
    robot.prev_C = truth.C;

    deliver(robot.spec.id,
            {AgentEvent::Kind::ImuTick, tick.t, ImuTickPayload{sample}});
    record_row(tick.t, robot);
  }

  void process_encoder(const Tick& tick) {
    RunnerRobot& robot = robots_.at(static_cast<RobotId>(tick.index));
    const RobotTruth& truth = world_.truth(robot.spec.id);
    const EncoderSample s =
        sample_encoder(truth.v, cfg_.sensors.encoder.sigma, robot.enc_stream);
    deliver(robot.spec.id, {AgentEvent::Kind::EncoderTick, tick.t,
                            EncoderTickPayload{s.v_meas, s.tick_speed}});
  }

  void process_gnss(const Tick& tick) {
    RunnerRobot& robot = robots_.at(static_cast<RobotId>(tick.index));
    const RobotTruth& truth = world_.truth(robot.spec.id);
    const GnssSample s =
        sample_gnss(truth.r, truth.v, cfg_.sensors.gnss.pos_sigma,
                    cfg_.sensors.gnss.vel_sigma, robot.gnss_stream);
    deliver(robot.spec.id, {AgentEvent::Kind::GnssTick, tick.t,
                            GnssTickPayload{s.pos, s.vel}});
  }

  void process_uwb(const Tick& tick) {
    const auto& [detector, detected] = cfg_.pairs[tick.index];
    const RobotTruth& ta = world_.truth(detector);
    const RobotTruth& tb = world_.truth(detected);
    const auto meas = sample_uwb(ta.r, tb.r, cfg_.sensors.uwb.sigma,
                                 cfg_.gate_distance, uwb_streams_[tick.index]);
    if (!meas.has_value()) return;
    RunnerRobot& a = robots_.at(detector);
    RunnerRobot& b = robots_.at(detected);
    if (a.agent->frozen() || b.agent->frozen()) return;

    deliver(detector, {AgentEvent::Kind::RangeDetected, tick.t,
                       RangeDetectedPayload{detected, *meas}});

    if (!a.had_relative) {
      a.had_relative = true;
      world_.release_hold(detector);
    }
    if (!b.had_relative) {
      b.had_relative = true;
      world_.release_hold(detected);
    }
  }

  void deliver(RobotId to, const AgentEvent& event) {
    RunnerRobot& robot = robots_.at(to);
    std::vector<OutboundMessage> out;
    try {
      out = robot.agent->step(event);
    } catch (const DegenerateGeometry&) {
      return;  // co-located estimates; skip this range sample
    }
    harvest(robot);
    for (const OutboundMessage& msg : out) {
      if (msg.to == to &&
          msg.event.kind == AgentEvent::Kind::StopCommand) {
        world_.command_stop(to);
        continue;
      }
      if (msg.to == to &&
          msg.event.kind == AgentEvent::Kind::ResumeCommand) {
        world_.command_resume(to);
        continue;
      }
      deliver(msg.to, msg.event);
    }
  }

  /// Pull new update records out of an agent: resolve ZU snapshots
  /// against truth and remember relative peers until the next trace row.
  void harvest(RunnerRobot& robot) {
    const auto& records = robot.agent->records();
    const RobotTruth& truth = world_.truth(robot.spec.id);
    for (std::size_t i = robot.scanned; i < records.size(); ++i) {
      const UpdateRecord& rec = records[i];
      if (rec.kind.rfind("relative:", 0) == 0) {
        robot.rel_peer_since_row = std::stoi(rec.kind.substr(9));
      } else if (rec.kind == "zupt") {
        const auto& snaps = robot.agent->zu_snapshots();
        const ZuVelocitySnapshot& snap = snaps.back();
        artifacts_.zu_errors.push_back(
            {rec.t, robot.spec.id, (snap.v_before - truth.v).norm(),
             (snap.v_after - truth.v).norm()});
        BiasSnapshot bias;
        bias.t = rec.t;
        bias.robot = robot.spec.id;
        bias.accel_est_pre = snap.accel_bias_before;
        bias.gyro_est_pre = snap.gyro_bias_before;
        bias.accel_est = robot.agent->biases().accel;
        bias.gyro_est = robot.agent->biases().gyro;
        bias.accel_true = truth.accel_bias;
        bias.gyro_true = truth.gyro_bias;
        bias.accel_var =
            robot.agent->belief().P.diagonal().segment<3>(kBaIdx);
        bias.gyro_var = robot.agent->belief().P.diagonal().segment<3>(kBgIdx);
        artifacts_.bias_at_zu.push_back(bias);
      }
    }
    robot.scanned = records.size();
  }

  void record_row(double t, RunnerRobot& robot) {
    const RobotTruth& truth = world_.truth(robot.spec.id);
    artifacts_.truth.push_back({t, robot.spec.id, truth.r, truth.v});

    const Agent& agent = *robot.agent;
    TraceRow row;
    row.t = t;
    row.robot = robot.spec.id;
    row.r = agent.nav().r;
    row.v = agent.nav().v;
    row.ypr = euler_zyx(agent.nav().C_bn);
    row.p_pos_diag = agent.belief().P.diagonal().segment<3>(kPosIdx);
    row.zu_active = agent.in_stop_phase();
    row.rel_peer = robot.rel_peer_since_row;
    robot.rel_peer_since_row = -1;
    artifacts_.beliefs.push_back(row);
  }

  void record_rows(double t) {
    for (auto& [id, robot] : robots_) record_row(t, robot);
  }

  void validate_beliefs() {
    for (auto& [id, robot] : robots_) {
      const BeliefBlock& b = robot.agent->belief();
      ++artifacts_.invariants.checks;
      const double sym = b.symmetry_error();
      const double min_eig = b.min_eigenvalue();
      artifacts_.invariants.worst_symmetry =
          std::max(artifacts_.invariants.worst_symmetry, sym);
      artifacts_.invariants.worst_min_eig =
          std::min(artifacts_.invariants.worst_min_eig, min_eig);
      const double psd_tol = -1e-9 * std::max(1.0, b.P.trace());
      if (sym > 1e-10 || min_eig < psd_tol) {
        ++artifacts_.invariants.violations;
      }
    }
  }

  void finalize() {
    for (auto& [id, robot] : robots_) {
      harvest(robot);
      const auto& records = robot.agent->records();
      artifacts_.events.insert(artifacts_.events.end(), records.begin(),
                               records.end());
      artifacts_.stale_dropped[id] = robot.agent->stale_dropped();
    }
    std::stable_sort(artifacts_.events.begin(), artifacts_.events.end(),
                     [](const UpdateRecord& a, const UpdateRecord& b) {
                       if (a.t != b.t) return a.t < b.t;
                       return a.robot < b.robot;
                     });
  }

  const ScenarioConfig& cfg_;
  RunOptions opts_;
  TruthWorld world_;
  std::map<RobotId, RunnerRobot> robots_;
  std::vector<GaussianStream> uwb_streams_;
  std::priority_queue<Tick, std::vector<Tick>, TickAfter> queue_;
  RunArtifacts artifacts_;
};

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  return Runner(cfg, opts).run();
}

}  // namespace coopnav
