#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coopnav/message.hpp"
#include "coopnav/private_updates.hpp"
#include "coopnav/relative_update.hpp"
#include "coopnav/types.hpp"

namespace coopnav {

struct StopPolicy {
  enum class Mode { None, Autonomous, Periodic, AutoThenPeriodic };
  Mode mode = Mode::None;
  double cov_threshold = 5.0;  // m^2, position-covariance diagonal trigger
  double period = 20.0;        // s of motion between periodic stops
  double dwell = 0.5;          // s stationary before the ZU fires
};

struct MotionStatus {
  bool cmd_vel_zero = false;
  double encoder_speed = 0.0;
  std::optional<double> stationary_since;
};

/// True when the robot has been verifiably stationary (zero velocity
/// command and encoder speed below threshold) for at least `dwell`
/// seconds.
bool detect_stationary(const MotionStatus& status, double now, double dwell);

enum class StopDecision { Continue, IssueStop };

/// Mutable stopping-heuristic bookkeeping owned by the agent.
struct StopState {
  bool periodic_engaged = false;  // AutoThenPeriodic switched over
  double motion_time = 0.0;       // motion seconds since the last stop
  bool stopped = false;           // a commanded stop is in progress
};

/// Autonomous mode stops when any position-covariance diagonal exceeds
/// the threshold; periodic mode stops after `period` seconds of motion;
/// AutoThenPeriodic follows the autonomous rule until the switch is
/// engaged.
StopDecision stop_decision(const Mat15& P, const StopPolicy& policy,
                           const StopState& state);

// --- Agent events -----------------------------------------------------

struct ImuTickPayload {
  ImuSample sample;
};
struct EncoderTickPayload {
  Vec3 v_meas = Vec3::Zero();  // nav-frame velocity measurement
  double tick_speed = 0.0;     // standstill channel, zero when stopped
};
struct GnssTickPayload {
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
};
struct RangeDetectedPayload {
  RobotId peer = 0;
  RangeMeasurement meas;
};
struct PeerRequestPayload {
  RobotId requester = 0;
};
struct PeerBeliefReplyPayload {
  BeliefPayload payload;
};
struct PeerPosteriorPayload {
  BeliefPayload payload;
};
struct StopCommandPayload {};
struct ResumeCommandPayload {};

struct AgentEvent {
  enum class Kind {
    ImuTick,
    EncoderTick,
    GnssTick,
    RangeDetected,
    PeerRequest,
    PeerBeliefReply,
    PeerPosterior,
    StopCommand,
    ResumeCommand,
  };
  Kind kind;
  double t = 0.0;
  std::variant<ImuTickPayload, EncoderTickPayload, GnssTickPayload,
               RangeDetectedPayload, PeerRequestPayload,
               PeerBeliefReplyPayload, PeerPosteriorPayload,
               StopCommandPayload, ResumeCommandPayload>
      payload;
};

struct OutboundMessage {
  RobotId to = 0;
  AgentEvent event;
};

/// One row of the per-robot update log.
struct UpdateRecord {
  double t = 0.0;
  RobotId robot = 0;
  std::string kind;
  double innovation_norm = 0.0;
  double trace_P_before = 0.0;
  double trace_P_after = 0.0;
};

/// Estimate snapshots around each applied ZU, kept for the
/// error-contraction and bias-convergence checks.
struct ZuVelocitySnapshot {
  double t = 0.0;
  Vec3 v_before = Vec3::Zero();
  Vec3 v_after = Vec3::Zero();
  Vec3 accel_bias_before = Vec3::Zero();
  Vec3 gyro_bias_before = Vec3::Zero();
};

struct AgentConfig {
  RobotId id = 0;
  std::vector<RobotId> peers;
  NoiseSpec noise;
  StopPolicy policy;
  bool zu_enabled = false;
  bool odom_enabled = true;
  bool gnss_enabled = false;
  Eigen::Matrix3d R_odom = Eigen::Matrix3d::Identity();
  Eigen::Matrix<double, 6, 6> R_gnss = Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 6, 6> R_zupt =
      1e-6 * Eigen::Matrix<double, 6, 6>::Identity();
  UpdateOptions update_opts;
  Eq33Order eq33 = Eq33Order::AsPrinted;
  double eps_enc = 1e-3;  // m/s, "encoder says stopped"
};

/// Per-robot decentralized estimator node. Owns one belief, sequences
/// propagation and updates from incoming events, runs the stationary
/// detection and stopping state machine, and speaks the pairwise
/// relative-update protocol. Single-threaded over its own state.
class Agent {
 public:
  Agent(AgentConfig cfg, NavState init_nav, BeliefBlock init_belief,
        ImuBiases init_biases = {});

  /// Process one event; returns messages to deliver. Throws
  /// ProtocolViolation on out-of-protocol peer messages.
  std::vector<OutboundMessage> step(const AgentEvent& event);

  const NavState& nav() const { return nav_; }
  const ErrorState& err() const { return err_; }
  const ImuBiases& biases() const { return biases_; }
  const BeliefBlock& belief() const { return belief_; }
  const MotionStatus& motion() const { return motion_; }
  const StopState& stop_state() const { return stop_state_; }
  bool frozen() const { return frozen_; }
  bool in_stop_phase() const { return stop_state_.stopped; }
  RobotId id() const { return cfg_.id; }

  const std::vector<UpdateRecord>& records() const { return records_; }
  const std::vector<ZuVelocitySnapshot>& zu_snapshots() const {
    return zu_snapshots_;
  }
  std::uint64_t stale_dropped() const { return stale_dropped_; }
  std::uint64_t busy_dropped() const { return busy_dropped_; }

 private:
  std::vector<OutboundMessage> dispatch(const AgentEvent& event);
  void handle_imu(const AgentEvent& event,
                  std::vector<OutboundMessage>& out);
  void handle_encoder(const AgentEvent& event,
                      std::vector<OutboundMessage>& out);
  void handle_gnss(const AgentEvent& event);
  void handle_range_detected(const AgentEvent& event,
                             std::vector<OutboundMessage>& out);
  void handle_peer_request(const AgentEvent& event,
                           std::vector<OutboundMessage>& out);
  void handle_peer_reply(const AgentEvent& event,
                         std::vector<OutboundMessage>& out);
  void handle_peer_posterior(const AgentEvent& event);
  void maybe_apply_zupt(double t, std::vector<OutboundMessage>& out);
  void apply_fold();
  void record(double t, const std::string& kind, double innovation_norm,
              double trace_before);
  BeliefPayload make_payload(double t) const;

  AgentConfig cfg_;
  NavState nav_;
  ErrorState err_;
  ImuBiases biases_;
  BeliefBlock belief_;
  MotionStatus motion_;
  StopState stop_state_;

  bool frozen_ = false;
  bool self_stop_ = false;
  bool zu_done_this_stop_ = false;
  Vec3 last_gyro_corrected_ = Vec3::Zero();
  Vec3 gyro_accum_ = Vec3::Zero();
  int gyro_accum_count_ = 0;
  std::optional<RangeDetectedPayload> pending_range_;
  Mat15 prior_P_ = Mat15::Zero();  // saved for the absent-factor map
  double last_receipt_t_ = -1.0;

  std::vector<AgentEvent> buffer_;
  std::vector<UpdateRecord> records_;
  std::vector<ZuVelocitySnapshot> zu_snapshots_;
  std::uint64_t stale_dropped_ = 0;
  std::uint64_t busy_dropped_ = 0;
};

}  // namespace coopnav
