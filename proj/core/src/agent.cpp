#include "coopnav/agent.hpp"

#include "coopnav/errors.hpp"
#include "coopnav/mechanization.hpp"

namespace coopnav {

bool detect_stationary(const MotionStatus& status, double now, double dwell) {
  if (!status.stationary_since.has_value()) return false;
  return now - *status.stationary_since >= dwell;
}

StopDecision stop_decision(const Mat15& P, const StopPolicy& policy,
                           const StopState& state) {
  if (state.stopped) return StopDecision::Continue;
  const double max_pos_var =
      P.diagonal().segment<3>(kPosIdx).maxCoeff();
  switch (policy.mode) {
    case StopPolicy::Mode::None:
      return StopDecision::Continue;
    case StopPolicy::Mode::Autonomous:
      return max_pos_var > policy.cov_threshold ? StopDecision::IssueStop
                                                : StopDecision::Continue;
    case StopPolicy::Mode::Periodic:
      return state.motion_time >= policy.period ? StopDecision::IssueStop
                                                : StopDecision::Continue;
    case StopPolicy::Mode::AutoThenPeriodic:
      if (state.periodic_engaged) {
        return state.motion_time >= policy.period ? StopDecision::IssueStop
                                                  : StopDecision::Continue;
      }
      return max_pos_var > policy.cov_threshold ? StopDecision::IssueStop
                                                : StopDecision::Continue;
  }
  return StopDecision::Continue;
}

Agent::Agent(AgentConfig cfg, NavState init_nav, BeliefBlock init_belief,
             ImuBiases init_biases)
    : cfg_(std::move(cfg)),
      nav_(init_nav),
      biases_(init_biases),
      belief_(std::move(init_belief)) {
  belief_.own_id = cfg_.id;
  for (RobotId peer : cfg_.peers) {
    if (peer == cfg_.id) continue;
    belief_.sigma.emplace(peer, Mat15::Zero());
  }
}

std::vector<OutboundMessage> Agent::step(const AgentEvent& event) {
  if (event.t + 1e-12 < last_receipt_t_) {
    ++stale_dropped_;
    return {};
  }
  last_receipt_t_ = std::max(last_receipt_t_, event.t);

  if (frozen_) {
    switch (event.kind) {
      case AgentEvent::Kind::ImuTick:
      case AgentEvent::Kind::EncoderTick:
      case AgentEvent::Kind::GnssTick:
      case AgentEvent::Kind::StopCommand:
      case AgentEvent::Kind::ResumeCommand:
        buffer_.push_back(event);
        return {};
      case AgentEvent::Kind::RangeDetected:
      case AgentEvent::Kind::PeerRequest:
        ++busy_dropped_;
        return {};
      case AgentEvent::Kind::PeerPosterior:
        break;  // the message that ends the freeze
      case AgentEvent::Kind::PeerBeliefReply:
        throw ProtocolViolation("belief reply received while frozen");
    }
  }
  return dispatch(event);
}

std::vector<OutboundMessage> Agent::dispatch(const AgentEvent& event) {
  std::vector<OutboundMessage> out;
  switch (event.kind) {
    case AgentEvent::Kind::ImuTick:
      handle_imu(event, out);
      break;
    case AgentEvent::Kind::EncoderTick:
      handle_encoder(event, out);
      break;
    case AgentEvent::Kind::GnssTick:
      handle_gnss(event);
      break;
    case AgentEvent::Kind::RangeDetected:
      handle_range_detected(event, out);
      break;
    case AgentEvent::Kind::PeerRequest:
      handle_peer_request(event, out);
      break;
    case AgentEvent::Kind::PeerBeliefReply:
      handle_peer_reply(event, out);
      break;
    case AgentEvent::Kind::PeerPosterior: {
      handle_peer_posterior(event);
      // Apply whatever queued up during the freeze, in arrival order.
      std::vector<AgentEvent> queued;
      queued.swap(buffer_);
      for (const AgentEvent& e : queued) {
        auto more = dispatch(e);
        out.insert(out.end(), more.begin(), more.end());
      }
      break;
    }
    case AgentEvent::Kind::StopCommand:
      motion_.cmd_vel_zero = true;
      stop_state_.stopped = true;
      zu_done_this_stop_ = false;
      break;
    case AgentEvent::Kind::ResumeCommand:
      motion_.cmd_vel_zero = false;
      motion_.stationary_since.reset();
      stop_state_.stopped = false;
      stop_state_.motion_time = 0.0;
      self_stop_ = false;
      break;
  }
  return out;
}

void Agent::handle_imu(const AgentEvent& event,
                       std::vector<OutboundMessage>& out) {
  const ImuSample& sample = std::get<ImuTickPayload>(event.payload).sample;
  last_gyro_corrected_ = sample.gyro - biases_.gyro;
  // Accumulate the stationary-window gyro so the ZU can use the dwell
  // average rather than a single noisy sample.
  if (motion_.stationary_since.has_value()) {
    gyro_accum_ += last_gyro_corrected_;
    ++gyro_accum_count_;
  } else {
    gyro_accum_.setZero();
    gyro_accum_count_ = 0;
  }

  const Mat3 c_minus = nav_.C_bn;
  nav_ = mechanize(nav_, sample, biases_);

  const Mat15 F = build_F(c_minus, sample.accel - biases_.accel);
  const Mat15 phi = build_phi(F, sample.dt);
  const Mat15 Q = build_Q(cfg_.noise, sample.dt);
  auto [belief, err] = propagate(std::move(belief_), err_, phi, Q);
  belief_ = std::move(belief);
  err_ = err;

  if (!motion_.cmd_vel_zero) stop_state_.motion_time += sample.dt;

  if (cfg_.zu_enabled && !stop_state_.stopped &&
      stop_decision(belief_.P, cfg_.policy, stop_state_) ==
          StopDecision::IssueStop) {
    stop_state_.stopped = true;
    self_stop_ = true;
    zu_done_this_stop_ = false;
    motion_.cmd_vel_zero = true;
    motion_.stationary_since.reset();
    AgentEvent cmd{AgentEvent::Kind::StopCommand, event.t,
                   StopCommandPayload{}};
    out.push_back({cfg_.id, cmd});
  }

  maybe_apply_zupt(event.t, out);
}

void Agent::handle_encoder(const AgentEvent& event,
                           std::vector<OutboundMessage>& out) {
  const auto& tick = std::get<EncoderTickPayload>(event.payload);
  motion_.encoder_speed = tick.tick_speed;
  if (motion_.cmd_vel_zero && motion_.encoder_speed < cfg_.eps_enc) {
    if (!motion_.stationary_since.has_value()) {
      motion_.stationary_since = event.t;
    }
  } else {
    motion_.stationary_since.reset();
  }

  if (cfg_.odom_enabled) {
    const Vec3 z = innovation_odomvel(tick.v_meas, nav_);
    const double trace_before = belief_.P.trace();
    auto res = apply_private(std::move(belief_), err_, H_odomvel(), z,
                             cfg_.R_odom, cfg_.update_opts);
    belief_ = std::move(res.belief);
    err_ = res.err;
    record(event.t, "odom_vel", res.innovation.norm(), trace_before);
    apply_fold();
  }

  maybe_apply_zupt(event.t, out);
}

void Agent::handle_gnss(const AgentEvent& event) {
  if (!cfg_.gnss_enabled) return;
  const auto& tick = std::get<GnssTickPayload>(event.payload);
  const Vec6 z = innovation_posvel(tick.vel, tick.pos, nav_);
  const double trace_before = belief_.P.trace();
  auto res = apply_private(std::move(belief_), err_, H_posvel(), z,
                           cfg_.R_gnss, cfg_.update_opts);
  belief_ = std::move(res.belief);
  err_ = res.err;
  record(event.t, "posvel", res.innovation.norm(), trace_before);
  apply_fold();
}

void Agent::handle_range_detected(const AgentEvent& event,
                                  std::vector<OutboundMessage>& out) {
  const auto& det = std::get<RangeDetectedPayload>(event.payload);
  pending_range_ = det;
  AgentEvent req{AgentEvent::Kind::PeerRequest, event.t,
                 PeerRequestPayload{cfg_.id}};
  out.push_back({det.peer, req});
}

void Agent::handle_peer_request(const AgentEvent& event,
                                std::vector<OutboundMessage>& out) {
  const auto& req = std::get<PeerRequestPayload>(event.payload);
  const auto it = belief_.sigma.find(req.requester);
  if (it == belief_.sigma.end()) {
    ++busy_dropped_;
    return;
  }
  prior_P_ = belief_.P;
  BeliefPayload payload = make_payload(event.t);
  payload.sigma_toward_sender = it->second;
  frozen_ = true;
  AgentEvent reply{AgentEvent::Kind::PeerBeliefReply, event.t,
                   PeerBeliefReplyPayload{std::move(payload)}};
  out.push_back({req.requester, reply});
}

void Agent::handle_peer_reply(const AgentEvent& event,
                              std::vector<OutboundMessage>& out) {
  const auto& reply = std::get<PeerBeliefReplyPayload>(event.payload);
  if (!pending_range_.has_value() ||
      pending_range_->peer != reply.payload.sender_id) {
    throw ProtocolViolation("belief reply without a pending range update");
  }
  const RangeDetectedPayload det = *pending_range_;
  pending_range_.reset();

  BeliefBlock peer_belief;
  peer_belief.own_id = reply.payload.sender_id;
  peer_belief.P = reply.payload.P;
  ErrorState peer_err;
  peer_err.x = reply.payload.x_err;

  const Mat15 prior_P = belief_.P;
  const double trace_before = prior_P.trace();

  CoupledBelief coupled = couple(belief_, err_, peer_belief, peer_err,
                                 reply.payload.sigma_toward_sender);
  RelativeResult rel =
      relative_update(coupled, det.meas, nav_, reply.payload.nav);
  DecomposedPair dec = decompose(rel.coupled);

  belief_.P = dec.P_a;
  belief_.sigma[det.peer] = dec.sigma_ab;
  err_.x = dec.x_a;
  auto absent = update_absent_correlations(std::move(belief_), prior_P,
                                           dec.P_a, det.peer, cfg_.eq33);
  belief_ = std::move(absent.belief);
  record(event.t, "relative:" + std::to_string(det.peer),
         std::abs(rel.innovation), trace_before);
  apply_fold();

  BeliefPayload posterior = make_payload(event.t);
  posterior.x_err = dec.x_b;
  posterior.P = dec.P_b;
  posterior.sigma_toward_sender = dec.sigma_ba;
  AgentEvent msg{AgentEvent::Kind::PeerPosterior, event.t,
                 PeerPosteriorPayload{std::move(posterior)}};
  out.push_back({det.peer, msg});
}

void Agent::handle_peer_posterior(const AgentEvent& event) {
  if (!frozen_) {
    throw ProtocolViolation("posterior received while not frozen");
  }
  const auto& post = std::get<PeerPosteriorPayload>(event.payload);
  const double trace_before = belief_.P.trace();

  belief_.P = post.payload.P;
  belief_.sigma[post.payload.sender_id] = post.payload.sigma_toward_sender;
  err_.x = post.payload.x_err;
  auto absent =
      update_absent_correlations(std::move(belief_), prior_P_, post.payload.P,
                                 post.payload.sender_id, cfg_.eq33);
  belief_ = std::move(absent.belief);
  record(event.t, "relative:" + std::to_string(post.payload.sender_id),
         err_.x.norm(), trace_before);
  apply_fold();
  frozen_ = false;
}

void Agent::maybe_apply_zupt(double t, std::vector<OutboundMessage>& out) {
  if (!cfg_.zu_enabled || !stop_state_.stopped || zu_done_this_stop_) return;
  if (!detect_stationary(motion_, t, cfg_.policy.dwell)) return;

  const Vec3 v_before = nav_.v;
  const ImuBiases biases_before = biases_;
  const Vec3 omega = gyro_accum_count_ > 0
                         ? Vec3(gyro_accum_ / gyro_accum_count_)
                         : last_gyro_corrected_;
  const Vec6 z = zupt_innovation(omega, nav_.v);
  const double trace_before = belief_.P.trace();
  auto res = apply_private(std::move(belief_), err_, H_zupt(), z, cfg_.R_zupt,
                           cfg_.update_opts);
  belief_ = std::move(res.belief);
  err_ = res.err;
  record(t, "zupt", res.innovation.norm(), trace_before);
  apply_fold();
  zu_snapshots_.push_back(
      {t, v_before, nav_.v, biases_before.accel, biases_before.gyro});
  zu_done_this_stop_ = true;

  if (cfg_.policy.mode == StopPolicy::Mode::AutoThenPeriodic &&
      !stop_state_.periodic_engaged) {
    const double max_pos_var =
        belief_.P.diagonal().segment<3>(kPosIdx).maxCoeff();
    if (max_pos_var > cfg_.policy.cov_threshold) {
      stop_state_.periodic_engaged = true;
    }
  }

  if (self_stop_) {
    motion_.cmd_vel_zero = false;
    motion_.stationary_since.reset();
    stop_state_.stopped = false;
    stop_state_.motion_time = 0.0;
    self_stop_ = false;
    AgentEvent cmd{AgentEvent::Kind::ResumeCommand, t,
                   ResumeCommandPayload{}};
    out.push_back({cfg_.id, cmd});
  }
}

void Agent::apply_fold() {
  FoldResult folded = fold_correction(nav_, err_, biases_);
  nav_ = folded.nav;
  err_ = folded.err;
  biases_ = folded.biases;
}

void Agent::record(double t, const std::string& kind, double innovation_norm,
                   double trace_before) {
  records_.push_back(
      {t, cfg_.id, kind, innovation_norm, trace_before, belief_.P.trace()});
}

BeliefPayload Agent::make_payload(double t) const {
  BeliefPayload p;
  p.sender_id = cfg_.id;
  p.timestamp = t;
  p.x_err = err_.x;
  p.P = belief_.P;
  p.nav = nav_;
  return p;
}

}  // namespace coopnav
