#pragma once

#include <string>

#include "coopnav/types.hpp"

namespace coopnav {

/// Wire payload exchanged during a relative update. Field order is part of
/// the schema: sender_id, timestamp, x_err[15], P[15x15 row-major],
/// sigma_toward_sender[15x15 row-major], nav_state{C[9] row-major, v[3],
/// r[3]}.
struct BeliefPayload {
  RobotId sender_id = 0;
  double timestamp = 0.0;
  Vec15 x_err = Vec15::Zero();
  Mat15 P = Mat15::Zero();
  Mat15 sigma_toward_sender = Mat15::Zero();
  NavState nav;
};

/// Serialize with the schema's field order preserved.
std::string to_json_string(const BeliefPayload& payload);

/// Parse a payload; throws Error on malformed input.
BeliefPayload belief_payload_from_json(const std::string& text);

}  // namespace coopnav
