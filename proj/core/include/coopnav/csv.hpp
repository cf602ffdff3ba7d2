#pragma once

#include <string>
#include <vector>

#include "coopnav/metrics.hpp"
#include "coopnav/runner.hpp"

namespace coopnav {

/// Belief-trace CSV. Columns:
/// t, robot_id, rE, rN, rU, vE, vN, vU, yaw, pitch, roll,
/// P66, P77, P88, zu_active, rel_update_peer
std::string belief_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> parse_belief_csv(const std::string& text);

/// Truth CSV. Columns: t, robot_id, rE, rN, rU, vE, vN, vU
std::string truth_csv(const std::vector<TruthRow>& rows);
std::vector<TruthRow> parse_truth_csv(const std::string& text);

/// Update-event CSV. Columns:
/// t, robot_id, update_kind, innovation_norm, trace_P_before, trace_P_after
std::string events_csv(const std::vector<UpdateRecord>& records);
std::vector<UpdateRecord> parse_events_csv(const std::string& text);

/// Structured metrics document (JSON).
std::string metrics_json(const MetricsReport& report);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace coopnav
