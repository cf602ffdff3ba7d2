#include "coopnav/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, ',')) out.push_back(token);
  return out;
}

}  // namespace

std::string belief_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "t,robot_id,rE,rN,rU,vE,vN,vU,yaw,pitch,roll,P66,P77,P88,"
         "zu_active,rel_update_peer\n";
  for (const TraceRow& row : rows) {
    out << fmt(row.t) << ',' << row.robot << ',' << fmt(row.r.x()) << ','
        << fmt(row.r.y()) << ',' << fmt(row.r.z()) << ',' << fmt(row.v.x())
        << ',' << fmt(row.v.y()) << ',' << fmt(row.v.z()) << ','
        << fmt(row.ypr.x()) << ',' << fmt(row.ypr.y()) << ','
        << fmt(row.ypr.z()) << ',' << fmt(row.p_pos_diag.x()) << ','
        << fmt(row.p_pos_diag.y()) << ',' << fmt(row.p_pos_diag.z()) << ','
        << (row.zu_active ? 1 : 0) << ',' << row.rel_peer << '\n';
  }
  return out.str();
}

std::vector<TraceRow> parse_belief_csv(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 16) throw Error("belief csv row has wrong field count");
    TraceRow row;
    row.t = std::stod(f[0]);
    row.robot = static_cast<RobotId>(std::stoul(f[1]));
    row.r = Vec3(std::stod(f[2]), std::stod(f[3]), std::stod(f[4]));
    row.v = Vec3(std::stod(f[5]), std::stod(f[6]), std::stod(f[7]));
    row.ypr = Vec3(std::stod(f[8]), std::stod(f[9]), std::stod(f[10]));
    row.p_pos_diag = Vec3(std::stod(f[11]), std::stod(f[12]), std::stod(f[13]));
    row.zu_active = f[14] == "1";
    row.rel_peer = std::stoi(f[15]);
    rows.push_back(row);
  }
  return rows;
}

std::string truth_csv(const std::vector<TruthRow>& rows) {
  std::ostringstream out;
  out << "t,robot_id,rE,rN,rU,vE,vN,vU\n";
  for (const TruthRow& row : rows) {
    out << fmt(row.t) << ',' << row.robot << ',' << fmt(row.r.x()) << ','
        << fmt(row.r.y()) << ',' << fmt(row.r.z()) << ',' << fmt(row.v.x())
        << ',' << fmt(row.v.y()) << ',' << fmt(row.v.z()) << '\n';
  }
  return out.str();
}

std::vector<TruthRow> parse_truth_csv(const std::string& text) {
  std::vector<TruthRow> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 8) throw Error("truth csv row has wrong field count");
    TruthRow row;
    row.t = std::stod(f[0]);
    row.robot = static_cast<RobotId>(std::stoul(f[1]));
    row.r = Vec3(std::stod(f[2]), std::stod(f[3]), std::stod(f[4]));
    row.v = Vec3(std::stod(f[5]), std::stod(f[6]), std::stod(f[7]));
    rows.push_back(row);
  }
  return rows;
}

std::string events_csv(const std::vector<UpdateRecord>& records) {
  std::ostringstream out;
  out << "t,robot_id,update_kind,innovation_norm,trace_P_before,"
         "trace_P_after\n";
  for (const UpdateRecord& rec : records) {
    out << fmt(rec.t) << ',' << rec.robot << ',' << rec.kind << ','
        << fmt(rec.innovation_norm) << ',' << fmt(rec.trace_P_before) << ','
        << fmt(rec.trace_P_after) << '\n';
  }
  return out.str();
}

std::vector<UpdateRecord> parse_events_csv(const std::string& text) {
  std::vector<UpdateRecord> records;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 6) throw Error("events csv row has wrong field count");
    UpdateRecord rec;
    rec.t = std::stod(f[0]);
    rec.robot = static_cast<RobotId>(std::stoul(f[1]));
    rec.kind = f[2];
    rec.innovation_norm = std::stod(f[3]);
    rec.trace_P_before = std::stod(f[4]);
    rec.trace_P_after = std::stod(f[5]);
    records.push_back(rec);
  }
  return records;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  for (const auto& [robot, m] : report.per_robot) {
    nlohmann::ordered_json r;
    auto axis = [](const AxisStats& s) {
      nlohmann::ordered_json a;
      a["rmse"] = s.rmse;
      a["max"] = s.max_abs;
      a["median"] = s.median;
      a["std"] = s.std_dev;
      return a;
    };
    r["east"] = axis(m.east);
    r["north"] = axis(m.north);
    r["up"] = axis(m.up);
    r["err3d"] = axis(m.err3d);
    r["initial_horizontal_error"] = m.initial_h_err;
    r["final_horizontal_error"] = m.final_h_err;
    r["correction"] = m.correction;
    r["improvement_pct"] = m.improvement_pct;
    j["robot_" + std::to_string(robot)] = r;
  }
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace coopnav
