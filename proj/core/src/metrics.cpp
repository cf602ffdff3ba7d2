#include "coopnav/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {

AxisStats stats_of(std::vector<double> values) {
  AxisStats out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double v : values) {
    sum += v;
    sum_sq += v * v;
    out.max_abs = std::max(out.max_abs, std::abs(v));
  }
  out.rmse = std::sqrt(sum_sq / n);
  const double mean = sum / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  out.std_dev = std::sqrt(var / n);
  std::sort(values.begin(), values.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  const std::size_t mid = values.size() / 2;
  out.median = values.size() % 2 == 1
                   ? std::abs(values[mid])
                   : 0.5 * (std::abs(values[mid - 1]) + std::abs(values[mid]));
  return out;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<TraceRow>& beliefs,
                              const std::vector<TruthRow>& truth,
                              double align_tol) {
  if (beliefs.empty() || truth.empty()) {
    throw EmptyTrace("metrics requested over an empty trace");
  }

  std::map<RobotId, std::vector<const TruthRow*>> truth_by_robot;
  for (const TruthRow& row : truth) truth_by_robot[row.robot].push_back(&row);

  std::map<RobotId, std::vector<Vec3>> errors;
  std::map<RobotId, std::vector<double>> times;
  for (const TraceRow& row : beliefs) {
    const auto it = truth_by_robot.find(row.robot);
    if (it == truth_by_robot.end()) continue;
    const auto& candidates = it->second;
    // Nearest neighbor in time (the truth rows are time-sorted).
    const auto lower = std::lower_bound(
        candidates.begin(), candidates.end(), row.t,
        [](const TruthRow* a, double t) { return a->t < t; });
    const TruthRow* best = nullptr;
    double best_dt = align_tol;
    for (auto probe : {lower, lower == candidates.begin() ? lower : lower - 1}) {
      if (probe == candidates.end()) continue;
      const double dt = std::abs((*probe)->t - row.t);
      if (dt <= best_dt) {
        best = *probe;
        best_dt = dt;
      }
    }
    if (best == nullptr) continue;
    errors[row.robot].push_back(row.r - best->r);
    times[row.robot].push_back(row.t);
  }

  MetricsReport report;
  for (const auto& [robot, errs] : errors) {
    if (errs.empty()) throw EmptyTrace("no aligned samples for a robot");
    std::vector<double> e, n, u, d3;
    e.reserve(errs.size());
    for (const Vec3& err : errs) {
      e.push_back(err.x());
      n.push_back(err.y());
      u.push_back(err.z());
      d3.push_back(err.norm());
    }
    RobotMetrics m;
    m.east = stats_of(std::move(e));
    m.north = stats_of(std::move(n));
    m.up = stats_of(std::move(u));
    m.err3d = stats_of(std::move(d3));
    m.initial_h_err = errs.front().head<2>().norm();
    m.final_h_err = errs.back().head<2>().norm();
    m.correction = m.initial_h_err - m.final_h_err;
    m.improvement_pct = m.initial_h_err > 0.0
                            ? 100.0 * m.correction / m.initial_h_err
                            : 0.0;
    report.per_robot.emplace(robot, std::move(m));
  }
  if (report.per_robot.empty()) {
    throw EmptyTrace("traces could not be aligned within tolerance");
  }
  return report;
}

AbResult run_ab(const ScenarioConfig& cfg, int n_trials,
                const RunOptions& opts) {
  if (n_trials < 1) throw ConfigError("trials: must be at least 1");
  AbResult out;
  for (const RobotSpec& spec : cfg.robots) {
    if (spec.zu_enabled) out.zu_robots.push_back(spec.id);
  }

  const double align_tol = 0.5 / cfg.sensors.imu.rate;
  for (int trial = 0; trial < n_trials; ++trial) {
    ScenarioConfig with = cfg;
    with.seed = cfg.seed + static_cast<std::uint64_t>(trial);
    ScenarioConfig without = with;
    for (RobotSpec& spec : without.robots) spec.zu_enabled = false;

    const RunArtifacts a = run_scenario(with, opts);
    const RunArtifacts b = run_scenario(without, opts);
    AbTrial result;
    result.seed = with.seed;
    result.with_zu = compute_metrics(a.beliefs, a.truth, align_tol);
    result.without_zu = compute_metrics(b.beliefs, b.truth, align_tol);
    out.trials.push_back(std::move(result));
  }

  auto mean_of = [&](RobotId robot, auto getter, bool with_zu) {
    double sum = 0.0;
    for (const AbTrial& trial : out.trials) {
      const MetricsReport& rep = with_zu ? trial.with_zu : trial.without_zu;
      sum += getter(rep.per_robot.at(robot));
    }
    return sum / static_cast<double>(out.trials.size());
  };

  const std::vector<std::pair<std::string,
                              double (*)(const RobotMetrics&)>>
      metrics = {
          {"max_e", [](const RobotMetrics& m) { return m.east.max_abs; }},
          {"max_n", [](const RobotMetrics& m) { return m.north.max_abs; }},
          {"max_u", [](const RobotMetrics& m) { return m.up.max_abs; }},
          {"rmse_e", [](const RobotMetrics& m) { return m.east.rmse; }},
          {"rmse_n", [](const RobotMetrics& m) { return m.north.rmse; }},
          {"rmse_u", [](const RobotMetrics& m) { return m.up.rmse; }},
          {"median_3d", [](const RobotMetrics& m) { return m.err3d.median; }},
          {"max_3d", [](const RobotMetrics& m) { return m.err3d.max_abs; }},
          {"std_3d", [](const RobotMetrics& m) { return m.err3d.std_dev; }},
          {"rmse_3d", [](const RobotMetrics& m) { return m.err3d.rmse; }},
      };

  for (const AbTrial& trial : out.trials) {
    for (const auto& [robot, m] : trial.with_zu.per_robot) {
      (void)m;
      if (out.improvement.count(robot)) continue;
      std::map<std::string, double> imp;
      for (const auto& [name, getter] : metrics) {
        const double mean_with = mean_of(robot, getter, true);
        const double mean_without = mean_of(robot, getter, false);
        imp[name] = mean_without != 0.0
                        ? 100.0 * (mean_without - mean_with) / mean_without
                        : 0.0;
      }
      out.improvement.emplace(robot, std::move(imp));
    }
  }
  return out;
}

}  // namespace coopnav
