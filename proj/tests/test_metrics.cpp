#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "coopnav/csv.hpp"
#include "coopnav/errors.hpp"
#include "coopnav/metrics.hpp"

namespace coopnav {
namespace {

TraceRow belief_at(double t, RobotId robot, const Vec3& r) {
  TraceRow row;
  row.t = t;
  row.robot = robot;
  row.r = r;
  return row;
}

TruthRow truth_at(double t, RobotId robot, const Vec3& r) {
  TruthRow row;
  row.t = t;
  row.robot = robot;
  row.r = r;
  return row;
}

TEST(Metrics, HandComputedRmse) {
  // errors 3 and 4 on the east axis: RMSE = sqrt(12.5).
  std::vector<TraceRow> beliefs = {belief_at(0.0, 0, Vec3(3, 0, 0)),
                                   belief_at(1.0, 0, Vec3(4, 0, 0))};
  std::vector<TruthRow> truth = {truth_at(0.0, 0, Vec3::Zero()),
                                 truth_at(1.0, 0, Vec3::Zero())};
  const MetricsReport report = compute_metrics(beliefs, truth, 0.01);
  const RobotMetrics& m = report.per_robot.at(0);
  EXPECT_NEAR(m.east.rmse, std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(m.east.max_abs, 4.0, 1e-12);
  EXPECT_NEAR(m.east.median, 3.5, 1e-12);
  EXPECT_NEAR(m.err3d.rmse, std::sqrt(12.5), 1e-12);
}

TEST(Metrics, ZeroErrorTraceGivesZeroes) {
  std::vector<TraceRow> beliefs;
  std::vector<TruthRow> truth;
  for (int k = 0; k < 10; ++k) {
    const Vec3 r(0.1 * k, -0.2 * k, 0.0);
    beliefs.push_back(belief_at(0.02 * k, 3, r));
    truth.push_back(truth_at(0.02 * k, 3, r));
  }
  const MetricsReport report = compute_metrics(beliefs, truth, 0.01);
  const RobotMetrics& m = report.per_robot.at(3);
  EXPECT_EQ(m.east.rmse, 0.0);
  EXPECT_EQ(m.north.max_abs, 0.0);
  EXPECT_EQ(m.err3d.rmse, 0.0);
  EXPECT_EQ(m.improvement_pct, 0.0);
}

TEST(Metrics, EmptyTraceThrows) {
  EXPECT_THROW(compute_metrics({}, {}, 0.01), EmptyTrace);
  std::vector<TraceRow> beliefs = {belief_at(0.0, 0, Vec3::Zero())};
  std::vector<TruthRow> truth = {truth_at(5.0, 0, Vec3::Zero())};
  EXPECT_THROW(compute_metrics(beliefs, truth, 0.01), EmptyTrace);
}

TEST(Metrics, CorrectionAndImprovementConvention) {
  // Initial horizontal error 10 m, final 1 m: correction 9 m = 90%.
  std::vector<TraceRow> beliefs = {belief_at(0.0, 1, Vec3(10, 0, 0)),
                                   belief_at(60.0, 1, Vec3(1, 0, 0))};
  std::vector<TruthRow> truth = {truth_at(0.0, 1, Vec3::Zero()),
                                 truth_at(60.0, 1, Vec3::Zero())};
  const MetricsReport report = compute_metrics(beliefs, truth, 0.01);
  const RobotMetrics& m = report.per_robot.at(1);
  EXPECT_NEAR(m.initial_h_err, 10.0, 1e-12);
  EXPECT_NEAR(m.final_h_err, 1.0, 1e-12);
  EXPECT_NEAR(m.correction, 9.0, 1e-12);
  EXPECT_NEAR(m.improvement_pct, 90.0, 1e-12);
}

// Spreadsheet-style independent recomputation over a random fixture.
TEST(Metrics, MatchesNaiveRecomputation) {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<TraceRow> beliefs;
  std::vector<TruthRow> truth;
  std::vector<Vec3> errors;
  for (int k = 0; k < 500; ++k) {
    const double t = 0.02 * k;
    const Vec3 truth_r(0.2 * t, 0.1 * t, 0.0);
    const Vec3 err(normal(gen), normal(gen), normal(gen));
    errors.push_back(err);
    beliefs.push_back(belief_at(t, 0, truth_r + err));
    truth.push_back(truth_at(t, 0, truth_r));
  }
  const MetricsReport report = compute_metrics(beliefs, truth, 0.01);
  const RobotMetrics& m = report.per_robot.at(0);

  double sq_e = 0.0, max_u = 0.0;
  std::vector<double> d3;
  for (const Vec3& err : errors) {
    sq_e += err.x() * err.x();
    max_u = std::max(max_u, std::abs(err.z()));
    d3.push_back(err.norm());
  }
  EXPECT_NEAR(m.east.rmse, std::sqrt(sq_e / errors.size()), 1e-9);
  EXPECT_NEAR(m.up.max_abs, max_u, 1e-9);

  std::sort(d3.begin(), d3.end());
  const double median = 0.5 * (d3[d3.size() / 2 - 1] + d3[d3.size() / 2]);
  EXPECT_NEAR(m.err3d.median, median, 1e-9);

  double mean3 = 0.0;
  for (double v : d3) mean3 += v;
  mean3 /= d3.size();
  double var3 = 0.0;
  for (double v : d3) var3 += (v - mean3) * (v - mean3);
  EXPECT_NEAR(m.err3d.std_dev, std::sqrt(var3 / d3.size()), 1e-9);
}

TEST(Metrics, CsvHeadersAreStable) {
  EXPECT_EQ(belief_csv({}).substr(0, belief_csv({}).find('\n')),
            "t,robot_id,rE,rN,rU,vE,vN,vU,yaw,pitch,roll,P66,P77,P88,"
            "zu_active,rel_update_peer");
  EXPECT_EQ(truth_csv({}).substr(0, truth_csv({}).find('\n')),
            "t,robot_id,rE,rN,rU,vE,vN,vU");
  EXPECT_EQ(events_csv({}).substr(0, events_csv({}).find('\n')),
            "t,robot_id,update_kind,innovation_norm,trace_P_before,"
            "trace_P_after");
}

TEST(Metrics, CsvRoundTripPreservesMetrics) {
  std::mt19937_64 gen(37);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TraceRow> beliefs;
  std::vector<TruthRow> truth;
  for (int k = 0; k < 100; ++k) {
    const double t = 0.02 * k;
    TraceRow row = belief_at(t, 0, Vec3(normal(gen), normal(gen), 0.0));
    row.v = Vec3(normal(gen), 0, 0);
    row.p_pos_diag = Vec3(0.1, 0.2, 0.3);
    row.rel_peer = k == 50 ? 1 : -1;
    row.zu_active = k % 7 == 0;
    beliefs.push_back(row);
    truth.push_back(truth_at(t, 0, Vec3::Zero()));
  }
  const std::vector<TraceRow> parsed = parse_belief_csv(belief_csv(beliefs));
  ASSERT_EQ(parsed.size(), beliefs.size());
  const MetricsReport a = compute_metrics(beliefs, truth, 0.01);
  const MetricsReport b = compute_metrics(parsed, truth, 0.01);
  EXPECT_NEAR(a.per_robot.at(0).err3d.rmse, b.per_robot.at(0).err3d.rmse,
              1e-9);
  EXPECT_EQ(parsed[50].rel_peer, 1);
  EXPECT_TRUE(parsed[49].zu_active == beliefs[49].zu_active);
}

}  // namespace
}  // namespace coopnav
