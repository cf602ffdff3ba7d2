#include <benchmark/benchmark.h>

#include "coopnav/mechanization.hpp"
#include "coopnav/private_updates.hpp"
#include "coopnav/relative_update.hpp"
#include "coopnav/runner.hpp"

namespace {

using namespace coopnav;

BeliefBlock sample_belief() {
  BeliefBlock belief;
  belief.own_id = 0;
  Vec15 diag;
  diag << 1e-4, 1e-4, 1e-4, 1e-2, 1e-2, 1e-2, 0.5, 0.5, 0.5, 2.5e-5, 2.5e-5,
      2.5e-5, 2.5e-7, 2.5e-7, 2.5e-7;
  belief.P = diag.asDiagonal();
  belief.sigma.emplace(1, Mat15::Identity() * 0.1);
  belief.sigma.emplace(2, Mat15::Zero());
  return belief;
}

void BM_PropagateStep(benchmark::State& state) {
  BeliefBlock belief = sample_belief();
  ErrorState err;
  NavState nav;
  nav.v = Vec3(0.2, 0, 0);
  ImuSample imu;
  imu.dt = 0.02;
  imu.accel = Vec3(0.01, 0, kGravity);
  imu.gyro = Vec3(0.001, 0, 0.002);
  const NoiseSpec noise{1.4e-4, 1.4e-4, 5e-4, 5e-3};
  for (auto _ : state) {
    const Mat3 c_minus = nav.C_bn;
    nav = mechanize(nav, imu, ImuBiases{});
    auto [b, e] = propagate(std::move(belief), err,
                            build_phi(build_F(c_minus, imu.accel), imu.dt),
                            build_Q(noise, imu.dt));
    belief = std::move(b);
    err = e;
    benchmark::DoNotOptimize(belief.P.data());
  }
}
BENCHMARK(BM_PropagateStep);

void BM_PrivateUpdate(benchmark::State& state) {
  const BeliefBlock belief = sample_belief();
  const ErrorState err;
  const Eigen::MatrixXd R = 1e-4 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd z = Vec3(0.01, -0.005, 0.0);
  for (auto _ : state) {
    auto res = apply_private(belief, err, H_odomvel(), z, R);
    benchmark::DoNotOptimize(res.belief.P.data());
  }
}
BENCHMARK(BM_PrivateUpdate);

void BM_RelativeUpdateCycle(benchmark::State& state) {
  BeliefBlock a = sample_belief();
  a.sigma[1].setZero();
  BeliefBlock b = sample_belief();
  b.own_id = 1;
  b.sigma.clear();
  b.sigma.emplace(0, Mat15::Zero());
  NavState na, nb;
  na.r = Vec3(0, 0, 0);
  nb.r = Vec3(2, 0.5, 0);
  for (auto _ : state) {
    CoupledBelief joint =
        couple(a, ErrorState{}, b, ErrorState{}, b.sigma.at(0));
    RelativeResult res = relative_update(
        joint, RangeMeasurement{2.05, 0.0025}, na, nb);
    DecomposedPair dec = decompose(res.coupled);
    benchmark::DoNotOptimize(dec.P_a.data());
  }
}
BENCHMARK(BM_RelativeUpdateCycle);

void BM_CaveScenario(benchmark::State& state) {
  ScenarioConfig cfg =
      load_scenario(std::string(COOPNAV_SCENARIO_DIR) + "/cave.scn");
  cfg.duration = 30.0;
  for (auto _ : state) {
    const RunArtifacts artifacts = run_scenario(cfg);
    benchmark::DoNotOptimize(artifacts.beliefs.size());
  }
}
BENCHMARK(BM_CaveScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
