// Command-line front end: run scenarios, A/B ZU comparisons, metrics
// tables, CSV traces, and static plots.

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "coopnav/csv.hpp"
#include "coopnav/metrics.hpp"
#include "coopnav/runner.hpp"
#include "coopnav/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace coopnav;

namespace {

void write_plots(const fs::path& dir, const RunArtifacts& artifacts) {
  fs::create_directories(dir);

  std::map<RobotId, std::vector<const TraceRow*>> beliefs;
  std::map<RobotId, std::map<double, const TruthRow*>> truth;
  for (const TraceRow& row : artifacts.beliefs) {
    beliefs[row.robot].push_back(&row);
  }
  for (const TruthRow& row : artifacts.truth) {
    truth[row.robot][row.t] = &row;
  }

  for (const auto& [robot, rows] : beliefs) {
    const auto& truth_rows = truth.at(robot);

    PlotPanel err_panel;
    err_panel.title = "robot " + std::to_string(robot) + " position error";
    err_panel.y_label = "error [m]";
    PlotSeries horiz, full;
    horiz.color = "#d62728";
    horiz.label = "horizontal";
    full.color = "#1f77b4";
    full.label = "3d";
    for (const TraceRow* row : rows) {
      const auto it = truth_rows.find(row->t);
      if (it == truth_rows.end()) continue;
      const Vec3 err = row->r - it->second->r;
      horiz.x.push_back(row->t);
      horiz.y.push_back(err.head<2>().norm());
      full.x.push_back(row->t);
      full.y.push_back(err.norm());
    }
    err_panel.series = {horiz, full};
    write_text_file(
        (dir / ("robot" + std::to_string(robot) + "_error.svg")).string(),
        render_svg({err_panel}, "time [s]"));

    // ENU estimates with 3-sigma envelopes against truth.
    std::vector<PlotPanel> enu(3);
    const char* names[3] = {"East", "North", "Up"};
    for (int axis = 0; axis < 3; ++axis) {
      PlotSeries est, tru;
      est.color = "#1f77b4";
      est.label = "estimate";
      tru.color = "#2ca02c";
      tru.label = "truth";
      PlotBand band;
      band.color = "#1f77b4";
      for (const TraceRow* row : rows) {
        const auto it = truth_rows.find(row->t);
        if (it == truth_rows.end()) continue;
        est.x.push_back(row->t);
        est.y.push_back(row->r(axis));
        tru.x.push_back(row->t);
        tru.y.push_back(it->second->r(axis));
        const double sigma3 = 3.0 * std::sqrt(row->p_pos_diag(axis));
        band.x.push_back(row->t);
        band.lo.push_back(row->r(axis) - sigma3);
        band.hi.push_back(row->r(axis) + sigma3);
      }
      enu[axis].title =
          std::string(names[axis]) + " (robot " + std::to_string(robot) + ")";
      enu[axis].y_label = "[m]";
      enu[axis].series = {est, tru};
      enu[axis].bands = {band};
    }
    write_text_file(
        (dir / ("robot" + std::to_string(robot) + "_enu.svg")).string(),
        render_svg(enu, "time [s]"));
  }
}

fs::path run_dir(const fs::path& out, const std::string& scenario,
                 std::uint64_t seed) {
  return out / scenario / std::to_string(seed);
}

void write_run(const fs::path& dir, const RunArtifacts& artifacts,
               double align_tol, bool plots) {
  fs::create_directories(dir);
  write_text_file((dir / "truth.csv").string(), truth_csv(artifacts.truth));
  std::map<RobotId, std::vector<TraceRow>> per_robot;
  for (const TraceRow& row : artifacts.beliefs) {
    per_robot[row.robot].push_back(row);
  }
  for (const auto& [robot, rows] : per_robot) {
    write_text_file(
        (dir / ("robot" + std::to_string(robot) + "_belief.csv")).string(),
        belief_csv(rows));
  }
  write_text_file((dir / "events.csv").string(), events_csv(artifacts.events));
  const MetricsReport metrics =
      compute_metrics(artifacts.beliefs, artifacts.truth, align_tol);
  write_text_file((dir / "metrics.json").string(), metrics_json(metrics));
  if (plots) write_plots(dir / "plots", artifacts);
}

void print_metrics_table(const MetricsReport& report) {
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "  robot    rmse_E   rmse_N   rmse_U  rmse_3D   max_3D"
            << "  corr[m]  improv[%]\n";
  for (const auto& [robot, m] : report.per_robot) {
    std::cout << "  " << std::setw(5) << robot << std::setw(10)
              << m.east.rmse << std::setw(9) << m.north.rmse << std::setw(9)
              << m.up.rmse << std::setw(9) << m.err3d.rmse << std::setw(9)
              << m.err3d.max_abs << std::setw(9) << m.correction
              << std::setw(11) << m.improvement_pct << "\n";
  }
}

void print_ab_summary(const AbResult& ab) {
  std::cout << "\nA/B improvement (mean over " << ab.trials.size()
            << " trials, 100*(without-with)/without):\n";
  for (const auto& [robot, imp] : ab.improvement) {
    std::cout << "  robot " << robot << ":";
    for (const char* key : {"rmse_e", "rmse_n", "rmse_u", "rmse_3d",
                            "median_3d", "max_3d", "std_3d"}) {
      std::cout << "  " << key << "=" << std::fixed << std::setprecision(2)
                << imp.at(key) << "%";
    }
    std::cout << "\n";
  }
  std::cout << "\nLost-robot horizontal corrections per trial:\n";
  for (const AbTrial& trial : ab.trials) {
    std::cout << "  seed " << trial.seed << ":";
    for (const auto& [robot, m] : trial.with_zu.per_robot) {
      const auto& wo = trial.without_zu.per_robot.at(robot);
      if (m.initial_h_err < 1.0) continue;  // only the lost robots
      std::cout << "  robot" << robot << " w/ " << std::fixed
                << std::setprecision(2) << m.correction << "m ("
                << m.improvement_pct << "%) w/o " << wo.correction << "m ("
                << wo.improvement_pct << "%)";
    }
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized cooperative localization workbench"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a scenario");
  std::string scenario_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 1;
  std::string zu_mode = "on";
  std::string out_dir = "out";
  std::string plots_mode = "on";
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Base seed (overrides the scenario)")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--trials", trials, "Number of seeds to run")
      ->check(CLI::PositiveNumber);
  run->add_option("--zu", zu_mode, "on|off|ab")
      ->check(CLI::IsMember({"on", "off", "ab"}));
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--plots", plots_mode, "on|off")
      ->check(CLI::IsMember({"on", "off"}));

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig cfg = load_scenario(scenario_path);
    if (seed_set) cfg.seed = seed;
    const bool plots = plots_mode == "on";
    const fs::path out(out_dir);

    if (zu_mode == "ab") {
      const AbResult ab = run_ab(cfg, trials);
      for (const AbTrial& trial : ab.trials) {
        ScenarioConfig with = cfg;
        with.seed = trial.seed;
        ScenarioConfig without = with;
        for (RobotSpec& spec : without.robots) spec.zu_enabled = false;
        const double tol = 0.5 / cfg.sensors.imu.rate;
        write_run(run_dir(out, cfg.name, trial.seed) / "zu_on",
                  run_scenario(with), tol, plots);
        write_run(run_dir(out, cfg.name, trial.seed) / "zu_off",
                  run_scenario(without), tol, plots);
      }
      print_ab_summary(ab);
      nlohmann::ordered_json j;
      for (const auto& [robot, imp] : ab.improvement) {
        j["robot_" + std::to_string(robot)] = imp;
      }
      fs::create_directories(out / cfg.name);
      write_text_file((out / cfg.name / "ab_summary.json").string(),
                      j.dump(2));
      return 0;
    }

    if (zu_mode == "off") {
      for (RobotSpec& spec : cfg.robots) spec.zu_enabled = false;
    }
    for (int trial = 0; trial < trials; ++trial) {
      ScenarioConfig trial_cfg = cfg;
      trial_cfg.seed = cfg.seed + static_cast<std::uint64_t>(trial);
      const RunArtifacts artifacts = run_scenario(trial_cfg);
      const fs::path dir = run_dir(out, cfg.name, trial_cfg.seed);
      const double tol = 0.5 / cfg.sensors.imu.rate;
      write_run(dir, artifacts, tol, plots);
      std::cout << "scenario " << cfg.name << " seed " << trial_cfg.seed
                << " -> " << dir.string() << "\n";
      print_metrics_table(
          compute_metrics(artifacts.beliefs, artifacts.truth, tol));
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
