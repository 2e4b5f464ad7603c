// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

// formtherm: thermal digital twin of a hot-forming process.
//
//   formtherm simulate --config EXP [--seed N] [--out DIR]
//   formtherm reduce   --config EXP [--out DIR]
//   formtherm estimate --config EXP [--seed N] [--out DIR] [--plant fom|external:PATH]
//                      [--no-disturbance-estimation]
//   formtherm evaluate --config EXP [--criteria 1,2,...] [--work-dir DIR] [--report FILE]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 failed criteria.

#include "formtherm/error.hpp"
#include "formtherm/evaluation.hpp"
#include "formtherm/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

void print(const formtherm::CommandSummary& s) {
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : s.files) std::cout << "wrote " << f << '\n';
  for (const auto& [k, v] : s.metrics) std::cout << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order thermal estimation for hot forming"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string plant = "fom";
  bool no_disturbance = false;
  std::vector<int> criteria;
  std::string work_dir;
  std::string report;

  auto* simulate = app.add_subcommand("simulate", "run the full-order plant and write noisy sensor data");
  auto* reduce = app.add_subcommand("reduce", "collect snapshots, build the POD basis and the LTV schedule");
  auto* estimate = app.add_subcommand("estimate", "run the estimator against the plant");
  auto* evaluate = app.add_subcommand("evaluate", "check the acceptance criteria");
  for (auto* sub : {simulate, reduce, estimate, evaluate}) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  }
  for (auto* sub : {simulate, estimate, evaluate}) sub->add_option("--seed", seed, "measurement noise seed");
  for (auto* sub : {simulate, reduce, estimate}) sub->add_option("--out", out_dir, "output directory");
  estimate->add_option("--plant", plant, "fom or external:PATH to a stored state trajectory");
  estimate->add_flag("--no-disturbance-estimation", no_disturbance, "filter without disturbance augmentation");
  evaluate->add_option("--criteria", criteria, "criteria to check (default all)")->delimiter(',');
  evaluate->add_option("--work-dir", work_dir, "scratch directory");
  evaluate->add_option("--report", report, "write the metrics as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    const formtherm::ExperimentConfig config = formtherm::load_experiment_config(config_path);
    const std::uint64_t s = seed.value_or(config.seed);
    const std::string out = out_dir.empty() ? config.output_dir : out_dir;

    if (*simulate) {
      print(formtherm::cmd_simulate(config, out, s));
    } else if (*reduce) {
      print(formtherm::cmd_reduce(config, out));
    } else if (*estimate) {
      print(formtherm::cmd_estimate(config, out, s, {plant, !no_disturbance}));
    } else if (*evaluate) {
      formtherm::EvaluationOptions options;
      options.criteria = criteria;
      options.work_dir = work_dir;
      options.seed = s;
      const auto results = formtherm::evaluate(config, options);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << formtherm::format_result(r) << std::endl;
        ok = ok && r.passed;
      }
      if (!report.empty()) formtherm::write_report(report, results);
      return ok ? 0 : 3;
    }
  } catch (const formtherm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
