// Copyright 2026 The formtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "formtherm/pipeline.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace formtherm {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
};

struct EvaluationOptions {
  std::vector<int> criteria;  // empty = all
  std::string work_dir;       // scratch space for artifact round trips
  std::uint64_t seed = 1;
};

/// Shared runs and ROM of the nominal experiment, built on first use.
class EvaluationContext {
public:
  explicit EvaluationContext(const ExperimentConfig& config);
  ~EvaluationContext();

  const ExperimentConfig& config() const { return config_; }
  const FullOrderSystem& system() const;
  const std::vector<FomRun>& snapshot_runs();
  const FomRun& supporting();
  const RomArtifacts& rom();
  double snapshot_seconds();
  double reduction_seconds();

private:
  struct State;
  const ExperimentConfig& config_;
  std::unique_ptr<State> state_;
};

CriterionResult criterion_pod_energy(EvaluationContext& ctx);
CriterionResult criterion_rom_error(EvaluationContext& ctx);
CriterionResult criterion_known_disturbance(EvaluationContext& ctx, std::uint64_t seed);
CriterionResult criterion_disturbance_benefit(EvaluationContext& ctx, std::uint64_t seed);
CriterionResult criterion_speedup(const ExperimentConfig& config);
CriterionResult criterion_fom_oracles();
CriterionResult criterion_filter_oracles();
CriterionResult criterion_pod_oracles();
CriterionResult criterion_reproducibility(const ExperimentConfig& config, const std::string& work_dir,
                                          std::uint64_t seed);

std::vector<CriterionResult> evaluate(const ExperimentConfig& config, const EvaluationOptions& options);

/// One line per criterion: "criterion N: PASS|FAIL  title  (detail)".
std::string format_result(const CriterionResult& r);

void write_report(const std::string& path, const std::vector<CriterionResult>& results);

}  // namespace formtherm
