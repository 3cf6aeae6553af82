#pragma once

// Experiment runner. Each experiment is a list of independent tasks (one grid
// row each) producing CSV lines; a single writer emits them in task order and
// checkpoints after every row so an interrupted run can resume.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "floqsense/config.hpp"
#include "floqsense/scalefit.hpp"

namespace floqsense {

struct Plan {
  std::string columns;
  std::size_t tasks = 0;
  std::function<std::vector<std::string>(std::size_t)> run_task;
  /// Footer lines (already prefixed with '#') computed from all data rows.
  std::function<std::vector<std::string>(const std::vector<std::string>&)> finish;
  /// True when the rows report a failed check.
  std::function<bool(const std::vector<std::string>&)> failed;
};

Plan plan_heatmap(const ExperimentConfig& cfg);
Plan plan_timeseries(const ExperimentConfig& cfg);
Plan plan_h0scan(const ExperimentConfig& cfg);
Plan plan_scaling(const ExperimentConfig& cfg);
Plan plan_global_scaling(const ExperimentConfig& cfg);
Plan plan_gamma_scan(const ExperimentConfig& cfg);
Plan plan_resonance(const ExperimentConfig& cfg);
Plan plan_oracle_check(const ExperimentConfig& cfg);

Plan make_plan(const ExperimentConfig& cfg);

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
  bool resume = false;
  std::ostream* sink = nullptr;  // used when the config has no output path
};

struct RunResult {
  std::vector<std::string> header;
  std::string columns;
  std::vector<std::string> rows;
  std::vector<std::string> footer;
  bool failed = false;
  std::size_t resumed_tasks = 0;
};

RunResult run_plan(const Plan& plan, const std::vector<std::string>& header, const std::string& output_path,
                   const RunOptions& opt);

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// printf("%.12e")
std::string format_real(Real x);

std::vector<std::string> split_csv(const std::string& line);

/// Fit of the `x,qfi` rows of a scaling run.
ScalingFit fit_rows(const std::vector<std::string>& rows);

}  // namespace floqsense
