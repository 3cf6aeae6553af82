#pragma once

// Flat key = value experiment configuration. Values are resolved from, in
// increasing priority: built-in defaults, a named preset, the config file,
// command-line overrides.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floqsense/qfi.hpp"

namespace floqsense {

inline constexpr const char* kToolVersion = "floqsense 1.0.0";

enum class Experiment { heatmap, timeseries, h0scan, scaling, resonance, oracle_check, global_scaling, gamma_scan };

std::string experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);

struct Axis {
  Real min = 0.0;
  Real max = 0.0;
  int count = 1;

  /// Evenly spaced, endpoints included; a single point sits at min.
  std::vector<Real> values() const;
};

using KeyValues = std::map<std::string, std::string>;

struct ExperimentConfig {
  Experiment experiment = Experiment::heatmap;
  ChainParams chain;
  DriveParams drive;
  StateLabel state;
  Axis h0_axis;
  Axis gamma_axis;
  std::vector<int> L_list;
  std::vector<int> N_list;
  Real dh0 = kGroundDh0;
  Real epsilon_cut = kDefaultEpsilonCut;
  IntegratorConfig integrator;
  long n_max = 500;
  int q_max = 4;

  // oracle-check
  int draws = 20;
  std::uint64_t seed = 0;
  int dense_steps = 2000;
  long strobo_max = 5;
  bool flip_pairing = false;

  std::string output_path;

  /// Every key with its resolved value, for the output header.
  KeyValues resolved;
};

/// Parses `key = value` lines; `#` starts a comment.
KeyValues read_config_file(const std::string& path);

/// Splits `key=value`.
std::pair<std::string, std::string> parse_override(const std::string& text);

const std::map<std::string, KeyValues>& presets();

ExperimentConfig resolve_config(Experiment experiment, const KeyValues& file_values,
                                const std::vector<std::string>& overrides);

/// Header lines (without the leading "# ") echoing tool version and config.
std::vector<std::string> config_echo(const ExperimentConfig& cfg);

}  // namespace floqsense
