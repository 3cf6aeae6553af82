// floqsense <experiment> --config <path> [--set key=value]... [--threads n] [--output <path>] [--resume]

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floqsense/experiments.hpp"

namespace {

enum Exit { kOk = 0, kBadConfig = 1, kNumerical = 2, kOracleFailed = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of driven XY chain blocks"};
  std::string experiment;
  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
  std::string output;
  bool resume = false;
  bool list_presets = false;

  app.add_option("experiment", experiment,
                 "heatmap, timeseries, h0scan, scaling, resonance, oracle-check, global-scaling, gamma-scan");
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--set", overrides, "override, key=value (repeatable)");
  app.add_option("--threads", threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--output", output, "CSV output path (default: stdout)");
  app.add_flag("--resume", resume, "continue an interrupted run from its checkpoint");
  app.add_flag("--list-presets", list_presets, "print preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  if (list_presets) {
    for (const auto& [name, kv] : floqsense::presets()) std::cout << name << ' ' << kv.at("experiment") << '\n';
    return kOk;
  }

  try {
    if (experiment.empty()) throw floqsense::ConfigError("missing experiment name");
    const auto exp = floqsense::parse_experiment(experiment);
    floqsense::KeyValues file_values;
    if (!config_path.empty()) file_values = floqsense::read_config_file(config_path);
    if (!output.empty()) overrides.push_back("output=" + output);
    const auto cfg = floqsense::resolve_config(exp, file_values, overrides);

    floqsense::RunOptions opt;
    opt.threads = threads;
    opt.resume = resume;
    opt.sink = &std::cout;
    const auto res = floqsense::run_experiment(cfg, opt);
    if (res.failed) {
      std::cerr << "floqsense: oracle check failed\n";
      return kOracleFailed;
    }
    return kOk;
  } catch (const floqsense::ConfigError& e) {
    std::cerr << "floqsense: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const floqsense::InvalidParameter& e) {
    std::cerr << "floqsense: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const floqsense::ResourceLimit& e) {
    std::cerr << "floqsense: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "floqsense: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const floqsense::Error& e) {
    std::cerr << "floqsense: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "floqsense: " << e.what() << '\n';
    return kNumerical;
  }
}
