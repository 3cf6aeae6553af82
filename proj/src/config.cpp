#include "floqsense/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "floqsense/oracle.hpp"

namespace floqsense {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeyValues& base_defaults() {
  static const KeyValues d = {
      {"N", "1000"},
      {"J", "1"},
      {"gamma", "1"},
      {"h0", "1"},
      {"h1", "1.5"},
      {"omega", "2"},
      {"state", "steady"},
      {"L", "2"},
      {"N_list", "500,1000,2000,4000,6000"},
      {"h0_min", "-2"},
      {"h0_max", "2"},
      {"h0_count", "41"},
      {"gamma_min", "-1"},
      {"gamma_max", "1"},
      {"gamma_count", "41"},
      {"dh0", "auto"},
      {"epsilon_cut", "1e-10"},
      {"steps", "4096"},
      {"scheme", "magnus4"},
      {"n_max", "500"},
      {"q_max", "4"},
      {"draws", "20"},
      {"seed", "20240601"},
      {"dense_steps", "2000"},
      {"strobo_max", "5"},
      {"flip_pairing", "false"},
      {"output", ""},
      {"preset", ""},
  };
  return d;
}

KeyValues experiment_defaults(Experiment e) {
  switch (e) {
    case Experiment::heatmap:
      return {{"steps", "512"}};
    case Experiment::timeseries:
      return {{"N", "6000"}, {"omega", "1"}, {"L", "2,4"}};
    case Experiment::h0scan:
      return {{"N", "6000"}, {"omega", "1"}, {"h1", "1"}, {"L", "4"}, {"h0_min", "0"}, {"h0_max", "2"},
              {"h0_count", "201"}, {"steps", "1024"}};
    case Experiment::scaling:
      return {{"N", "6000"}, {"L", "2,4,6,8,12,16,24,32,48,64"}};
    case Experiment::resonance:
      return {{"omega", "1"}, {"h0_min", "0"}, {"h0_max", "2"}};
    case Experiment::oracle_check:
      return {{"N", "8"}, {"L", "2,3"}};
    case Experiment::global_scaling:
      return {{"state", "ground"}};
    case Experiment::gamma_scan:
      return {{"N", "6000"}, {"L", "4"}, {"steps", "1024"}};
  }
  return {};
}

KeyValues with_experiment(const std::string& name, KeyValues kv) {
  kv["experiment"] = name;
  return kv;
}

Real to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const Real x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(to_long(key, item)));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

StateLabel to_state(const std::string& v) {
  if (v == "ground") return StateLabel::ground();
  if (v == "steady") return StateLabel::steady();
  if (v.rfind("strobo:", 0) == 0) {
    const long n = to_long("state", v.substr(7));
    if (n < 0) throw ConfigError("state: stroboscopic index must be >= 0");
    return StateLabel::strobo(n);
  }
  throw ConfigError("state must be ground, steady or strobo:<n>, got '" + v + "'");
}

}  // namespace

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::heatmap:
      return "heatmap";
    case Experiment::timeseries:
      return "timeseries";
    case Experiment::h0scan:
      return "h0scan";
    case Experiment::scaling:
      return "scaling";
    case Experiment::resonance:
      return "resonance";
    case Experiment::oracle_check:
      return "oracle-check";
    case Experiment::global_scaling:
      return "global-scaling";
    case Experiment::gamma_scan:
      return "gamma-scan";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::heatmap, Experiment::timeseries, Experiment::h0scan, Experiment::scaling,
                 Experiment::resonance, Experiment::oracle_check, Experiment::global_scaling,
                 Experiment::gamma_scan}) {
    if (experiment_name(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<Real> Axis::values() const {
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < count; ++i) out.push_back(min + (max - min) * i / (count - 1));
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

const std::map<std::string, KeyValues>& presets() {
  static const std::map<std::string, KeyValues> p = {
      // ground-state heatmaps and scans
      {"fig1a", with_experiment("heatmap", {{"N", "6000"}, {"state", "ground"}, {"L", "2"}})},
      {"fig1b", with_experiment("heatmap", {{"N", "6000"}, {"state", "ground"}, {"L", "4"}})},
      {"fig1c", with_experiment("h0scan", {{"N", "6000"}, {"state", "ground"}, {"L", "2,4,8,16"}, {"h0_min", "-2"},
                                           {"h0_max", "2"}, {"h0_count", "401"}})},
      {"fig1d", with_experiment("scaling", {{"N", "6000"}, {"state", "ground"}, {"gamma", "1"}})},
      {"fig1d-g05", with_experiment("scaling", {{"N", "6000"}, {"state", "ground"}, {"gamma", "0.5"}})},
      {"fig1d-g01", with_experiment("scaling", {{"N", "6000"}, {"state", "ground"}, {"gamma", "0.1"}})},
      // stroboscopic series
      {"fig2a", with_experiment("timeseries", {{"N", "6000"}, {"omega", "1"}, {"h1", "1.5"}, {"L", "2"}})},
      {"fig2b", with_experiment("timeseries", {{"N", "6000"}, {"omega", "1"}, {"h1", "1.5"}, {"L", "4"}})},
      // steady-state heatmaps
      {"fig3a", with_experiment("heatmap", {{"omega", "4"}, {"L", "2"}})},
      {"fig3b", with_experiment("heatmap", {{"omega", "4"}, {"L", "4"}})},
      {"fig3c", with_experiment("heatmap", {{"omega", "2"}, {"L", "2"}})},
      {"fig3d", with_experiment("heatmap", {{"omega", "2"}, {"L", "4"}})},
      // resonances
      {"fig4a", with_experiment("h0scan", {{"omega", "1"}, {"h1", "1"}, {"L", "4"}})},
      {"fig4b", with_experiment("h0scan", {{"omega", "0.5"}, {"h1", "1"}, {"L", "4"}})},
      {"fig4c", with_experiment("resonance", {{"omega", "1"}, {"h1", "1"}})},
      {"fig4d", with_experiment("resonance", {{"omega", "0.5"}, {"h1", "1"}})},
      // steady-state scaling
      {"fig5a", with_experiment("scaling", {{"omega", "2"}, {"h0", "1"}})},
      {"fig5b", with_experiment("scaling", {{"omega", "1"}, {"h0", "1"}})},
      {"fig5c", with_experiment("scaling", {{"omega", "0.5"}, {"h0", "1"}})},
      {"fig5d", with_experiment("scaling", {{"omega", "1"}, {"h0", "0.5"}})},
      // gamma dependence
      {"figS8a", with_experiment("gamma-scan", {{"h0", "1"}, {"L", "4"}})},
      {"figS8b", with_experiment("gamma-scan", {{"h0", "1"}, {"L", "20"}})},
      // whole-chain scaling
      {"figS9a", with_experiment("global-scaling", {{"h0", "1"}, {"gamma", "0.5"}})},
      {"figS9b", with_experiment("global-scaling", {{"h0", "1"}, {"gamma", "1"}})},
      {"figS9c", with_experiment("global-scaling", {{"h0", "0.5"}, {"gamma", "0.5"}})},
      {"figS9d", with_experiment("global-scaling", {{"h0", "0.5"}, {"gamma", "1"}})},
      {"oracle", with_experiment("oracle-check", {})},
  };
  return p;
}

ExperimentConfig resolve_config(Experiment experiment, const KeyValues& file_values,
                                const std::vector<std::string>& overrides) {
  KeyValues over;
  for (const auto& o : overrides) {
    const auto [k, v] = parse_override(o);
    over[k] = v;
  }

  std::string preset_name;
  if (auto it = file_values.find("preset"); it != file_values.end()) preset_name = it->second;
  if (auto it = over.find("preset"); it != over.end()) preset_name = it->second;

  KeyValues kv = base_defaults();
  for (const auto& [k, v] : experiment_defaults(experiment)) kv[k] = v;
  if (!preset_name.empty()) {
    const auto it = presets().find(preset_name);
    if (it == presets().end()) throw ConfigError("unknown preset '" + preset_name + "'");
    KeyValues p = it->second;
    if (p.at("experiment") != experiment_name(experiment)) {
      throw ConfigError("preset '" + preset_name + "' belongs to experiment '" + p.at("experiment") + "'");
    }
    p.erase("experiment");
    for (const auto& [k, v] : p) kv[k] = v;
  }
  for (const KeyValues* layer : {&file_values, static_cast<const KeyValues*>(&over)}) {
    for (const auto& [k, v] : *layer) {
      if (!base_defaults().contains(k)) throw ConfigError("unknown key '" + k + "'");
      kv[k] = v;
    }
  }

  ExperimentConfig cfg;
  cfg.experiment = experiment;
  try {
    cfg.chain.N = static_cast<int>(to_long("N", kv["N"]));
    cfg.chain.J = to_real("J", kv["J"]);
    cfg.chain.gamma = to_real("gamma", kv["gamma"]);
    cfg.chain.h0 = to_real("h0", kv["h0"]);
    cfg.drive = DriveParams::make(to_real("h1", kv["h1"]), to_real("omega", kv["omega"]));
    cfg.state = to_state(kv["state"]);
    cfg.h0_axis = {to_real("h0_min", kv["h0_min"]), to_real("h0_max", kv["h0_max"]),
                   static_cast<int>(to_long("h0_count", kv["h0_count"]))};
    cfg.gamma_axis = {to_real("gamma_min", kv["gamma_min"]), to_real("gamma_max", kv["gamma_max"]),
                      static_cast<int>(to_long("gamma_count", kv["gamma_count"]))};
    cfg.L_list = to_int_list("L", kv["L"]);
    cfg.N_list = to_int_list("N_list", kv["N_list"]);
    if (kv["dh0"] == "auto") {
      cfg.dh0 = cfg.state.kind == StateKind::ground ? kGroundDh0 : kSteadyDh0;
    } else {
      cfg.dh0 = to_real("dh0", kv["dh0"]);
    }
    cfg.epsilon_cut = to_real("epsilon_cut", kv["epsilon_cut"]);
    cfg.integrator.steps = static_cast<int>(to_long("steps", kv["steps"]));
    if (kv["scheme"] == "magnus4") {
      cfg.integrator.scheme = StepScheme::magnus4;
    } else if (kv["scheme"] == "midpoint") {
      cfg.integrator.scheme = StepScheme::midpoint;
    } else {
      throw ConfigError("scheme must be magnus4 or midpoint");
    }
    cfg.n_max = to_long("n_max", kv["n_max"]);
    cfg.q_max = static_cast<int>(to_long("q_max", kv["q_max"]));
    cfg.draws = static_cast<int>(to_long("draws", kv["draws"]));
    cfg.seed = static_cast<std::uint64_t>(to_long("seed", kv["seed"]));
    cfg.dense_steps = static_cast<int>(to_long("dense_steps", kv["dense_steps"]));
    cfg.strobo_max = to_long("strobo_max", kv["strobo_max"]);
    cfg.flip_pairing = to_bool("flip_pairing", kv["flip_pairing"]);
    cfg.output_path = kv["output"];

    cfg.chain.validate();
    cfg.integrator.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }

  if (cfg.h0_axis.count < 1 || cfg.gamma_axis.count < 1) throw ConfigError("grid counts must be >= 1");
  if (cfg.gamma_axis.min < -1.0 || cfg.gamma_axis.max > 1.0) throw ConfigError("gamma axis must lie in [-1, 1]");
  for (int L : cfg.L_list) {
    if (L < 1 || L > cfg.chain.N) throw ConfigError("block size " + std::to_string(L) + " outside [1, N]");
  }
  for (int N : cfg.N_list) {
    if (N < 2 || N % 2 != 0) throw ConfigError("N_list entries must be even and >= 2");
  }
  if (!(cfg.dh0 > 0.0)) throw ConfigError("dh0 must be positive");
  if (!(cfg.epsilon_cut > 0.0)) throw ConfigError("epsilon_cut must be positive");
  if (cfg.n_max < 1) throw ConfigError("n_max must be >= 1");
  if (cfg.q_max < 1) throw ConfigError("q_max must be >= 1");
  if (cfg.draws < 1 || cfg.dense_steps < 1 || cfg.strobo_max < 0) throw ConfigError("invalid oracle settings");
  if (experiment == Experiment::oracle_check && cfg.chain.N > kMaxDenseSites) {
    throw ConfigError("oracle-check needs N <= " + std::to_string(kMaxDenseSites));
  }
  if ((experiment == Experiment::scaling || experiment == Experiment::global_scaling) &&
      (experiment == Experiment::scaling ? cfg.L_list.size() : cfg.N_list.size()) < 3) {
    throw ConfigError("scaling needs at least 3 sizes");
  }

  kv.erase("output");
  cfg.resolved = std::move(kv);
  return cfg;
}

std::vector<std::string> config_echo(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  out.push_back(std::string("version = ") + kToolVersion);
  out.push_back("experiment = " + experiment_name(cfg.experiment));
  for (const auto& [k, v] : cfg.resolved) out.push_back(k + " = " + v);
  return out;
}

}  // namespace floqsense
