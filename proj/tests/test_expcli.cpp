#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "floqsense/experiments.hpp"

using namespace floqsense;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "floqsense_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FLOQSENSE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// J cos(pi/4) as the momentum grid computes it
const std::string kCrossingField = "7.0710678118654757e-01";

}  // namespace

TEST_SUITE("expcli") {
  TEST_CASE("format and csv helpers") {
    CHECK(format_real(1.0) == "1.000000000000e+00");
    CHECK(format_real(-2.5e-7) == "-2.500000000000e-07");
    const auto f = split_csv("steady,,2,1.0");
    REQUIRE(f.size() == 4);
    CHECK(f[1].empty());
  }

  TEST_CASE("config layering") {
    const auto cfg = resolve_config(Experiment::heatmap, {{"preset", "fig3c"}, {"h1", "1.2"}}, {"h1=0.9", "L=2,4"});
    CHECK(cfg.drive.omega == 2.0);
    CHECK(cfg.drive.h1 == 0.9);
    CHECK(cfg.L_list == std::vector<int>{2, 4});
    CHECK(cfg.state == StateLabel::steady());
    CHECK(cfg.dh0 == kSteadyDh0);
    const auto g = resolve_config(Experiment::heatmap, {{"preset", "fig1a"}}, {});
    CHECK(g.dh0 == kGroundDh0);
    CHECK(g.chain.N == 6000);
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(resolve_config(Experiment::heatmap, {{"bogus", "1"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::heatmap, {}, {"N=7"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::heatmap, {}, {"gamma=abc"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::heatmap, {}, {"preset=fig5a"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::heatmap, {}, {"h0_count=0"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::oracle_check, {}, {"N=20"}), ConfigError);
    CHECK_THROWS_AS(resolve_config(Experiment::scaling, {}, {"L=2,4"}), ConfigError);
    CHECK_THROWS_AS(parse_experiment("nope"), ConfigError);
    CHECK_THROWS_AS(parse_override("novalue"), ConfigError);
  }

  TEST_CASE("every preset resolves") {
    for (const auto& [name, kv] : presets()) {
      CHECK_NOTHROW(resolve_config(parse_experiment(kv.at("experiment")), {{"preset", name}}, {}));
    }
  }

  TEST_CASE("config file parsing") {
    const auto path = scratch_dir() / "a.cfg";
    {
      std::ofstream out(path);
      out << "# comment\nN = 100   # trailing\n\nh0=0.5\n";
    }
    const auto kv = read_config_file(path.string());
    CHECK(kv.at("N") == "100");
    CHECK(kv.at("h0") == "0.5");
    CHECK_THROWS_AS(read_config_file((scratch_dir() / "missing.cfg").string()), ConfigError);
  }

  TEST_CASE("1x1 heatmap equals a single block_qfi") {
    const auto cfg = resolve_config(Experiment::heatmap, {},
                                    {"N=200", "h0_min=0.8", "h0_count=1", "gamma_min=0.6", "gamma_count=1",
                                     "L=3", "steps=256", "omega=1.5", "h1=0.7"});
    const auto res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 1);
    ChainParams cp;
    cp.N = 200;
    cp.gamma = 0.6;
    cp.h0 = 0.8;
    const auto q = block_qfi(cp, DriveParams::make(0.7, 1.5), 3, StateLabel::steady(), kSteadyDh0,
                             kDefaultEpsilonCut, {256, StepScheme::magnus4});
    CHECK(split_csv(res.rows[0]).back() == format_real(q.value));
  }

  TEST_CASE("timeseries consistency") {
    const auto cfg = resolve_config(Experiment::timeseries, {}, {"N=100", "L=2", "n_max=5", "steps=256", "h1=0"});
    const auto res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 7);
    const Real first = std::stod(split_csv(res.rows[0])[3]);
    for (const auto& r : res.rows) CHECK(std::abs(std::stod(split_csv(r)[3]) - first) < 1e-6 * first);
    CHECK(split_csv(res.rows.back())[0] == "steady");

    ChainParams cp = cfg.chain;
    const auto g = block_qfi(cp, cfg.drive, 2, StateLabel::ground(), kSteadyDh0);
    CHECK(split_csv(res.rows[0])[3] == format_real(g.value));
  }

  TEST_CASE("gamma scan ground curve is even in gamma") {
    const auto cfg = resolve_config(Experiment::gamma_scan, {},
                                    {"N=300", "L=2", "gamma_min=-1", "gamma_max=1", "gamma_count=9", "steps=128",
                                     "dh0=1e-3"});
    const auto res = run_experiment(cfg);
    std::vector<Real> ground;
    for (const auto& r : res.rows) {
      const auto f = split_csv(r);
      if (f[2] == "ground") ground.push_back(std::stod(f[4]));
    }
    REQUIRE(ground.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(ground[i] - ground[8 - i]) <= 1e-8 * std::max(1.0, ground[i]));
    CHECK(ground[4] < 1e-8);
  }

  TEST_CASE("scaling footer") {
    const auto cfg = resolve_config(Experiment::global_scaling, {}, {"N_list=100,200,400", "h0=1", "gamma=1"});
    const auto res = run_experiment(cfg);
    REQUIRE(res.footer.size() == 2);
    CHECK(res.footer[0] == "# a,eta,r_squared");
    const auto f = split_csv(res.footer[1].substr(2));
    CHECK(std::stod(f[1]) == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("oracle check passes and catches a flipped pairing sign") {
    const auto ok = run_experiment(resolve_config(Experiment::oracle_check, {}, {"draws=2", "strobo_max=2"}));
    CHECK_FALSE(ok.failed);
    const auto still = run_experiment(resolve_config(Experiment::oracle_check, {}, {"draws=2", "strobo_max=1", "seed=5"}));
    CHECK_FALSE(still.failed);
    const auto bad =
        run_experiment(resolve_config(Experiment::oracle_check, {}, {"draws=2", "strobo_max=2", "flip_pairing=true"}));
    CHECK(bad.failed);
  }

  TEST_CASE("identical runs give identical bytes, resume reproduces them") {
    const auto dir = scratch_dir();
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    const std::vector<std::string> over = {"N=100", "h0_count=5", "gamma_count=4", "steps=64", "L=2"};
    auto cfg = resolve_config(Experiment::heatmap, {}, over);
    cfg.output_path = a.string();
    run_experiment(cfg, {2, false, nullptr});
    cfg.output_path = b.string();
    run_experiment(cfg, {1, false, nullptr});
    const std::string full = slurp(a);
    CHECK(full == slurp(b));
    CHECK(full.find('\r') == std::string::npos);
    CHECK(full.rfind("# version = ", 0) == 0);

    // simulate an interruption after two grid rows: cut the file and rewind the checkpoint
    std::size_t header_bytes = 0;
    {
      std::istringstream ss(full);
      std::string line;
      std::size_t seen = 0;
      const std::size_t keep = config_echo(cfg).size() + 1 + 2 * 5;  // header, columns, two rows of 5 points
      while (seen < keep && std::getline(ss, line)) {
        header_bytes += line.size() + 1;
        ++seen;
      }
    }
    fs::resize_file(b, header_bytes);
    {
      std::ofstream ck(b.string() + ".ckpt", std::ios::binary | std::ios::trunc);
      ck << "floqsense-checkpoint 1\ncompleted 2\noffset " << header_bytes << "\nheader "
         << config_echo(cfg).size() << "\n";
      for (const auto& h : config_echo(cfg)) ck << "# " << h << "\n";
    }
    const auto res = run_experiment(cfg, {1, true, nullptr});
    CHECK(res.resumed_tasks == 2);
    CHECK(slurp(b) == full);

    // a checkpoint from another config is refused
    auto other = resolve_config(Experiment::heatmap, {}, {"N=102", "h0_count=5", "gamma_count=4", "steps=64", "L=2"});
    other.output_path = b.string();
    CHECK_THROWS_AS(run_experiment(other, {1, true, nullptr}), ConfigError);
  }

  TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir();
    const auto out = (dir / "cli.csv").string();
    CHECK(cli("global-scaling --set N_list=100,200,400 --output " + out) == 0);
    CHECK(cli("global-scaling --set N_list=100,200,400 --output " + out + " --resume") == 0);
    CHECK(cli("heatmap --set N=7") == 1);
    CHECK(cli("nonsense") == 1);
    CHECK(cli("heatmap --config /nonexistent/x.cfg") == 1);
    CHECK(cli("heatmap --set N=20 --set h0_count=1 --set gamma_count=1 --output /nonexistent/dir/x.csv") == 1);
    CHECK(cli("oracle-check --set draws=1 --set strobo_max=1 --set flip_pairing=true") == 3);
    CHECK(cli("oracle-check --set draws=1 --set strobo_max=1") == 0);
    // a mode sitting exactly on its level crossing has no ground state
    CHECK(cli("heatmap --set N=4 --set state=ground --set L=2 --set gamma_min=0 --set gamma_count=1 "
              "--set h0_min=" + kCrossingField + " --set h0_count=1") == 2);
  }
}
