#include "floqsense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "floqsense/oracle.hpp"

namespace floqsense {

namespace {

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

std::optional<DriveParams> drive_for(const ExperimentConfig& cfg, StateLabel label) {
  if (label.kind == StateKind::ground) return std::nullopt;
  return cfg.drive;
}

bool dh0_is_auto(const ExperimentConfig& cfg) {
  const auto it = cfg.resolved.find("dh0");
  return it != cfg.resolved.end() && it->second == "auto";
}

Real dh0_for(const ExperimentConfig& cfg, StateLabel label) {
  if (!dh0_is_auto(cfg)) return cfg.dh0;
  return label.kind == StateKind::ground ? kGroundDh0 : kSteadyDh0;
}

std::vector<std::string> fit_footer(const std::vector<std::string>& rows) {
  const ScalingFit fit = fit_power_law(fit_rows(rows).points);
  return {"# a,eta,r_squared", "# " + join({format_real(fit.a), format_real(fit.eta), format_real(fit.r_squared)})};
}

// -- checkpoint -------------------------------------------------------------

struct Checkpoint {
  std::size_t completed = 0;
  std::uintmax_t offset = 0;
  std::vector<std::string> header;
};

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint '" + tmp + "'");
    out << "floqsense-checkpoint 1\n";
    out << "completed " << ck.completed << "\n";
    out << "offset " << ck.offset << "\n";
    out << "header " << ck.header.size() << "\n";
    for (const auto& h : ck.header) out << h << "\n";
    out.flush();
    if (!out) throw ConfigError("cannot write checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Checkpoint> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string magic;
  std::getline(in, magic);
  if (magic != "floqsense-checkpoint 1") throw ConfigError("'" + path + "' is not a checkpoint file");
  Checkpoint ck;
  std::string word;
  std::size_t lines = 0;
  in >> word >> ck.completed >> word >> ck.offset >> word >> lines;
  in.ignore(1);
  for (std::size_t i = 0; i < lines; ++i) {
    std::string h;
    std::getline(in, h);
    ck.header.push_back(h);
  }
  if (!in) throw ConfigError("checkpoint '" + path + "' is truncated");
  return ck;
}

// -- plans ------------------------------------------------------------------

ExperimentConfig with_chain(const ExperimentConfig& cfg, Real h0, Real gamma) {
  ExperimentConfig c = cfg;
  c.chain.h0 = h0;
  c.chain.gamma = gamma;
  return c;
}

std::string oracle_row(int draw, const ChainParams& cp, const DriveParams& dp, StateLabel label, int L, Real fg,
                       Real fe, Real rel, Real corr, const std::string& status) {
  return std::to_string(draw) + "," + join({format_real(cp.gamma), format_real(cp.h0), format_real(dp.h1),
                                            format_real(dp.omega)}) +
         "," + label.str() + "," + std::to_string(L) + "," +
         join({format_real(fg), format_real(fe), format_real(rel), format_real(corr)}) + "," + status;
}

}  // namespace

std::string format_real(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ScalingFit fit_rows(const std::vector<std::string>& rows) {
  std::vector<std::pair<Real, Real>> pts;
  for (const auto& r : rows) {
    const auto f = split_csv(r);
    if (f.size() != 2) continue;
    pts.emplace_back(std::stod(f[0]), std::stod(f[1]));
  }
  return fit_power_law(pts);
}

Plan plan_heatmap(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "h0,gamma,L,state,omega,h1,qfi";
  const auto h0s = cfg.h0_axis.values();
  const auto gammas = cfg.gamma_axis.values();
  p.tasks = gammas.size();
  p.run_task = [cfg, h0s, gammas](std::size_t row) {
    std::vector<std::string> lines;
    const Real gamma = gammas[row];
    for (Real h0 : h0s) {
      const auto c = with_chain(cfg, h0, gamma);
      const BlockQfiProbe probe(c.chain, drive_for(cfg, cfg.state), dh0_for(cfg, cfg.state), cfg.integrator);
      for (int L : cfg.L_list) {
        const auto q = probe.evaluate(L, cfg.state, cfg.epsilon_cut);
        lines.push_back(join({format_real(h0), format_real(gamma), std::to_string(L), cfg.state.str(),
                              format_real(cfg.drive.omega), format_real(cfg.drive.h1), format_real(q.value)}));
      }
    }
    return lines;
  };
  return p;
}

Plan plan_timeseries(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "n,t,L,qfi";
  p.tasks = cfg.L_list.size();
  p.run_task = [cfg](std::size_t task) {
    const int L = cfg.L_list[task];
    const BlockQfiProbe probe(cfg.chain, cfg.drive, dh0_for(cfg, StateLabel::steady()), cfg.integrator);
    std::vector<std::string> lines;
    for (long n = 0; n <= cfg.n_max; ++n) {
      const auto q = probe.evaluate(L, StateLabel::strobo(n), cfg.epsilon_cut);
      lines.push_back(join({std::to_string(n), format_real(static_cast<Real>(n) * cfg.drive.tau), std::to_string(L),
                            format_real(q.value)}));
    }
    const auto ss = probe.evaluate(L, StateLabel::steady(), cfg.epsilon_cut);
    lines.push_back(join({"steady", "", std::to_string(L), format_real(ss.value)}));
    return lines;
  };
  return p;
}

Plan plan_h0scan(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "h0,L,qfi,gap_k0,gap_kpi";
  const auto h0s = cfg.h0_axis.values();
  p.tasks = h0s.size();
  p.run_task = [cfg, h0s](std::size_t task) {
    const Real h0 = h0s[task];
    const auto c = with_chain(cfg, h0, cfg.chain.gamma);
    const BlockQfiProbe probe(c.chain, drive_for(cfg, cfg.state), dh0_for(cfg, cfg.state), cfg.integrator);
    const Real g0 = quasienergy_gap_boundary(BoundaryMode::k0, c.chain, cfg.drive);
    const Real gpi = quasienergy_gap_boundary(BoundaryMode::kpi, c.chain, cfg.drive);
    std::vector<std::string> lines;
    for (int L : cfg.L_list) {
      const auto q = probe.evaluate(L, cfg.state, cfg.epsilon_cut);
      lines.push_back(join({format_real(h0), std::to_string(L), format_real(q.value), format_real(g0), format_real(gpi)}));
    }
    return lines;
  };
  return p;
}

Plan plan_scaling(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "x,qfi";
  p.tasks = cfg.L_list.size();
  auto once = std::make_shared<std::once_flag>();
  auto probe = std::make_shared<std::unique_ptr<BlockQfiProbe>>();
  p.run_task = [cfg, once, probe](std::size_t task) {
    std::call_once(*once, [&] {
      *probe = std::make_unique<BlockQfiProbe>(cfg.chain, drive_for(cfg, cfg.state), dh0_for(cfg, cfg.state),
                                               cfg.integrator);
    });
    const int L = cfg.L_list[task];
    const auto q = (*probe)->evaluate(L, cfg.state, cfg.epsilon_cut);
    return std::vector<std::string>{std::to_string(L) + "," + format_real(q.value)};
  };
  p.finish = fit_footer;
  return p;
}

Plan plan_global_scaling(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "x,qfi";
  p.tasks = cfg.N_list.size();
  p.run_task = [cfg](std::size_t task) {
    ChainParams cp = cfg.chain;
    cp.N = cfg.N_list[task];
    return std::vector<std::string>{std::to_string(cp.N) + "," + format_real(global_pure_qfi(cp))};
  };
  p.finish = fit_footer;
  return p;
}

Plan plan_gamma_scan(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "gamma,L,state,omega,qfi";
  const auto gammas = cfg.gamma_axis.values();
  p.tasks = gammas.size();
  p.run_task = [cfg, gammas](std::size_t task) {
    const auto c = with_chain(cfg, cfg.chain.h0, gammas[task]);
    std::vector<std::string> lines;
    for (StateLabel label : {StateLabel::ground(), StateLabel::steady()}) {
      const BlockQfiProbe probe(c.chain, drive_for(cfg, label), dh0_for(cfg, label), cfg.integrator);
      for (int L : cfg.L_list) {
        const auto q = probe.evaluate(L, label, cfg.epsilon_cut);
        lines.push_back(join({format_real(gammas[task]), std::to_string(L), label.str(), format_real(cfg.drive.omega),
                              format_real(q.value)}));
      }
    }
    return lines;
  };
  return p;
}

Plan plan_resonance(const ExperimentConfig& cfg) {
  Plan p;
  p.columns = "h0,q,branch,gap";
  p.tasks = 1;
  p.run_task = [cfg](std::size_t) {
    std::vector<std::string> lines;
    for (const auto& r : resonance_fields(cfg.drive, cfg.chain.critical_field(), cfg.q_max)) {
      if (r.h0 < cfg.h0_axis.min - 1e-12 || r.h0 > cfg.h0_axis.max + 1e-12) continue;
      ChainParams cp = cfg.chain;
      cp.h0 = r.h0;
      lines.push_back(join({format_real(r.h0), std::to_string(r.q), r.branch == BoundaryMode::k0 ? "k0" : "kpi",
                            format_real(quasienergy_gap_boundary(r.branch, cp, cfg.drive))}));
    }
    return lines;
  };
  return p;
}

Plan plan_oracle_check(const ExperimentConfig& cfg) {
  constexpr Real kQfiTolerance = 1e-4;
  constexpr Real kCorrelationTolerance = 1e-6;
  Plan p;
  p.columns = "draw,gamma,h0,h1,omega,state,L,qfi_gaussian,qfi_exact,rel_err,corr_err,status";
  p.tasks = static_cast<std::size_t>(cfg.draws);
  const Real dh0 = dh0_is_auto(cfg) ? 1e-5 : cfg.dh0;
  p.run_task = [cfg, dh0](std::size_t task) {
    std::mt19937_64 rng(cfg.seed + 7919 * task);
    std::uniform_real_distribution<Real> ug(-1.0, 1.0);
    std::uniform_real_distribution<Real> uh0(0.0, 2.0);
    std::uniform_real_distribution<Real> uh1(0.0, 2.0);
    std::uniform_real_distribution<Real> uw(0.5, 4.0);
    ChainParams cp = cfg.chain;
    cp.gamma = ug(rng);
    cp.h0 = uh0(rng);
    const Real h1 = uh1(rng);
    const Real omega = uw(rng);
    const DriveParams dp = DriveParams::make(h1, omega);
    const int draw = static_cast<int>(task);
    const int Lmax = *std::max_element(cfg.L_list.begin(), cfg.L_list.end());

    // three chains at h0 - dh0, h0, h0 + dh0, in both pipelines
    std::vector<ChainParams> cps(3, cp);
    std::vector<DenseState> dense;
    std::vector<std::vector<ModeState>> initial;
    std::vector<std::vector<FloquetData>> floquet;
    PeriodStepper stepper(dp, cfg.integrator);
    for (int s = 0; s < 3; ++s) {
      cps[static_cast<std::size_t>(s)].h0 = cp.h0 + (s - 1) * dh0;
      const auto& c = cps[static_cast<std::size_t>(s)];
      dense.push_back(dense_ground_state(c));
      initial.push_back(ground_state(c));
      std::vector<FloquetData> fl;
      for (const auto& m : initial.back()) {
        fl.push_back(floquet_modes({m.k, stepper.propagate(m.k, c), cfg.integrator.steps}, dp, m));
      }
      floquet.push_back(std::move(fl));
    }

    std::vector<std::string> lines;
    for (long n = 0; n <= cfg.strobo_max; ++n) {
      const StateLabel label = n == 0 ? StateLabel::ground() : StateLabel::strobo(n);
      if (n > 0) {
        for (int s = 0; s < 3; ++s) {
          auto& d = dense[static_cast<std::size_t>(s)];
          d = dense_evolve(d, cps[static_cast<std::size_t>(s)], dp, (n - 1) * dp.tau, n * dp.tau, cfg.dense_steps);
        }
      }
      std::vector<CorrelationSet> sets;
      for (int s = 0; s < 3; ++s) {
        const auto& fl = floquet[static_cast<std::size_t>(s)];
        std::vector<ModeExpectation> modes;
        std::vector<Real> ks;
        for (std::size_t m = 0; m < fl.size(); ++m) {
          auto e = mode_expectations(stroboscopic_mode_state(fl[m], n, initial[static_cast<std::size_t>(s)][m]));
          if (cfg.flip_pairing) e.pairing = -e.pairing;
          modes.push_back(e);
          ks.push_back(fl[m].k);
        }
        sets.push_back(correlations_from_modes(cp.N, Lmax, ks, modes, label));
      }
      const auto exact = jw_correlations(dense[1], Lmax, label);
      const Real corr = std::max((exact.C - sets[1].C).cwiseAbs().maxCoeff(), (exact.F - sets[1].F).cwiseAbs().maxCoeff());

      for (int L : cfg.L_list) {
        const Real fe = exact_block_qfi(dense[0], dense[1], dense[2], L, dh0);
        Real fg = 0.0;
        std::string status;
        try {
          std::vector<MajoranaMatrix> K;
          for (const auto& cs : sets) {
            CorrelationSet block{L, cs.C.topLeftCorner(L, L), cs.F.topLeftCorner(L, L), label};
            K.push_back(majorana_from_correlations(block));
          }
          fg = qfi_from_majorana(K[0], K[1], K[2], dh0, cfg.epsilon_cut).value;
        } catch (const ConventionViolation&) {
          status = "convention-violation";
        }
        const Real rel = std::abs(fg - fe) / std::max(std::abs(fe), 1e-8);
        if (status.empty()) {
          status = (rel < kQfiTolerance && corr < kCorrelationTolerance) ? "pass" : "fail";
        }
        lines.push_back(oracle_row(draw, cp, dp, label, L, fg, fe, rel, corr, status));
      }
    }
    return lines;
  };
  p.failed = [](const std::vector<std::string>& rows) {
    return std::any_of(rows.begin(), rows.end(), [](const std::string& r) { return split_csv(r).back() != "pass"; });
  };
  p.finish = [](const std::vector<std::string>& rows) {
    Real max_rel = 0.0;
    Real max_corr = 0.0;
    std::size_t failed = 0;
    for (const auto& r : rows) {
      const auto f = split_csv(r);
      max_rel = std::max(max_rel, std::stod(f[9]));
      max_corr = std::max(max_corr, std::stod(f[10]));
      if (f[11] != "pass") ++failed;
    }
    return std::vector<std::string>{
        "# checks,failed,max_rel_err,max_corr_err",
        "# " + std::to_string(rows.size()) + "," + std::to_string(failed) + "," + format_real(max_rel) + "," +
            format_real(max_corr)};
  };
  return p;
}

Plan make_plan(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::heatmap:
      return plan_heatmap(cfg);
    case Experiment::timeseries:
      return plan_timeseries(cfg);
    case Experiment::h0scan:
      return plan_h0scan(cfg);
    case Experiment::scaling:
      return plan_scaling(cfg);
    case Experiment::resonance:
      return plan_resonance(cfg);
    case Experiment::oracle_check:
      return plan_oracle_check(cfg);
    case Experiment::global_scaling:
      return plan_global_scaling(cfg);
    case Experiment::gamma_scan:
      return plan_gamma_scan(cfg);
  }
  throw ConfigError("unknown experiment");
}

RunResult run_plan(const Plan& plan, const std::vector<std::string>& header, const std::string& output_path,
                   const RunOptions& opt) {
  RunResult res;
  for (const auto& h : header) res.header.push_back("# " + h);
  res.columns = plan.columns;

  std::ofstream file;
  std::ostream* out = opt.sink;
  const std::string ckpt_path = output_path + ".ckpt";
  std::size_t first = 0;

  if (!output_path.empty()) {
    std::optional<Checkpoint> ck;
    if (opt.resume) ck = read_checkpoint(ckpt_path);
    if (ck) {
      if (ck->header != res.header) {
        throw ConfigError("checkpoint '" + ckpt_path + "' was written for a different configuration");
      }
      std::ifstream prev(output_path, std::ios::binary);
      if (!prev) throw ConfigError("cannot resume: output '" + output_path + "' is missing");
      std::string text(ck->offset, '\0');
      prev.read(text.data(), static_cast<std::streamsize>(ck->offset));
      if (static_cast<std::uintmax_t>(prev.gcount()) != ck->offset) {
        throw ConfigError("cannot resume: output '" + output_path + "' is shorter than its checkpoint");
      }
      std::stringstream ss(text);
      std::string line;
      std::size_t skip = res.header.size() + 1;
      while (std::getline(ss, line)) {
        if (skip > 0) {
          --skip;
          continue;
        }
        res.rows.push_back(line);
      }
      prev.close();
      std::filesystem::resize_file(output_path, ck->offset);
      file.open(output_path, std::ios::binary | std::ios::app);
      first = ck->completed;
      res.resumed_tasks = first;
    } else {
      file.open(output_path, std::ios::binary | std::ios::trunc);
    }
    if (!file) throw ConfigError("cannot write output '" + output_path + "'");
    out = &file;
    if (!ck) {
      for (const auto& h : res.header) file << h << '\n';
      file << res.columns << '\n';
      file.flush();
      write_checkpoint(ckpt_path, {0, static_cast<std::uintmax_t>(file.tellp()), res.header});
    }
  } else {
    if (opt.resume) throw ConfigError("--resume needs an output path");
    if (out) {
      for (const auto& h : res.header) *out << h << '\n';
      *out << res.columns << '\n';
    }
  }

  // worker pool; results are handed to this thread and written in task order
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, std::vector<std::string>> done;
  std::exception_ptr error;
  std::atomic<std::size_t> next{first};
  std::atomic<bool> abort{false};

  int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(plan.tasks - first, 1))));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads && first < plan.tasks; ++w) {
    pool.emplace_back([&] {
      while (!abort) {
        const std::size_t i = next++;
        if (i >= plan.tasks) return;
        try {
          auto lines = plan.run_task(i);
          std::lock_guard lock(mu);
          done.emplace(i, std::move(lines));
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
          abort = true;
        }
        cv.notify_all();
      }
    });
  }

  try {
    for (std::size_t i = first; i < plan.tasks; ++i) {
      std::vector<std::string> lines;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done.contains(i) || error; });
        if (error) break;
        lines = std::move(done[i]);
        done.erase(i);
      }
      if (out) {
        for (const auto& l : lines) *out << l << '\n';
        out->flush();
      }
      if (file.is_open()) {
        write_checkpoint(ckpt_path, {i + 1, static_cast<std::uintmax_t>(file.tellp()), res.header});
      }
      for (auto& l : lines) res.rows.push_back(std::move(l));
    }
  } catch (...) {
    abort = true;
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  if (plan.finish) res.footer = plan.finish(res.rows);
  if (plan.failed) res.failed = plan.failed(res.rows);
  if (out) {
    for (const auto& l : res.footer) *out << l << '\n';
    out->flush();
  }
  return res;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  return run_plan(make_plan(cfg), config_echo(cfg), cfg.output_path, opt);
}

}  // namespace floqsense
