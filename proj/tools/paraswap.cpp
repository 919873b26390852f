// paraswap: one experiment per invocation; data CSV + run metadata + plot script.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "paraswap/config.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/io.hpp"
#include "paraswap/log.hpp"
#include "paraswap/parallel.hpp"

using namespace paraswap;
using namespace paraswap::units;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string seed;
  std::string shots;
  int threads = 0;
};

// Collects artifacts and writes them only after all computation is done.
class Run {
 public:
  Run(std::string name, RunConfig cfg, json original, json overrides)
      : name_(std::move(name)), cfg_(std::move(cfg)), original_(std::move(original)),
        overrides_(std::move(overrides)), t0_(std::chrono::steady_clock::now()) {}

  const RunConfig& cfg() const { return cfg_; }
  const DeviceParams& device() const { return cfg_.device; }

  double point_phi(int i) const { return device().coupler_flux_map.to_phi(cfg_.points.at(i).flux_mv); }

  void csv(const std::string& file, std::string text, const std::string& plot_kind = "") {
    files_.emplace_back(file, std::move(text));
    if (!plot_kind.empty()) {
      const std::string stem = fs::path(file).stem().string();
      files_.emplace_back(stem + "_plot.py", io::plot_script(plot_kind, file));
    }
  }
  void result(const std::string& key, json value) { results_[key] = std::move(value); }
  void mark(const std::string& stage) {
    timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

  void finish() {
    mark("total");
    const fs::path dir(cfg_.output_dir);
    fs::create_directories(dir);
    json files = json::array();
    for (const auto& [name, text] : files_) {
      io::write_text(dir / name, text);
      files.push_back(name);
    }
    json meta;
    meta["experiment"] = name_;
    meta["original_config"] = original_;
    meta["overrides"] = overrides_;
    meta["resolved_config"] = cfg_.to_json();
    meta["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
    meta["shots"] = cfg_.shots ? json(*cfg_.shots) : json("exact");
    meta["timings_s"] = timings_;
    meta["results"] = results_;
    meta["warnings"] = warnings_;
    meta["files"] = files;
    io::write_json(dir / (name_ + ".meta.json"), meta);
    std::cout << (dir / (name_ + ".meta.json")).string() << "\n";
  }

  void warn(const std::string& w) { warnings_.push_back(w); }

 private:
  std::string name_;
  RunConfig cfg_;
  json original_;
  json overrides_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::pair<std::string, std::string>> files_;
  json results_ = json::object();
  json timings_ = json::object();
  json warnings_ = json::array();
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

json calibration_json(const GateCalibration& c) {
  return {{"amplitude_phi0", c.pulse.amplitude},
          {"drive_freq_mhz", to_mhz(c.pulse.omega_drive)},
          {"swap_time_ns", to_ns(c.swap_time)},
          {"transfer", c.transfer},
          {"max_coupler_population", c.max_coupler_population},
          {"virtual_z_q1", c.virtual_z_q1},
          {"virtual_z_q2", c.virtual_z_q2},
          {"coherent_fidelity", c.coherent_fidelity}};
}

void j12_sweep(Run& run) {
  const DeviceParams& d = run.device();
  std::vector<io::Row> rows;
  for (double f : run.cfg().j12_sweep.coupler_ghz.values()) {
    const double phi = flux_for_coupler_frequency(d, ghz(f));
    rows.push_back({f, phi, d.coupler_flux_map.to_mv(phi), to_mhz(effective_coupling_j12(d, phi)),
                    to_mhz(j12_derivative(d, phi, 1))});
  }
  run.mark("compute");
  const double off = find_off_flux(d);
  run.result("off_coupler_freq_ghz", to_ghz(coupler_frequency(d, off)));
  run.result("off_flux_mv", d.coupler_flux_map.to_mv(off));
  run.csv("j12-sweep.csv",
          io::to_csv({"coupler_freq_ghz", "phi", "flux_mv", "j12_mhz", "dj12_dphi_mhz"}, rows), "j12-sweep");
}

void zz_sweep(Run& run) {
  const DeviceParams& d = run.device();
  const ZzSweepSettings& s = run.cfg().zz_sweep;
  const std::vector<double> freqs = s.coupler_ghz.values();
  std::vector<io::Row> rows(freqs.size());
  parallel_for(freqs.size(), run.cfg().threads, [&](std::size_t i) {
    const double phi = flux_for_coupler_frequency(d, ghz(freqs[i]));
    io::Row r{freqs[i], phi, d.coupler_flux_map.to_mv(phi), to_mhz(static_zz(d, phi, s.levels))};
    if (s.ramsey) r.push_back(to_mhz(ramsey_zz(d, phi, s.levels).zz));
    rows[i] = std::move(r);
  });
  run.mark("compute");
  run.result("zero_zz_coupler_freq_ghz", to_ghz(coupler_frequency(d, find_zero_zz_flux(d, s.levels))));
  std::vector<std::string> header{"coupler_freq_ghz", "phi", "flux_mv", "static_zz_mhz"};
  if (s.ramsey) header.push_back("ramsey_zz_mhz");
  run.csv("zz-sweep.csv", io::to_csv(header, rows), "zz-sweep");
}

void chevron(Run& run) {
  const RunConfig& cfg = run.cfg();
  const ChevronSettings& c = cfg.chevron;
  const double phi = run.point_phi(c.point);
  double amp = c.amplitude;
  if (amp <= 0.0) {
    const GateCalibration cal = calibrate_gate(run.device(), phi, cfg.gate.time, cfg.calibration_options());
    run.result("calibration", calibration_json(cal));
    amp = cal.pulse.amplitude;
  }
  const double delta0 = effective_drive_frequency(run.device(), phi, 0.0);
  const double center = c.center_mhz > 0.0 ? mhz(c.center_mhz) : delta0;
  std::vector<double> freqs = linspace(center - 0.5 * mhz(c.span_mhz), center + 0.5 * mhz(c.span_mhz), c.freq_points);
  const std::vector<double> times = linspace(0.0, c.duration_ns * 1e-9, c.time_points);
  const SweepGrid g = chevron_scan(run.device(), phi, amp, freqs, times, cfg.model, 0.0, cfg.threads);
  run.mark("compute");
  run.result("amplitude_phi0", amp);
  run.result("delta12_mhz", to_mhz(delta0));
  try {
    const double res = chevron_resonance(g);
    run.result("resonance_mhz", to_mhz(res));
    run.result("shift_below_delta12_mhz", to_mhz(delta0 - res));
  } catch (const FitError& e) {
    run.warn(e.what());
  }
  run.csv("chevron.csv", io::grid_csv(g, "drive_freq_mhz", 1.0 / mhz(1.0), "time_ns", 1e9, "pop_q1"), "chevron");
}

void swap_spec(Run& run) {
  const RunConfig& cfg = run.cfg();
  const SwapSpecSettings& s = cfg.swap_spec;
  std::vector<double> freqs;
  for (double f : s.coupler_ghz.values()) freqs.push_back(ghz(f));
  const std::vector<double> times = linspace(0.0, s.duration_ns * 1e-9, s.time_points);
  const SwapSpectroscopy r = swap_spectroscopy(run.device(), freqs, times, ModelSpec::transmon(s.levels),
                                               s.ripple_threshold, cfg.threads);
  run.mark("compute");
  std::vector<io::Row> rows;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    rows.push_back({to_ghz(freqs[i]), to_mhz(r.j12_fit[i]), to_mhz(r.j12_model[i]), r.ripple[i],
                    static_cast<long long>(r.ripple_flag[i])});
  }
  run.csv("swap-spec.csv", io::grid_csv(r.grid, "coupler_freq_ghz", 1e-9 / kTwoPi, "time_ns", 1e9, "pop_q2"),
          "swap-spec");
  run.csv("swap-spec_summary.csv",
          io::to_csv({"coupler_freq_ghz", "j12_fit_mhz", "j12_model_mhz", "ripple", "ripple_flag"}, rows));
}

GateSimulator noisy_gate(const Run& run, const GateCalibration& cal, PhysicalityMonitor* monitor) {
  const BudgetOptions b = run.cfg().budget_options();
  EvolveOptions evolve = b.calibration.evolve;
  evolve.monitor = monitor;
  GateSimulator gate(run.device(), cal.pulse, b.calibration.spec,
                     NoiseModel::from_device(run.device(), b.coupler_t1, b.coupler_tphi), evolve);
  gate.set_virtual_z(cal.virtual_z_q1, cal.virtual_z_q2);
  return gate;
}

void qpt(Run& run) {
  const RunConfig& cfg = run.cfg();
  const double phi = run.point_phi(cfg.qpt.point);
  const GateCalibration cal = calibrate_gate(run.device(), phi, cfg.gate.time, cfg.calibration_options());
  run.mark("calibration");
  PhysicalityMonitor monitor;
  const GateSimulator gate = noisy_gate(run, cal, &monitor);
  const GateQpt q = run_gate_qpt(gate, cfg.qpt_settings());
  const PopulationTrace tr = simulate_population(
      run.device(), cal.pulse, QuantumState::basis({1, 0, 0}, build_static(run.device(), phi, cfg.model).dims),
      NoiseModel::from_device(run.device()), cfg.model, 205);
  run.mark("compute");
  const ErrorBudget b = error_budget(q.error, cfg.gate.time, run.device().t1_q1, run.device().t1_q2,
                                     run.device().tphi_q1, run.device().tphi_q2);
  run.result("calibration", calibration_json(cal));
  run.result("process_fidelity", q.process_fidelity);
  run.result("error_fidelity", b.fidelity);
  run.result("h_zz_khz", to_khz(b.h_zz));
  run.result("chi_exp", io::chi_metadata(q.chi_exp.cp_projected, cfg.seed, cfg.shots));
  run.result("physicality", {{"max_trace_error", monitor.max_trace_error},
                             {"min_eigenvalue", monitor.min_eigenvalue},
                             {"samples", monitor.samples}});
  run.csv("qpt_chi.csv", io::chi_csv(q.chi_exp.chi), "chi");
  run.csv("qpt_chi_err.csv", io::chi_csv(q.error.chi_err), "chi");
  run.csv("qpt_populations.csv", io::population_csv(tr), "populations");
}

void error_budget_cmd(Run& run) {
  const RunConfig& cfg = run.cfg();
  const std::vector<PointResult> r = run_error_budget(run.device(), cfg.points, cfg.budget_options());
  run.mark("compute");
  std::vector<io::Row> rows;
  json points = json::array();
  for (const auto& p : r) {
    io::Row row = io::budget_row(p);
    row.insert(row.begin(), p.point.name);
    rows.push_back(std::move(row));
    points.push_back({{"name", p.point.name},
                      {"calibration", calibration_json(p.calibration)},
                      {"osc_negative", p.budget.osc_negative},
                      {"zz_unreliable", p.budget.zz_unreliable},
                      {"physicality_ok", p.physicality.ok()}});
    if (p.budget.osc_negative) run.warn(p.point.name + ": oscillation bound is negative");
  }
  run.result("points", points);
  std::vector<std::string> header = io::budget_header();
  header.insert(header.begin(), "point");
  run.csv("error-budget.csv", io::to_csv(header, rows), "error-budget");
}

void decay_fit(Run& run) {
  const RunConfig& cfg = run.cfg();
  const double phi = run.point_phi(cfg.decay_fit.point);
  const GateCalibration cal = calibrate_gate(run.device(), phi, cfg.gate.time, cfg.calibration_options());
  const GateSimulator gate = noisy_gate(run, cal, nullptr);
  const auto pts = cfg.decay_fit.twirl
                       ? repeat_channel_qpt(pauli_twirl(gate.channel(), iswap()), cfg.decay_fit.n_list,
                                            cfg.qpt_settings())
                       : repeat_gate_qpt(gate, cfg.decay_fit.n_list, cfg.qpt_settings());
  run.mark("compute");
  const DecayFit fit = fit_fidelity_decay(pts);
  if (std::abs(fit.p - pts.front().second) > 0.01 && !cfg.decay_fit.twirl) {
    run.warn("P differs from the single-gate fidelity by more than 0.01; coherent errors add up "
             "across repetitions (set decay-fit.twirl to fit the Pauli-twirled channel)");
  }
  run.result("A", fit.a);
  run.result("P", fit.p);
  run.result("A_err", fit.a_err);
  run.result("P_err", fit.p_err);
  run.result("single_gate_fidelity", pts.front().second);
  std::vector<io::Row> rows;
  for (const auto& [n, f] : pts) {
    rows.push_back({static_cast<long long>(n), f, fit.a * std::pow(fit.p, n) + 1.0 / 16.0});
  }
  run.csv("decay-fit.csv", io::to_csv({"N", "F", "F_fit"}, rows), "decay-fit");
}

void calibrate(Run& run) {
  const RunConfig& cfg = run.cfg();
  std::vector<GateCalibration> cals(cfg.points.size());
  parallel_for(cfg.points.size(), cfg.threads, [&](std::size_t i) {
    cals[i] = calibrate_gate(run.device(), run.point_phi(static_cast<int>(i)), cfg.gate.time,
                             cfg.calibration_options());
  });
  run.mark("compute");
  std::vector<io::Row> rows;
  for (std::size_t i = 0; i < cals.size(); ++i) {
    const GateCalibration& c = cals[i];
    const double phi = run.point_phi(static_cast<int>(i));
    rows.push_back({cfg.points[i].name, cfg.points[i].flux_mv, to_ghz(coupler_frequency(run.device(), phi)),
                    c.pulse.amplitude, to_mhz(c.pulse.omega_drive), to_ns(c.swap_time), c.transfer,
                    c.max_coupler_population, c.virtual_z_q1, c.virtual_z_q2, c.coherent_fidelity});
  }
  run.csv("calibrate.csv",
          io::to_csv({"point", "flux_mv", "coupler_freq_ghz", "amplitude_phi0", "drive_freq_mhz", "swap_time_ns",
                      "transfer", "max_coupler_population", "virtual_z_q1", "virtual_z_q2",
                      "coherent_fidelity"},
                     rows),
          "calibrate");
}

void report_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << std::endl;
}

int execute(const std::string& name, const Flags& flags, const std::function<void(Run&)>& body) {
  try {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot open configuration file: " + flags.config);
    json original;
    try {
      original = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
      throw ConfigError("cannot parse " + flags.config + ": " + e.what());
    }
    json doc = original;
    json overrides = json::object();
    if (!flags.out.empty()) overrides["output_dir"] = flags.out;
    if (!flags.seed.empty()) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(flags.seed, &used);
        if (used != flags.seed.size() || flags.seed.front() == '-') throw std::invalid_argument("");
        overrides["seed"] = v;
      } catch (const std::exception&) {
        throw ConfigError("--seed must be a nonnegative 64-bit integer");
      }
    }
    if (!flags.shots.empty()) {
      if (flags.shots == "exact") {
        overrides["shots"] = "exact";
      } else {
        try {
          std::size_t used = 0;
          const long long v = std::stoll(flags.shots, &used);
          if (used != flags.shots.size()) throw std::invalid_argument("");
          overrides["shots"] = v;
        } catch (const std::exception&) {
          throw ConfigError("--shots must be a positive integer or \"exact\"");
        }
      }
    }
    if (flags.threads != 0) overrides["threads"] = flags.threads;
    overrides["experiment"] = name;
    if (doc.is_object()) doc.update(overrides);
    Run run(name, parse_config(doc), original, overrides);
    log::set_warning_sink([&run](const std::string& w) {
      run.warn(w);
      std::cerr << "warning: " << w << "\n";
    });
    body(run);
    run.finish();
    return 0;
  } catch (const ConfigError& e) {
    report_error(e.code(), e.what());
    return 2;
  } catch (const Error& e) {
    report_error(e.code(), e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric iSWAP simulation: sweeps, calibration, tomography and error budgets"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::function<void(Run&)>>> commands{
      {"j12-sweep", j12_sweep}, {"zz-sweep", zz_sweep},         {"chevron", chevron},
      {"swap-spec", swap_spec}, {"qpt", qpt},                   {"error-budget", error_budget_cmd},
      {"decay-fit", decay_fit}, {"calibrate", calibrate}};
  std::map<std::string, std::string> help{
      {"j12-sweep", "Effective coupling J12 versus coupler frequency"},
      {"zz-sweep", "Static ZZ versus coupler frequency (optionally by Ramsey)"},
      {"chevron", "Population of Q1 versus drive frequency and time"},
      {"swap-spec", "Static-flux swap pattern versus coupler frequency"},
      {"qpt", "Process tomography of the calibrated gate"},
      {"error-budget", "Calibrate, simulate and decompose the error at every operating point"},
      {"decay-fit", "Fidelity of repeated gates and the A P^N + 1/16 fit"},
      {"calibrate", "Drive amplitude and frequency for the gate time at every operating point"}};
  std::string chosen;
  for (const auto& [name, body] : commands) {
    CLI::App* sub = app.add_subcommand(name, help[name]);
    sub->add_option("--config", flags.config, "Configuration file (JSON)")->required();
    sub->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", flags.seed, "Random seed (overrides seed)");
    sub->add_option("--shots", flags.shots, "Shots per measurement setting, or 'exact'");
    sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::Range(1, 1024));
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("usage_error", e.what());
    return 64;
  }
  for (const auto& [name, body] : commands) {
    if (name == chosen) return execute(name, flags, body);
  }
  return 64;
}
