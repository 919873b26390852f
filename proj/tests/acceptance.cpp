// Acceptance run: one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "paraswap/config.hpp"
#include "paraswap/error_analysis.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/fitting.hpp"
#include "paraswap/tomography.hpp"

using namespace paraswap;
using namespace paraswap::units;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  RunConfig cfg;
  std::vector<PointResult> two_level;
  std::vector<PointResult> transmon;
  double two_level_seconds = 0.0;
};

std::string pct(double x) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << 100.0 * x;
  return os.str();
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "/" : "") + f(v[i]);
  return s;
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << x;
  return os.str();
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<PointResult>& two_level(Context& ctx) {
  if (ctx.two_level.empty()) {
    BudgetOptions opt = ctx.cfg.budget_options();
    opt.calibration.spec = ModelSpec::two_level();
    const auto t0 = std::chrono::steady_clock::now();
    ctx.two_level = run_error_budget(ctx.cfg.device, ctx.cfg.points, opt);
    ctx.two_level_seconds = seconds_since(t0);
  }
  return ctx.two_level;
}

const std::vector<PointResult>& transmon(Context& ctx) {
  if (ctx.transmon.empty()) {
    BudgetOptions opt = ctx.cfg.budget_options();
    opt.calibration.spec = ModelSpec::transmon(3);
    ctx.transmon = run_error_budget(ctx.cfg.device, ctx.cfg.points, opt);
  }
  return ctx.transmon;
}

Outcome criterion1(Context& ctx) {
  const auto& r = two_level(ctx);
  const double reference[] = {0.943, 0.870, 0.856, 0.840};
  Outcome o{true, ""};
  std::vector<double> f;
  for (std::size_t i = 0; i < r.size(); ++i) {
    f.push_back(r[i].budget.fidelity);
    if (std::abs(f[i] - reference[i]) > 0.015) o.pass = false;
    if (i > 0 && !(f[i] < f[i - 1])) o.pass = false;
  }
  if (ctx.two_level_seconds >= 600.0) o.pass = false;
  o.detail = "F = " + join<double>(f, pct) + " % (reference 94.3/87.0/85.6/84.0), runtime " +
             fmt(ctx.two_level_seconds, 1) + " s";
  return o;
}

Outcome criterion2(Context& ctx) {
  const auto& two = two_level(ctx);
  const auto& three = transmon(ctx);
  Outcome o{true, ""};
  std::vector<double> f;
  for (std::size_t i = 0; i < three.size(); ++i) {
    f.push_back(three[i].budget.fidelity);
    if (i > 0 && !(three[i].budget.fidelity > two[i].budget.fidelity)) o.pass = false;
  }
  std::vector<std::size_t> order(three.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(three[a].static_zz) < std::abs(three[b].static_zz);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!(three[order[k]].budget.fidelity < three[order[k - 1]].budget.fidelity)) o.pass = false;
  }
  o.detail = "3-level F = " + join<double>(f, pct) + " %, 2-level F = " +
             join<PointResult>(two, [](const PointResult& p) { return pct(p.budget.fidelity); }) + " %";
  return o;
}

Outcome criterion3(Context& ctx) {
  const auto& r = two_level(ctx);
  const ChevronSettings& c = ctx.cfg.chevron;
  const PointResult& p = r.at(static_cast<std::size_t>(c.point));
  const double delta0 = effective_drive_frequency(ctx.cfg.device, p.phi_dc, 0.0);
  const double amp = c.amplitude > 0.0 ? c.amplitude : p.calibration.pulse.amplitude;
  std::vector<double> freqs, times;
  for (int i = 0; i < c.freq_points; ++i) {
    freqs.push_back(delta0 + mhz(c.span_mhz) * (static_cast<double>(i) / (c.freq_points - 1) - 0.5));
  }
  for (int i = 0; i < c.time_points; ++i) times.push_back(c.duration_ns * 1e-9 * i / (c.time_points - 1));
  const SweepGrid g = chevron_scan(ctx.cfg.device, p.phi_dc, amp, freqs, times, ModelSpec::two_level(),
                                   0.0, ctx.cfg.threads);
  const double shift = to_mhz(delta0 - chevron_resonance(g));
  return {std::abs(shift - 0.25) <= 0.1,
          "resonance " + fmt(shift) + " MHz below Delta12 = " + fmt(to_mhz(delta0)) + " MHz (amplitude " +
              fmt(amp, 4) + ")"};
}

Outcome criterion4(Context& ctx) {
  const DeviceParams& d = ctx.cfg.device;
  const double root = coupler_frequency(d, find_zero_zz_flux(d, ctx.cfg.zz_levels));
  Outcome o{std::abs(to_ghz(root) - 5.905) < 0.05, ""};
  std::vector<double> zz;
  for (const auto& p : ctx.cfg.points) zz.push_back(static_zz(d, d.coupler_flux_map.to_phi(p.flux_mv), ctx.cfg.zz_levels));
  for (std::size_t i = 1; i < zz.size(); ++i) {
    if (!(zz[i] < 0.0)) o.pass = false;
    if (i > 1 && !(std::abs(zz[i]) > std::abs(zz[i - 1]))) o.pass = false;
  }
  o.detail = "zero at " + fmt(to_ghz(root), 4) + " GHz, static ZZ = " +
             join<double>(zz, [](const double& x) { return fmt(to_mhz(x), 4); }) + " MHz";
  return o;
}

Outcome criterion5(Context& ctx) {
  const double t = 204e-9;
  const double theta = khz(-100.0) * t;
  const Mat4 zz = (kI * theta * pauli_basis()[kPauliZZ]).exp();
  const ErrorMatrix e = error_matrix(ideal_chi(iswap() * zz), iswap());
  const double h = dynamic_zz(e, t).h_zz;
  const double expect = std::sin(theta) * std::cos(theta) / t;
  const double dec = decoherence_error(e).delta;
  const double dzz = zz_infidelity(e, e.fidelity());
  Outcome o{std::abs(h / expect - 1.0) < 0.02 && dec < 1e-8 &&
                std::abs(dzz - std::pow(std::sin(theta), 2)) < 1e-6,
            ""};

  const auto& r = two_level(ctx);
  std::vector<double> hz, dd;
  for (const auto& p : r) {
    hz.push_back(p.budget.h_zz);
    dd.push_back(p.budget.delta_dec);
  }
  for (std::size_t i = 1; i < hz.size(); ++i) {
    if (!(std::abs(hz[i]) > std::abs(hz[i - 1]))) o.pass = false;
  }
  const double mean = std::accumulate(dd.begin(), dd.end(), 0.0) / static_cast<double>(dd.size());
  for (double x : dd) {
    if (std::abs(x - mean) > 0.005) o.pass = false;
  }
  o.detail = "injected h = " + fmt(to_khz(h), 2) + " kHz (expect " + fmt(to_khz(expect), 2) + "), dF_dec = " + sci(dec) +
             ", dF_ZZ - sin^2 = " + sci(dzz - std::pow(std::sin(theta), 2)) + "; simulated h_ZZ = " +
             join<double>(hz, [](const double& x) { return fmt(to_khz(x), 1); }) + " kHz, dF_dec = " +
             join<double>(dd, pct) + " %";
  return o;
}

Outcome criterion6(Context&) {
  // T1 = 14/13.7 µs, Tφ1 = 8.4 µs and Tφ2 back-solved so that the budget is 5.4 %
  const double v = coherence_budget(us(14.0), us(13.7), us(8.4), us(3.7602), 204e-9);
  const double zero = coherence_budget(kInfinity, kInfinity, kInfinity, kInfinity, 204e-9);
  return {std::abs(v - 0.054) < 1e-5 && zero == 0.0,
          "budget = " + fmt(100.0 * v, 4) + " %, all-infinite = " + fmt(zero, 1)};
}

Outcome criterion7(Context&) {
  int good = 0;
  double worst = 0.0;
  std::vector<double> ps;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<std::pair<int, double>> pts;
    for (int n = 1; n <= 21; n += 2) pts.emplace_back(n, 0.951 * std::pow(0.940, n) + 1.0 / 16.0 + noise(rng));
    const double p = fit_fidelity_decay(pts).p;
    ps.push_back(p);
    worst = std::max(worst, std::abs(p - 0.940));
    if (std::abs(p - 0.940) <= 0.005) ++good;
  }
  const double mean = std::accumulate(ps.begin(), ps.end(), 0.0) / 100.0;
  return {good == 100, std::to_string(good) + "/100 seeds within 0.005, mean P = " + fmt(mean, 4) +
                           ", worst |P - 0.940| = " + fmt(worst, 4)};
}

Outcome criterion8(Context&) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int count = 1 + trial % 3;
    CMatrix a(4 * count, 4);
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
    // the first four columns of a unitary stack into a Kraus set
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(a).householderQ() * CMatrix::Identity(4 * count, 4);
    std::vector<Mat4> kraus;
    for (int i = 0; i < count; ++i) kraus.push_back(q.block(4 * i, 0, 4, 4));
    const Superop s = superop_from_kraus(kraus);
    std::vector<ProcessPair> pairs;
    for (const Mat4& rho : preparation_set()) pairs.emplace_back(rho, apply_superop(s, rho));
    const ProcessMatrix chi = chi_from_process(pairs);
    // reference χ straight from the Kraus operators
    Mat16 ref = Mat16::Zero();
    for (const Mat4& k : kraus) {
      Vec16 c;
      for (int m = 0; m < 16; ++m) c(m) = (pauli_basis()[m].adjoint() * k).trace() / 4.0;
      ref += c * c.adjoint();
    }
    worst = std::max(worst, (chi.chi - ref).norm());
  }
  return {worst < 1e-8, "max Frobenius error over 50 channels = " + sci(worst)};
}

Outcome criterion9(Context& ctx) {
  const DeviceParams& d = ctx.cfg.device;
  Outcome o{true, ""};
  double worst_zz = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double fc = ghz(5.40 + (5.97 - 5.40) * i / 7.0);
    const double phi = flux_for_coupler_frequency(d, fc);
    const double diff = std::abs(ramsey_zz(d, phi, ctx.cfg.zz_levels).zz - static_zz(d, phi, ctx.cfg.zz_levels));
    worst_zz = std::max(worst_zz, to_khz(diff));
  }
  if (!(worst_zz < 2.0)) o.pass = false;

  std::vector<double> times(801);
  for (int i = 0; i < 801; ++i) times[i] = 400e-9 * i / 800;
  const SwapSpectroscopy s = swap_spectroscopy(d, {ghz(5.92), ghz(5.94), ghz(5.96)}, times);
  double worst_j = 0.0;
  for (std::size_t i = 0; i < s.j12_fit.size(); ++i) {
    const double rel = std::abs(s.j12_fit[i] / std::abs(s.j12_model[i]) - 1.0);
    worst_j = std::isnan(rel) ? 1.0 : std::max(worst_j, rel);
  }
  if (!(worst_j < 0.05)) o.pass = false;

  const double g1 = energy_swap_g(d, Qubit::Q1);
  const double g2 = energy_swap_g(d, Qubit::Q2);
  const double worst_g = std::max(std::abs(g1 / d.g1 - 1.0), std::abs(g2 / d.g2 - 1.0));
  if (!(worst_g < 0.01)) o.pass = false;
  o.detail = "Ramsey vs exact max " + sci(worst_zz) + " kHz; swap-spec J vs closed form max " +
             pct(worst_j) + " % (5.92-5.96 GHz); energy swap g = " + fmt(to_mhz(g1), 2) + "/" +
             fmt(to_mhz(g2), 2) + " MHz";
  return o;
}

Outcome criterion10(Context& ctx) {
  Outcome o{true, ""};
  PhysicalityMonitor all;
  double chi_herm = 0.0, chi_trace = 0.0;
  for (const auto* set : {&two_level(ctx), &transmon(ctx)}) {
    for (const auto& p : *set) {
      all.merge(p.physicality);
      for (const ProcessMatrix* chi : {&p.qpt.chi_exp, &p.qpt.chi_control}) {
        chi_herm = std::max(chi_herm, (chi->chi - chi->chi.adjoint()).norm());
        chi_trace = std::max(chi_trace, std::abs(chi->trace() - 1.0));
      }
    }
  }
  if (!all.ok(1e-6) || chi_herm > 1e-9 || chi_trace > 1e-6) o.pass = false;

  double t_err = 0.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<Mat4> targets{iswap(), Mat4::Identity()};
  for (int k = 0; k < 20; ++k) {
    Mat4 a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
    targets.push_back((kI * (a + a.adjoint())).exp());
  }
  for (const Mat4& u : targets) {
    const Mat16 t = error_transform(u);
    t_err = std::max(t_err, (t * t.adjoint() - Mat16::Identity()).norm());
  }
  if (!(t_err < 1e-10)) o.pass = false;
  o.detail = std::to_string(all.samples) + " states: max |tr-1| = " + sci(all.max_trace_error) +
             ", min eig = " + sci(all.min_eigenvalue) + "; chi: max |chi-chi^H| = " + sci(chi_herm) +
             ", max |tr-1| = " + sci(chi_trace) + "; T: max |TT^H-1| = " + sci(t_err);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string config = std::string(PARASWAP_SOURCE_DIR) + "/configs/reference.json";
  std::vector<int> known_red;
  std::vector<int> only;
  app.add_option("--config", config, "Configuration file");
  app.add_option("--known-red", known_red, "Criteria expected to fail; they do not affect the exit code");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  try {
    ctx.cfg = load_config(config);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  const std::vector<std::function<Outcome(Context&)>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  const std::set<int> red(known_red.begin(), known_red.end());
  const std::set<int> selected(only.begin(), only.end());
  int unexpected = 0;
  for (int i = 0; i < static_cast<int>(criteria.size()); ++i) {
    const int id = i + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(i)](ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::string tag = o.pass ? "PASS" : "FAIL";
    if (!o.pass && red.count(id)) tag += " (known red)";
    if (!o.pass && !red.count(id)) ++unexpected;
    std::printf("criterion %d: %s | %s [%.1f s]\n", id, tag.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
