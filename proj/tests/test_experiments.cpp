#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/experiments.hpp"

using namespace paraswap;
using namespace paraswap::units;
using paraswap::test::device;
using paraswap::test::point_phi;

namespace {

const GateCalibration& calibration(int point) {
  static std::vector<std::optional<GateCalibration>> cache(4);
  if (!cache[point]) cache[point] = calibrate_gate(device(), point_phi(point), 204e-9);
  return *cache[point];
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("iSWAP and local Z") {
  const Mat4 u = iswap();
  CHECK(is_unitary(u));
  CHECK(u(1, 2) == kI);
  CHECK(u(2, 1) == kI);
  const Mat4 z = local_z(0.3, -0.2);
  CHECK(std::abs(z(3, 3) - std::exp(kI * 0.1)) < 1e-15);
  const std::pair<double, double> vz = calibrate_virtual_z(local_z(-0.3, 0.2) * u, u);
  CHECK(std::abs(std::abs((u.adjoint() * local_z(vz.first, vz.second) * local_z(-0.3, 0.2) * u).trace()) - 4.0) < 1e-6);
}

TEST_CASE("calibration lands every point on the gate time") {
  for (int i = 0; i < 4; ++i) {
    const GateCalibration& c = calibration(i);
    CAPTURE(i);
    CHECK(to_ns(c.swap_time) == doctest::Approx(204.0).epsilon(1.0 / 204.0));
    CHECK(c.max_coupler_population < 0.01);
    CHECK(c.transfer > 0.99);
    // the remaining coherent error is mostly the dynamic ZZ phase
    CHECK(c.coherent_fidelity > 0.95);
    if (i > 0) CHECK(c.coherent_fidelity < calibration(i - 1).coherent_fidelity);
  }
  // larger amplitude needed where J12 is flat in flux
  CHECK(calibration(0).pulse.amplitude > 3.0 * calibration(1).pulse.amplitude);
}

TEST_CASE("doubling the gate time halves the amplitude") {
  const GateCalibration slow = calibrate_gate(device(), point_phi(2), 408e-9);
  CHECK(to_ns(slow.swap_time) == doctest::Approx(408.0).epsilon(1.0 / 408.0));
  CHECK(slow.pulse.amplitude / calibration(2).pulse.amplitude == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("first-order swap time at small amplitude") {
  // J_eff = (Ω/2)·∂J12/∂φ predicts the calibrated amplitude where Ω is small
  const GateCalibration& c = calibration(3);
  const double j1 = std::abs(j12_derivative(device(), point_phi(3), 1));
  const double predicted = 2.0 * (kTwoPi / 4.0 / (204e-9 - kDefaultRamp)) / j1;
  CHECK(c.pulse.amplitude == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("calibrated drive frequency sits on the exchange optimum") {
  const GateCalibration& c = calibration(1);
  const double f0 = c.pulse.omega_drive;
  std::vector<double> freqs;
  for (int k = -30; k <= 30; ++k) freqs.push_back(f0 + mhz(0.01 * k));
  const auto times = linspace(0.0, 2.2 * 204e-9, 401);
  const SweepGrid g = chevron_scan(device(), point_phi(1), c.pulse.amplitude, freqs, times,
                                   ModelSpec::two_level(), kDefaultRamp);
  int best = 0;
  double best_val = -1.0;
  for (int ix = 0; ix < static_cast<int>(freqs.size()); ++ix) {
    const double v = 1.0 - g.values.col(ix).minCoeff();
    if (v > best_val) best_val = v, best = ix;
  }
  // within 5% of the exchange linewidth 2 J_eff
  const double linewidth = 2.0 * kTwoPi / 4.0 / (204e-9 - kDefaultRamp);
  CHECK(std::abs(freqs[best] - f0) <= 0.05 * linewidth);
}

TEST_CASE("chevron off resonance stays in Q1") {
  const double phi = point_phi(1);
  const GateCalibration& c = calibration(1);
  const auto times = linspace(0.0, 600e-9, 61);
  const double f = c.pulse.omega_drive;
  // above the exchange frequency; below it the drive subharmonics (ω_φ ≈ Δ/2, Δ/3)
  // still produce partial exchange through the curvature of J12
  const SweepGrid g = chevron_scan(device(), phi, c.pulse.amplitude, {f + mhz(20.0), f + mhz(30.0)}, times);
  CHECK(g.values.minCoeff() > 0.97);
  CHECK(g.values.rows() == 61);
  CHECK(g.values.cols() == 2);
}

TEST_CASE("chevron resonance period follows the exchange rate") {
  const double phi = point_phi(2);
  const double amp = calibration(2).pulse.amplitude;
  const auto times = linspace(0.0, 800e-9, 801);
  const SweepGrid g = chevron_scan(device(), phi, amp, {calibration(2).pulse.omega_drive}, times);
  // first minimum of P(Q1)
  Eigen::Index imin;
  g.values.col(0).head(400).minCoeff(&imin);
  const double rate = std::abs(resonant_exchange_rate(device(), phi, amp));
  CHECK(times[imin] == doctest::Approx(kTwoPi / 4.0 / rate).epsilon(0.05));
}

TEST_CASE("Ramsey ZZ agrees with exact diagonalization") {
  for (int i : {0, 1, 3}) {
    const double phi = point_phi(i);
    const RamseyResult r = ramsey_zz(device(), phi);
    CAPTURE(i);
    CHECK(std::abs(to_khz(r.zz - static_zz(device(), phi))) < 2.0);
  }
  DeviceParams free = device();
  free.g1 = free.g2 = free.g12 = 0.0;
  CHECK(std::abs(to_khz(ramsey_zz(free, 0.1).zz)) < 1.0);
  // at the ZZ-off point the measured value is below the few-kHz resolution
  CHECK(std::abs(to_khz(ramsey_zz(device(), point_phi(0)).zz)) < 5.0);
}

TEST_CASE("energy swap recovers g") {
  CHECK(to_mhz(energy_swap_g(device(), Qubit::Q2)) == doctest::Approx(76.9).epsilon(0.01));
  CHECK(to_mhz(energy_swap_g(device(), Qubit::Q1)) == doctest::Approx(76.9).epsilon(0.01));
  for (double g : {50.0, 100.0}) {
    DeviceParams p = device();
    p.g2 = mhz(g);
    CHECK(to_mhz(energy_swap_g(p, Qubit::Q2)) == doctest::Approx(g).epsilon(0.01));
  }
  // without the direct qubit-qubit path the spectator adds nothing
  DeviceParams p = device();
  p.g12 = 0.0;
  p.g2 = mhz(20.0);
  CHECK(to_mhz(energy_swap_g(p, Qubit::Q2)) == doctest::Approx(20.0).epsilon(2e-3));
  p.g2 = 0.0;
  CHECK_THROWS_AS(energy_swap_g(p, Qubit::Q2), FitError);
}

TEST_CASE("coupler spectroscopy") {
  std::vector<double> mv;
  for (const auto& op : test::reference().points) mv.push_back(op.flux_mv);
  const auto pts = coupler_spectroscopy(device(), mv);
  const double expected[] = {5.905, 5.491, 5.472, 5.452};
  for (int i = 0; i < 4; ++i) CHECK(to_ghz(pts[i].frequency) == doctest::Approx(expected[i]).epsilon(2e-4));
  const FluxMap& m = device().coupler_flux_map;
  CHECK(to_ghz(coupler_spectroscopy(device(), {m.to_mv(0.0)})[0].frequency) == doctest::Approx(5.977));
  std::vector<double> sweep;
  for (double phi = 0.01; phi < 0.5; phi += 0.01) sweep.push_back(m.to_mv(phi));
  const auto curve = coupler_spectroscopy(device(), sweep);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].frequency < curve[i - 1].frequency);
}

TEST_CASE("swap spectroscopy") {
  const auto times = linspace(0.0, 400e-9, 801);
  DeviceParams resonant = device();
  resonant.q1.freq_max = resonant.q2.freq_max;

  SUBCASE("fitted exchange equals the exact splitting") {
    const std::vector<double> fc{ghz(5.3), ghz(5.5), ghz(5.7), ghz(5.95)};
    const SwapSpectroscopy s = swap_spectroscopy(device(), fc, times);
    for (std::size_t i = 0; i < fc.size(); ++i) {
      const HamiltonianModel h = build_static_transmon(resonant, flux_for_coupler_frequency(resonant, fc[i]), 3);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(h.static_part);
      const std::vector<int> lab = label_eigenstates(es.eigenvectors());
      const double split = std::abs(es.eigenvalues()(lab[basis_index({1, 0, 0}, h.dims)]) -
                                    es.eigenvalues()(lab[basis_index({0, 1, 0}, h.dims)]));
      CAPTURE(i);
      CHECK(s.j12_fit[i] == doctest::Approx(split / 2.0).epsilon(5e-3));
    }
  }
  SUBCASE("closed form on the sweet-spot side") {
    const SwapSpectroscopy s = swap_spectroscopy(device(), {ghz(5.92), ghz(5.94), ghz(5.96)}, times);
    for (int i = 0; i < 3; ++i) {
      CAPTURE(i);
      CHECK(s.j12_fit[i] == doctest::Approx(std::abs(s.j12_model[i])).epsilon(0.05));
      CHECK_FALSE(s.ripple_flag[i]);
    }
  }
  SUBCASE("coupling-off ridge") {
    std::vector<double> fc;
    for (double f = 5.74; f < 5.885; f += 0.005) fc.push_back(ghz(f));
    const SwapSpectroscopy s = swap_spectroscopy(device(), fc, times);
    Eigen::Index best;
    s.grid.values.colwise().maxCoeff().minCoeff(&best);
    CHECK(s.grid.values.col(best).maxCoeff() < 0.01);
    const double off = coupler_frequency(resonant, find_off_flux(resonant));
    CHECK(std::abs(to_mhz(fc[best] - off)) < 50.0);
  }
  SUBCASE("ripple grows toward the qubits") {
    const SwapSpectroscopy s = swap_spectroscopy(device(), {ghz(5.12), ghz(5.3), ghz(5.5)}, times);
    CHECK(s.ripple_flag[0]);
    CHECK_FALSE(s.ripple_flag[2]);
    CHECK(s.ripple[0] > s.ripple[1]);
    CHECK(s.ripple[1] > s.ripple[2]);
  }
}

TEST_CASE("gate repetition decay") {
  const std::vector<int> n_list{1, 3, 5, 7, 9, 11};
  for (const auto& [n, f] : repeat_channel_qpt(superop_from_kraus({iswap()}), n_list)) {
    CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
  }
  const GateCalibration& c = calibration(0);
  GateSimulator g(device(), c.pulse, ModelSpec::two_level(), NoiseModel::from_device(device()));
  g.set_virtual_z(c.virtual_z_q1, c.virtual_z_q2);
  const auto points = repeat_gate_qpt(g, n_list);
  const double single = run_gate_qpt(g).process_fidelity;
  CHECK(points.front().second == doctest::Approx(single).epsilon(1e-9));
  for (std::size_t i = 1; i < points.size(); ++i) CHECK(points[i].second < points[i - 1].second);

  // With the coherent part twirled away the errors are independent per gate
  // and the fitted P tracks the single-gate fidelity.
  const Superop twirled = pauli_twirl(g.channel(), iswap());
  const auto tw = repeat_channel_qpt(twirled, n_list);
  CHECK(tw.front().second == doctest::Approx(single).epsilon(1e-9));
  const DecayFit fit = fit_fidelity_decay(tw);
  CHECK(std::abs(fit.p - single) < 0.01);
}

}  // TEST_SUITE
