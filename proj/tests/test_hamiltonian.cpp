#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/hamiltonian.hpp"

using namespace paraswap;
using namespace paraswap::units;
using paraswap::test::device;
using paraswap::test::point_phi;

namespace {

RVector spectrum(const CMatrix& h) { return Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues(); }

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("static builders are Hermitian with the documented dimensions") {
  for (double phi : {0.0, point_phi(0), point_phi(3)}) {
    const HamiltonianModel two = build_static_two_level(device(), phi);
    CHECK(two.dimension() == 8);
    CHECK(is_hermitian(two.static_part));
    for (int n : {2, 3, 4}) {
      const HamiltonianModel tr = build_static_transmon(device(), phi, n);
      CHECK(tr.dimension() == n * n * n);
      CHECK(is_hermitian(tr.static_part));
    }
  }
  CHECK_THROWS_AS(build_static_transmon(device(), 0.0, 1), InvalidArgument);
}

TEST_CASE("uncoupled two-level model is diagonal") {
  DeviceParams p = device();
  p.g1 = p.g2 = p.g12 = 0.0;
  const CMatrix h = build_static_two_level(p, 0.1).static_part;
  CHECK((h - CMatrix(h.diagonal().asDiagonal())).norm() == 0.0);
  const double wc = coupler_frequency(p, 0.1);
  // |111⟩ with ground-referenced energies
  CHECK(h(7, 7).real() == doctest::Approx(p.q1.freq_max + p.q2.freq_max + wc));
}

TEST_CASE("two-level truncation of the transmon model matches the Pauli model") {
  for (double phi : {0.0, point_phi(1)}) {
    const RVector a = spectrum(build_static_two_level(device(), phi).static_part);
    const RVector b = spectrum(build_static_transmon(device(), phi, 2).static_part);
    for (int i = 0; i < 8; ++i) CHECK(b(i) == doctest::Approx(a(i)).epsilon(1e-10));
  }
}

TEST_CASE("full spectrum against an independent dense build") {
  const DeviceParams& p = device();
  const double phi = point_phi(2);
  const double wc = coupler_frequency(p, phi);
  // σ⁺σ⁻ exchange built directly from 2×2 blocks
  Mat2 sp;
  sp << 0, 0, 1, 0;  // |1⟩⟨0|
  const CMatrix id = CMatrix::Identity(2, 2);
  auto op = [&](int mode) {
    std::vector<CMatrix> f{id, id, id};
    f[mode] = sp;
    return kron(f);
  };
  const CMatrix s1 = op(0), s2 = op(1), sc = op(2);
  CMatrix h = p.q1.freq_max * s1 * s1.adjoint() + p.q2.freq_max * s2 * s2.adjoint() +
              wc * sc * sc.adjoint();
  h += p.g1 * (s1 * sc.adjoint() + sc * s1.adjoint()) + p.g2 * (s2 * sc.adjoint() + sc * s2.adjoint()) +
       p.g12 * (s1 * s2.adjoint() + s2 * s1.adjoint());
  const RVector a = spectrum(h);
  const RVector b = spectrum(build_static_two_level(p, phi).static_part);
  for (int i = 0; i < 8; ++i) CHECK(b(i) == doctest::Approx(a(i)).epsilon(1e-10));
}

TEST_CASE("qubit-coupler resonance splits by 2 g2") {
  DeviceParams p = device();
  p.g1 = p.g12 = 0.0;
  const double phi = flux_for_coupler_frequency(p, p.q2.freq_max);
  const RVector e = spectrum(build_static_two_level(p, phi).static_part);
  // single-excitation levels: the bare Q1 level plus the Q2–coupler doublet
  std::vector<double> pair;
  for (int i = 1; i <= 3; ++i)
    if (std::abs(e(i) - p.q1.freq_max) > mhz(1.0)) pair.push_back(e(i));
  REQUIRE(pair.size() == 2);
  CHECK(to_mhz(std::abs(pair[1] - pair[0]) / 2.0) == doctest::Approx(76.9).epsilon(1e-9));
}

TEST_CASE("coupler anharmonicity of the isolated mode") {
  DeviceParams p = device();
  p.g1 = p.g2 = p.g12 = 0.0;
  const HamiltonianModel h = build_static_transmon(p, 0.0, 3);
  const int i1 = basis_index({0, 0, 1}, h.dims);
  const int i2 = basis_index({0, 0, 2}, h.dims);
  const double e1 = h.static_part(i1, i1).real();
  const double e2 = h.static_part(i2, i2).real();
  CHECK(to_mhz(e2 - 2 * e1) == doctest::Approx(-254.0).epsilon(1e-12));
  CHECK(h.static_part(0, 0).real() == 0.0);
}

TEST_CASE("time-dependent Hamiltonian") {
  const double phi = point_phi(0);
  FluxPulse pulse{phi, mhz(34.2), 0.0, 0.0, 204e-9, 0.0};
  SUBCASE("zero amplitude is constant") {
    const TimeDependentHamiltonian h = build_time_dependent(device(), pulse, ModelSpec::transmon(3));
    const CMatrix s = build_static_transmon(device(), phi, 3).static_part;
    for (double t : {0.0, 37e-9, 150e-9}) CHECK((h.matrix(t) - s).norm() < 1e-12 * s.norm());
  }
  SUBCASE("cosine peak at t = 0") {
    pulse.amplitude = 0.1;
    for (const ModelSpec spec : {ModelSpec::two_level(), ModelSpec::transmon(3)}) {
      const TimeDependentHamiltonian h = build_time_dependent(device(), pulse, spec);
      const CMatrix s = build_static(device(), phi + 0.1, spec).static_part;
      const CMatrix m = h.matrix(0.0);
      CHECK(is_hermitian(m));
      CHECK((m - s).norm() < 1e-12 * s.norm());
      CHECK(is_hermitian(h.matrix(13.7e-9)));
    }
  }
  SUBCASE("envelope multiplies only the AC part") {
    pulse.amplitude = 0.1;
    pulse.ramp = 10e-9;
    CHECK(pulse.flux(0.0) == doctest::Approx(phi));
    CHECK(pulse.flux(pulse.duration) == doctest::Approx(phi));
    CHECK(pulse.envelope(100e-9) == 1.0);
  }
  SUBCASE("excursion off the branch") {
    pulse.amplitude = 0.49;
    CHECK_THROWS_AS(build_time_dependent(device(), pulse, ModelSpec::two_level()), DomainError);
  }
}

TEST_CASE("modulation lowers the mean coupler frequency") {
  const double phi = point_phi(0);
  const double omega = 0.1;
  double mean = 0.0;
  const int n = 4096;
  for (int k = 0; k < n; ++k) mean += coupler_frequency(device(), phi + omega * std::cos(kTwoPi * k / n));
  mean /= n;
  CHECK(mean < coupler_frequency(device(), phi));
}

TEST_CASE("expansion coefficients") {
  for (int i = 0; i < 4; ++i) {
    const double phi = point_phi(i);
    const ExpansionCoefficients c = expansion_coefficients(device(), phi, 0.02);
    CHECK(c.second_order_dc == 2.0 * c.second_order_osc);
    CHECK(c.first_order == 0.01 * j12_derivative(device(), phi, 1));
    const ExpansionCoefficients z = expansion_coefficients(device(), phi, 0.0);
    CHECK(z.first_order == 0.0);
    CHECK(z.second_order_dc == 0.0);
    CHECK(z.second_order_osc == 0.0);
    CHECK(z.j12 == c.j12);
  }
}

TEST_CASE("Table I second-order columns at the inferred amplitude") {
  // Ω per row inferred from the first-order column, then the second-order
  // coefficient follows from the curvature of J12.
  struct Row {
    double mv, second_dc, first;
  };
  const Row rows[] = {{-103.76, 0.230, 0.982}, {-106.81, 0.221, 0.988}, {-109.86, 0.209, 0.989}};
  for (const Row& r : rows) {
    const double phi = device().coupler_flux_map.to_phi(r.mv);
    const double omega = 2.0 * mhz(r.first) / std::abs(j12_derivative(device(), phi, 1));
    const ExpansionCoefficients c = expansion_coefficients(device(), phi, omega);
    CHECK(to_mhz(std::abs(c.second_order_dc)) == doctest::Approx(r.second_dc).epsilon(0.15));
  }
}

TEST_CASE("effective drive frequency") {
  const double phi = point_phi(0);
  const double d0 = effective_drive_frequency(device(), phi, 0.0);
  const double bare = lamb_shifted_freq(device(), Qubit::Q1, phi).value -
                      lamb_shifted_freq(device(), Qubit::Q2, phi).value;
  CHECK(d0 == doctest::Approx(bare).epsilon(1e-14));
  CHECK(to_mhz(d0) == doctest::Approx(34.2).epsilon(1e-3));
  const double s1 = effective_drive_frequency(device(), phi, 0.02) - d0;
  const double s2 = effective_drive_frequency(device(), phi, 0.04) - d0;
  CHECK(s2 / s1 == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("first harmonic of J12(φ(t)) matches the first-order coefficient") {
  for (int i = 1; i < 4; ++i) {
    const double phi = point_phi(i);
    auto gap = [&](double omega) {
      return std::abs(resonant_exchange_rate(device(), phi, omega)) -
             std::abs(expansion_coefficients(device(), phi, omega).first_order);
    };
    // the residual is third order in Ω
    CHECK(gap(0.01) / gap(0.005) == doctest::Approx(8.0).epsilon(0.02));
    CHECK(std::abs(gap(0.005)) < 0.01 * std::abs(expansion_coefficients(device(), phi, 0.005).first_order));
  }
}

}  // TEST_SUITE
