#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "paraswap/errors.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/tomography.hpp"

using namespace paraswap;

namespace {

std::vector<Mat4> random_kraus(std::mt19937_64& rng, int count) {
  std::normal_distribution<double> n;
  CMatrix a(4 * count, 4);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
  const CMatrix q = Eigen::HouseholderQR<CMatrix>(a).householderQ() * CMatrix::Identity(4 * count, 4);
  std::vector<Mat4> k;
  for (int i = 0; i < count; ++i) k.push_back(q.block(4 * i, 0, 4, 4));
  return k;
}

std::vector<ProcessPair> pairs_for(const GateExecutor& gate) {
  std::vector<ProcessPair> p;
  for (const Mat4& rho : preparation_set()) p.emplace_back(rho, gate(rho));
  return p;
}

Mat4 depolarize(const Mat4&) { return Mat4::Identity() / 4.0; }

}  // namespace

TEST_SUITE("tomography") {

TEST_CASE("Pauli basis order") {
  const auto& l = pauli_labels();
  CHECK(l[kPauliII] == "II");
  CHECK(l[1] == "IX");
  CHECK(l[4] == "XI");
  CHECK(l[kPauliZZ] == "ZZ");
  const auto& e = pauli_basis();
  CHECK((e[kPauliZZ] - kron(CMatrix(pauli::Z()), CMatrix(pauli::Z()))).norm() == 0.0);
}

TEST_CASE("preparation set") {
  const auto& s = preparation_set();
  Mat4 first = Mat4::Zero();
  first(0, 0) = 1.0;
  CHECK((s[0] - first).norm() == 0.0);
  Eigen::Matrix<cplx, 16, 16> gram;
  for (int i = 0; i < 16; ++i) {
    CHECK((s[i] * s[i]).trace().real() == doctest::Approx(1.0));
    for (int j = 0; j < 16; ++j) gram(i, j) = (s[i].adjoint() * s[j]).trace();
  }
  Eigen::FullPivLU<Eigen::Matrix<cplx, 16, 16>> lu(gram);
  CHECK(lu.rank() == 16);
}

TEST_CASE("chi of known channels") {
  SUBCASE("identity") {
    const ProcessMatrix chi = chi_from_process(pairs_for([](const Mat4& r) { return r; }));
    CHECK((chi.chi - ProcessMatrix::identity().chi).norm() < 1e-12);
  }
  SUBCASE("iSWAP") {
    const Mat4 u = iswap();
    const ProcessMatrix chi = chi_from_process(pairs_for([&](const Mat4& r) { return Mat4(u * r * u.adjoint()); }));
    Vec16 v = Vec16::Zero();
    v(0) = 0.5;
    v(5) = kI * 0.5;   // XX
    v(10) = kI * 0.5;  // YY
    v(15) = 0.5;       // ZZ
    CHECK((chi.chi - v * v.adjoint()).norm() < 1e-12);
    CHECK((ideal_chi(u).chi - v * v.adjoint()).norm() < 1e-12);
  }
  SUBCASE("full depolarization") {
    const ProcessMatrix chi = chi_from_process(pairs_for(depolarize));
    CHECK((chi.chi - Mat16::Identity() / 16.0).norm() < 1e-12);
  }
}

TEST_CASE("ideal chi") {
  CHECK((ideal_chi(Mat4::Identity()).chi - ProcessMatrix::identity().chi).norm() < 1e-14);
  const double th = 0.3;
  const Mat4 zz = pauli_basis()[kPauliZZ];
  const Mat4 u = (kI * th * zz).exp();
  const ProcessMatrix chi = ideal_chi(u);
  CHECK(std::abs(chi.chi(0, 0) - std::cos(th) * std::cos(th)) < 1e-12);
  // u_II = cos θ, u_ZZ = i sin θ
  CHECK(std::abs(chi.chi(kPauliZZ, 0) - kI * std::sin(th) * std::cos(th)) < 1e-12);
  Mat4 bad = Mat4::Identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(ideal_chi(bad), InvalidArgument);
}

TEST_CASE("process fidelity") {
  const ProcessMatrix ideal = ideal_chi(iswap());
  CHECK(process_fidelity(ideal, ideal) == doctest::Approx(1.0));
  ProcessMatrix mixed;
  mixed.chi = 0.84 * ideal.chi + 0.16 * Mat16::Identity() / 16.0;
  CHECK(process_fidelity(mixed, ideal) == doctest::Approx(0.85));
  CHECK(process_fidelity(ideal, mixed) == doctest::Approx(process_fidelity(mixed, ideal)));
}

TEST_CASE("round trip over random CPTP channels") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = random_kraus(rng, 1 + trial % 3);
    const Superop s = superop_from_kraus(k);
    const ProcessMatrix chi = chi_from_process(pairs_for([&](const Mat4& r) { return apply_superop(s, r); }));
    const ProcessMatrix direct = chi_from_superop(s);
    CHECK((chi.chi - direct.chi).norm() < 1e-8);
    CHECK(chi.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(min_eigenvalue_hermitian(chi.chi) > -1e-9);
  }
}

TEST_CASE("rank-deficient input is rejected") {
  std::vector<ProcessPair> p;
  for (int i = 0; i < 16; ++i) p.emplace_back(preparation_set()[0], preparation_set()[0]);
  CHECK_THROWS_AS(chi_from_process(p), RankDeficient);
}

TEST_CASE("readout correction") {
  const Eigen::Vector4d p(0.1, 0.2, 0.3, 0.4);
  const ReadoutResult id = apply_readout_correction(p, ConfusionMatrix::identity());
  CHECK((id.probabilities - p).norm() < 1e-14);
  CHECK_FALSE(id.projected);

  const ConfusionMatrix m = ConfusionMatrix::from_fidelities(0.95, 0.95, 0.95, 0.95);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector4d q(u(rng), u(rng), u(rng), u(rng));
    q /= q.sum();
    const ReadoutResult r = apply_readout_correction(m.m * q, m);
    CHECK((r.probabilities - q).norm() < 1e-10);
  }
  // below the image of the simplex
  const ReadoutResult out = apply_readout_correction(Eigen::Vector4d(1.0, 0.0, 0.0, 0.0), m);
  CHECK(out.projected);
  CHECK(out.probabilities.sum() == doctest::Approx(1.0));
  CHECK(out.probabilities.minCoeff() >= 0.0);
}

TEST_CASE("simulated QPT") {
  SUBCASE("identity, exact") {
    const QptResult r = simulate_qpt([](const Mat4& x) { return x; });
    CHECK((r.chi.chi - ProcessMatrix::identity().chi).norm() < 1e-8);
  }
  SUBCASE("ideal iSWAP") {
    const Mat4 u = iswap();
    const QptResult r = simulate_qpt([&](const Mat4& x) { return Mat4(u * x * u.adjoint()); });
    CHECK(process_fidelity(r.chi, ideal_chi(u)) == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("readout errors are corrected and trace is kept") {
    QptOptions o;
    o.confusion = ConfusionMatrix::from_fidelities(0.97, 0.92, 0.96, 0.91);
    const Mat4 u = iswap();
    const QptResult r = simulate_qpt([&](const Mat4& x) { return Mat4(u * x * u.adjoint()); }, o);
    CHECK(process_fidelity(r.chi, ideal_chi(u)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.chi.trace() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("finite shots converge") {
    std::mt19937_64 rng(3);
    const Superop s = superop_from_kraus(random_kraus(rng, 2));
    const GateExecutor g = [&](const Mat4& x) { return apply_superop(s, x); };
    const ProcessMatrix ref = ideal_chi(iswap());
    const double exact = process_fidelity(simulate_qpt(g).chi, ref);
    QptOptions o;
    o.shots = 1'000'000;
    o.seed = 42;
    const QptResult r = simulate_qpt(g, o);
    CHECK(r.chi.cp_projected);
    CHECK(std::abs(process_fidelity(r.chi, ref) - exact) < 0.003);
    // seeded: identical repeat
    CHECK((simulate_qpt(g, o).chi.chi - r.chi.chi).norm() == 0.0);
    o.shots = 0;
    CHECK_THROWS_AS(simulate_qpt(g, o), InvalidArgument);
  }
}

}  // TEST_SUITE
