#include "paraswap/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "paraswap/errors.hpp"
#include "paraswap/log.hpp"
#include "paraswap/parallel.hpp"

namespace paraswap {
namespace {

Mat2 single_pauli(int k) {
  switch (k) {
    case 1:
      return pauli::X();
    case 2:
      return pauli::Y();
    case 3:
      return pauli::Z();
    default:
      return pauli::I();
  }
}

Mat4 kron4(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

// Pre-rotation that maps the eigenbasis of X, Y or Z onto the computational basis.
Mat2 measurement_rotation(int axis) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 h;
  h << s, s, s, -s;
  if (axis == 1) return h;
  if (axis == 2) {
    Mat2 sdg;
    sdg << 1, 0, 0, -kI;
    return h * sdg;
  }
  return Mat2::Identity();
}

Eigen::Matrix<cplx, 16, 1> vec(const Mat4& m) {
  return Eigen::Map<const Eigen::Matrix<cplx, 16, 1>>(m.data());
}

}  // namespace

const std::array<Mat4, 16>& pauli_basis() {
  static const std::array<Mat4, 16> basis = [] {
    std::array<Mat4, 16> b;
    for (int a = 0; a < 4; ++a) {
      for (int c = 0; c < 4; ++c) b[4 * a + c] = kron4(single_pauli(a), single_pauli(c));
    }
    return b;
  }();
  return basis;
}

const std::array<std::string, 16>& pauli_labels() {
  static const std::array<std::string, 16> labels = [] {
    const char names[4] = {'I', 'X', 'Y', 'Z'};
    std::array<std::string, 16> l;
    for (int a = 0; a < 4; ++a) {
      for (int c = 0; c < 4; ++c) l[4 * a + c] = std::string{names[a], names[c]};
    }
    return l;
  }();
  return labels;
}

ProcessMatrix ProcessMatrix::identity() {
  ProcessMatrix p;
  p.chi(kPauliII, kPauliII) = 1.0;
  return p;
}

void ProcessMatrix::validate(double hermitian_tol, double trace_tol) const {
  if ((chi - chi.adjoint()).norm() > hermitian_tol * std::max(1.0, chi.norm())) {
    throw InvalidArgument("process matrix is not Hermitian");
  }
  if (std::abs(trace() - 1.0) > trace_tol) throw InvalidArgument("process matrix trace differs from 1");
}

ConfusionMatrix ConfusionMatrix::from_fidelities(double q1_f0, double q1_f1, double q2_f0,
                                                 double q2_f1) {
  auto single = [](double f0, double f1) {
    Eigen::Matrix2d m;
    m << f0, 1.0 - f1, 1.0 - f0, f1;
    return m;
  };
  const Eigen::Matrix2d a = single(q1_f0, q1_f1);
  const Eigen::Matrix2d b = single(q2_f0, q2_f1);
  ConfusionMatrix c;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) c.m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  c.validate();
  return c;
}

void ConfusionMatrix::validate() const {
  if ((m.array() < 0.0).any() || (m.array() > 1.0).any()) {
    throw InvalidArgument("confusion matrix entries must lie in [0, 1]");
  }
  for (int c = 0; c < 4; ++c) {
    if (std::abs(m.col(c).sum() - 1.0) > 1e-12) {
      throw InvalidArgument("confusion matrix columns must sum to 1");
    }
  }
}

const std::array<Mat4, 16>& preparation_set() {
  static const std::array<Mat4, 16> set = [] {
    const double s = 1.0 / std::sqrt(2.0);
    std::array<Eigen::Vector2cd, 4> kets;
    kets[0] << 1, 0;
    kets[1] << 0, 1;
    kets[2] << s, s;
    kets[3] << s, cplx(0.0, s);
    std::array<Mat4, 16> out;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Eigen::Vector4cd psi;
        psi << kets[i](0) * kets[j](0), kets[i](0) * kets[j](1), kets[i](1) * kets[j](0),
            kets[i](1) * kets[j](1);
        out[4 * i + j] = psi * psi.adjoint();
      }
    }
    return out;
  }();
  return set;
}

ProcessMatrix project_cp(const ProcessMatrix& chi) {
  Eigen::SelfAdjointEigenSolver<Mat16> solver(0.5 * (chi.chi + chi.chi.adjoint()));
  Eigen::Matrix<double, 16, 1> vals = solver.eigenvalues().cwiseMax(0.0);
  const double target = chi.trace();
  const double sum = vals.sum();
  if (sum > 0.0) vals *= target / sum;
  ProcessMatrix out;
  out.chi = solver.eigenvectors() * vals.cast<cplx>().asDiagonal() *
            solver.eigenvectors().adjoint();
  out.cp_projected = true;
  return out;
}

ProcessMatrix chi_from_superop(const Mat16& s) {
  // S = Σ χ_mn conj(E_n) ⊗ E_m, an orthogonal expansion with norm² 16.
  const auto& e = pauli_basis();
  ProcessMatrix result;
  for (int m = 0; m < 16; ++m) {
    for (int n = 0; n < 16; ++n) {
      const CMatrix basis = kron(CMatrix(e[n].conjugate()), CMatrix(e[m]));
      result.chi(m, n) = (basis.adjoint() * s).trace() / 16.0;
    }
  }
  result.chi = 0.5 * (result.chi + result.chi.adjoint()).eval();
  return result;
}

ProcessMatrix chi_from_process(const std::vector<ProcessPair>& pairs, bool cp_project) {
  if (pairs.size() < 16) throw RankDeficient("process tomography needs at least 16 input states");
  const Eigen::Index k = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXcd in(16, k), out(16, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    in.col(i) = vec(pairs[i].first);
    out.col(i) = vec(pairs[i].second);
  }
  // S·in = out; solve inᵀ Sᵀ = outᵀ in the least-squares sense.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(in.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < 16) {
    std::ostringstream os;
    os << "input states span only " << qr.rank() << " of 16 operator dimensions";
    throw RankDeficient(os.str());
  }
  const Mat16 s = qr.solve(out.transpose()).transpose();

  ProcessMatrix result = chi_from_superop(s);
  if (cp_project) return project_cp(result);
  return result;
}

ProcessMatrix ideal_chi(const Mat4& u) {
  if (!is_unitary(u, 1e-10)) throw InvalidArgument("ideal_chi: target is not unitary");
  Vec16 coeffs;
  const auto& e = pauli_basis();
  for (int n = 0; n < 16; ++n) coeffs(n) = (e[n].adjoint() * u).trace() / 4.0;
  ProcessMatrix p;
  p.chi = coeffs * coeffs.adjoint();
  return p;
}

double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b) {
  const double f = (a.chi * b.chi).trace().real();
  const double clamped = std::clamp(f, 0.0, 1.0);
  if (std::abs(clamped - f) > 1e-6) {
    std::ostringstream os;
    os << "process fidelity " << f << " clamped to [0, 1]";
    log::warn(os.str());
  }
  return clamped;
}

ReadoutResult apply_readout_correction(const Eigen::Vector4d& histogram,
                                       const ConfusionMatrix& confusion) {
  if ((histogram.array() < 0.0).any()) throw InvalidArgument("histogram has negative entries");
  const double total = histogram.sum();
  if (!(total > 0.0)) throw InvalidArgument("histogram is empty");
  const Eigen::Vector4d y = histogram / total;
  const Eigen::Matrix4d& m = confusion.m;
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw RankDeficient("confusion matrix is singular");

  ReadoutResult result;
  const Eigen::Vector4d direct = lu.solve(y);
  if ((direct.array() >= -1e-12).all()) {
    result.probabilities = direct.cwiseMax(0.0);
    result.probabilities /= result.probabilities.sum();
    return result;
  }
  // Enumerate active sets: on each support solve the equality-constrained
  // problem through its KKT system and keep the best feasible point.
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector4d best_p = Eigen::Vector4d::Constant(0.25);
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < 4; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    const int s = static_cast<int>(idx.size());
    Eigen::MatrixXd a(4, s);
    for (int j = 0; j < s; ++j) a.col(j) = m.col(idx[j]);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    kkt.topLeftCorner(s, s) = a.transpose() * a;
    kkt.block(0, s, s, 1).setOnes();
    kkt.block(s, 0, 1, s).setOnes();
    Eigen::VectorXd rhs(s + 1);
    rhs.head(s) = a.transpose() * y;
    rhs(s) = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if ((sol.head(s).array() < -1e-14).any()) continue;
    Eigen::Vector4d p = Eigen::Vector4d::Zero();
    for (int j = 0; j < s; ++j) p(idx[j]) = std::max(sol(j), 0.0);
    const double cost = (m * p - y).squaredNorm();
    if (cost < best) {
      best = cost;
      best_p = p;
    }
  }
  result.probabilities = best_p / best_p.sum();
  result.projected = true;
  return result;
}

Eigen::Vector4d measurement_probabilities(const Mat4& rho, int a, int b) {
  const Mat4 r = kron4(measurement_rotation(a), measurement_rotation(b));
  const Mat4 rotated = r * rho * r.adjoint();
  Eigen::Vector4d p = rotated.diagonal().real().cwiseMax(0.0);
  const double sum = p.sum();
  if (sum > 0.0) p /= sum;
  return p;
}

Mat4 state_from_settings(const std::array<Eigen::Vector4d, 9>& probabilities) {
  const auto& e = pauli_basis();
  Mat4 rho = Mat4::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      double expectation = 0.0;
      if (a == 0 && b == 0) {
        expectation = 1.0;
      } else {
        int count = 0;
        for (int sa = 1; sa <= 3; ++sa) {
          if (a != 0 && sa != a) continue;
          for (int sb = 1; sb <= 3; ++sb) {
            if (b != 0 && sb != b) continue;
            const auto& p = probabilities[3 * (sa - 1) + (sb - 1)];
            double v = 0.0;
            for (int s = 0; s < 4; ++s) {
              const int s1 = s >> 1;
              const int s2 = s & 1;
              const double sign = ((a != 0 && s1) ? -1.0 : 1.0) * ((b != 0 && s2) ? -1.0 : 1.0);
              v += sign * p(s);
            }
            expectation += v;
            ++count;
          }
        }
        expectation /= count;
      }
      rho += 0.25 * expectation * e[4 * a + b];
    }
  }
  return rho;
}

QptResult simulate_qpt(const GateExecutor& gate, const QptOptions& options) {
  if (options.shots && *options.shots < 1) throw InvalidArgument("shots must be >= 1");
  if (!(options.prep_depolarizing >= 0.0 && options.prep_depolarizing <= 1.0)) {
    throw InvalidArgument("preparation error must lie in [0, 1]");
  }
  options.confusion.validate();
  const auto& preps = preparation_set();
  const Mat4 mixed = Mat4::Identity() / 4.0;

  std::array<Mat4, 16> outputs;
  parallel_for(16, options.threads, [&](std::size_t i) {
    const Mat4 actual = (1.0 - options.prep_depolarizing) * preps[i] +
                        options.prep_depolarizing * mixed;
    outputs[i] = gate(actual);
  });

  QptResult result;
  std::array<std::array<Eigen::Vector4d, 9>, 16> corrected;
  std::array<std::array<bool, 9>, 16> projected{};
  parallel_for(16 * 9, options.threads, [&](std::size_t cell) {
    const std::size_t i = cell / 9;
    const int setting = static_cast<int>(cell % 9);
    const int a = setting / 3 + 1;
    const int b = setting % 3 + 1;
    Eigen::Vector4d observed = options.confusion.m * measurement_probabilities(outputs[i], a, b);
    if (options.shots) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(cell)};
      std::mt19937_64 rng(seq);
      // Multinomial draw as a chain of conditional binomials.
      std::int64_t remaining = *options.shots;
      double mass = 1.0;
      Eigen::Vector4d counts = Eigen::Vector4d::Zero();
      for (int k = 0; k < 3 && remaining > 0; ++k) {
        const double q = mass > 0.0 ? std::clamp(observed(k) / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<std::int64_t> draw(remaining, q);
        const std::int64_t c = draw(rng);
        counts(k) = static_cast<double>(c);
        remaining -= c;
        mass -= observed(k);
      }
      counts(3) = static_cast<double>(remaining);
      observed = counts;
    }
    const ReadoutResult r = apply_readout_correction(observed, options.confusion);
    corrected[i][setting] = r.probabilities;
    projected[i][setting] = r.projected;
  });

  for (int i = 0; i < 16; ++i) {
    for (int s = 0; s < 9; ++s) result.projected_histograms += projected[i][s] ? 1 : 0;
    result.pairs.emplace_back(preps[i], state_from_settings(corrected[i]));
  }
  const bool cp = options.cp_project.value_or(options.shots.has_value());
  result.chi = chi_from_process(result.pairs, cp);
  return result;
}

}  // namespace paraswap
