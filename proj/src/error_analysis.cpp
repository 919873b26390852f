#include "paraswap/error_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "paraswap/errors.hpp"
#include "paraswap/fitting.hpp"
#include "paraswap/log.hpp"

namespace paraswap {

Mat16 error_transform(const Mat4& target) {
  if (!is_unitary(target, 1e-10)) throw InvalidArgument("error_matrix: target is not unitary");
  const auto& e = pauli_basis();
  const Mat4 u_dag = target.adjoint();
  Mat16 t;
  for (int m = 0; m < 16; ++m) {
    for (int n = 0; n < 16; ++n) t(m, n) = (e[m].adjoint() * e[n] * u_dag).trace() / 4.0;
  }
  return t;
}

ErrorMatrix error_matrix(const ProcessMatrix& chi, const Mat4& target, std::string target_label) {
  const Mat16 t = error_transform(target);
  ErrorMatrix out;
  out.chi_err = t * chi.chi * t.adjoint();
  out.target_label = std::move(target_label);
  return out;
}

ErrorMatrix subtract_spam(const ErrorMatrix& experiment, const ErrorMatrix& control) {
  Mat16 spam = control.chi_err;
  spam(kPauliII, kPauliII) -= 1.0;
  ErrorMatrix out;
  out.target_label = experiment.target_label;
  out.chi_err = experiment.chi_err - spam;
  out.chi_err = 0.5 * (out.chi_err + out.chi_err.adjoint()).eval();
  return out;
}

DynamicZZ dynamic_zz(const ErrorMatrix& chi_err, double gate_time) {
  if (!(gate_time > 0.0)) throw InvalidArgument("gate time must be positive");
  DynamicZZ out;
  const double f = chi_err.fidelity();
  out.h_zz = -chi_err.chi_err(kPauliII, kPauliZZ).imag() / gate_time;
  out.reliable = f >= 0.5;
  if (f > 0.0) {
    const double root = std::sqrt(f);
    out.u(kPauliII) = root;
    for (int n = 1; n < 16; ++n) out.u(n) = cplx(0.0, chi_err.chi_err(n, kPauliII).imag() / root);
  }
  return out;
}

double zz_infidelity(const ErrorMatrix& chi_err, double fidelity) {
  if (!(fidelity > 0.0)) throw InvalidArgument("fidelity must be positive");
  const double top = chi_err.chi_err(kPauliII, kPauliZZ).imag();
  const double left = chi_err.chi_err(kPauliZZ, kPauliII).imag();
  if (std::abs(std::abs(top) - std::abs(left)) > 1e-9) {
    log::warn("error matrix is not Hermitian in its II/ZZ elements");
  }
  return top * top / fidelity;
}

DecoherenceError decoherence_error(const ErrorMatrix& chi_err) {
  Eigen::SelfAdjointEigenSolver<Mat16> solver(0.5 * (chi_err.chi_err + chi_err.chi_err.adjoint()),
                                              Eigen::EigenvaluesOnly);
  DecoherenceError out;
  out.spectrum = solver.eigenvalues().reverse();
  out.delta = 1.0 - out.spectrum(0);
  return out;
}

double coherence_budget(double t1_q1, double t1_q2, double tphi_q1, double tphi_q2,
                        double gate_time) {
  if (!(gate_time > 0.0)) throw InvalidArgument("gate time must be positive");
  double rate = 0.0;
  for (double t : {t1_q1, t1_q2, tphi_q1, tphi_q2}) {
    if (!(t > 0.0)) throw InvalidArgument("coherence times must be positive or infinite");
    if (std::isfinite(t)) rate += 1.0 / (2.0 * t);
  }
  return gate_time * rate;
}

OscillationBound oscillation_error_bound(double fidelity, double delta_coh, double delta_zz) {
  OscillationBound out;
  out.value = 1.0 - fidelity - delta_coh - delta_zz;
  out.negative = out.value < 0.0;
  return out;
}

ErrorBudget error_budget(const ErrorMatrix& chi_err, double gate_time, double t1_q1,
                         double t1_q2, double tphi_q1, double tphi_q2) {
  ErrorBudget b;
  b.fidelity = chi_err.fidelity();
  b.delta_dec = decoherence_error(chi_err).delta;
  const DynamicZZ zz = dynamic_zz(chi_err, gate_time);
  b.h_zz = zz.h_zz;
  b.zz_unreliable = !zz.reliable;
  b.delta_zz = b.fidelity > 0.0 ? zz_infidelity(chi_err, b.fidelity) : 0.0;
  b.delta_coh_limit = coherence_budget(t1_q1, t1_q2, tphi_q1, tphi_q2, gate_time);
  const auto osc = oscillation_error_bound(b.fidelity, b.delta_coh_limit, b.delta_zz);
  b.delta_osc = osc.value;
  b.osc_negative = osc.negative;
  return b;
}

DecayFit fit_fidelity_decay(const std::vector<std::pair<int, double>>& points) {
  if (points.size() < 3) throw InvalidArgument("decay fit needs at least 3 points");
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> x, y;
  for (const auto& [n, f] : sorted) {
    if (n < 1) throw InvalidArgument("repetition counts must be >= 1");
    x.push_back(n);
    y.push_back(f);
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi))) {
    throw FitError("degenerate decay data: all fidelities equal");
  }
  const double floor = 1.0 / 16.0;
  const double f_min_n = y.front();
  const double f_max_n = y.back();
  const double a0 = f_min_n - floor;
  double p0 = 0.9;
  if (x.back() > x.front() && f_min_n > 0.0 && f_max_n > 0.0) {
    p0 = std::pow(f_max_n / f_min_n, 1.0 / (x.back() - x.front()));
  }
  p0 = std::clamp(p0, 1e-3, 1.0);

  ModelFunction model = [floor](const RVector& p, double n) { return p(0) * std::pow(p(1), n) + floor; };
  RVector init(2);
  init << a0, p0;
  const FitResult r = curve_fit(model, x, y, init);
  DecayFit out;
  out.a = r.params(0);
  out.p = r.params(1);
  out.a_err = r.std_errors(0);
  out.p_err = r.std_errors(1);
  out.rss = r.rss;
  return out;
}

}  // namespace paraswap
