#pragma once

#include <string>
#include <utility>
#include <vector>

#include "paraswap/linalg.hpp"
#include "paraswap/tomography.hpp"

namespace paraswap {

/// χ with the target unitary factored out (error applied after the gate):
/// ρ_out = Σ χ^err_mn E_m (U ρ U†) E_n†.
struct ErrorMatrix {
  Mat16 chi_err = Mat16::Zero();
  std::string target_label;

  double fidelity() const { return chi_err(kPauliII, kPauliII).real(); }
};

/// T_mn = tr(E_m† E_n U†)/4, unitary for unitary U.
Mat16 error_transform(const Mat4& target);

ErrorMatrix error_matrix(const ProcessMatrix& chi, const Mat4& target,
                         std::string target_label = "");

/// χ^err,exp − (χ^err,control − χ^I), re-symmetrized.
ErrorMatrix subtract_spam(const ErrorMatrix& experiment, const ErrorMatrix& control);

struct DynamicZZ {
  double h_zz = 0.0;  // angular rad/s
  /// Unitary-error coefficients: u_0 = √F, u_n = i·Im(χ^err_n0)/√F for n ≠ 0.
  Vec16 u = Vec16::Zero();
  bool reliable = true;  // false when F < 0.5
};

/// h_ZZ = −Im(χ^err_II,ZZ)/t.
DynamicZZ dynamic_zz(const ErrorMatrix& chi_err, double gate_time);

/// (Im χ^err_II,ZZ)²/F, read from the top row.
double zz_infidelity(const ErrorMatrix& chi_err, double fidelity);

struct DecoherenceError {
  double delta = 0.0;  // 1 − λ₀
  Eigen::Matrix<double, 16, 1> spectrum;  // descending
};

DecoherenceError decoherence_error(const ErrorMatrix& chi_err);

/// t·(1/(2T1,1) + 1/(2T1,2) + 1/(2Tφ,1) + 1/(2Tφ,2)); infinite times contribute 0.
double coherence_budget(double t1_q1, double t1_q2, double tphi_q1, double tphi_q2,
                        double gate_time);

struct OscillationBound {
  double value = 0.0;
  bool negative = false;
};

/// 1 − F − ΔF_coh − ΔF_ZZ; negative values are reported, not clamped.
OscillationBound oscillation_error_bound(double fidelity, double delta_coh, double delta_zz);

struct ErrorBudget {
  double fidelity = 0.0;
  double delta_dec = 0.0;
  double delta_zz = 0.0;
  double delta_coh_limit = 0.0;
  double delta_osc = 0.0;
  double h_zz = 0.0;
  bool osc_negative = false;
  bool zz_unreliable = false;
};

/// Assembles the budget from a (SPAM-free) error matrix and the coherence
/// times used for the linear-order limit.
ErrorBudget error_budget(const ErrorMatrix& chi_err, double gate_time, double t1_q1,
                         double t1_q2, double tphi_q1, double tphi_q2);

struct DecayFit {
  double a = 0.0;
  double p = 0.0;
  double a_err = 0.0;
  double p_err = 0.0;
  double rss = 0.0;
};

/// F = A·P^N + 1/16 by Levenberg–Marquardt.
DecayFit fit_fidelity_decay(const std::vector<std::pair<int, double>>& points);

}  // namespace paraswap
