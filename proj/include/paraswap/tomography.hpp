#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paraswap/linalg.hpp"

namespace paraswap {

// Two-qubit Pauli basis E_n = σ_a ⊗ σ_b with n = 4a + b and a, b ∈ (I, X, Y, Z).
inline constexpr int kPauliII = 0;
inline constexpr int kPauliZZ = 15;

const std::array<Mat4, 16>& pauli_basis();
const std::array<std::string, 16>& pauli_labels();

/// χ over the Pauli basis: ρ_out = Σ χ_mn E_m ρ_in E_n†.
struct ProcessMatrix {
  Mat16 chi = Mat16::Zero();
  bool cp_projected = false;

  double trace() const { return chi.trace().real(); }
  /// Identity process χ^I (only χ_II,II = 1).
  static ProcessMatrix identity();
  void validate(double hermitian_tol = 1e-9, double trace_tol = 1e-6) const;
};

/// M(observed, true) = P(observed | true) over outcomes 00, 01, 10, 11.
struct ConfusionMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  static ConfusionMatrix identity() { return {}; }
  /// Product of independent single-qubit assignment fidelities F(0|0), F(1|1).
  static ConfusionMatrix from_fidelities(double q1_f0, double q1_f1, double q2_f0, double q2_f1);
  void validate() const;
};

/// {|0⟩, |1⟩, |+⟩, |+i⟩}^⊗2; element 4·i₁ + i₂ prepares state i₁ on Q1 and i₂ on Q2.
const std::array<Mat4, 16>& preparation_set();

using ProcessPair = std::pair<Mat4, Mat4>;  // (ρ_in, ρ_out)

/// Linear inversion of ρ_out = Σ χ_mn E_m ρ_in E_n† from ≥ 16 spanning pairs.
/// Throws RankDeficient if the inputs do not span the operator space.
ProcessMatrix chi_from_process(const std::vector<ProcessPair>& pairs, bool cp_project = false);

/// χ from a superoperator S acting on column-major vec(ρ):
/// χ_mn = tr((conj(E_n) ⊗ E_m)† S)/16.
ProcessMatrix chi_from_superop(const Mat16& superop);

/// Clips negative eigenvalues of χ and restores its trace.
ProcessMatrix project_cp(const ProcessMatrix& chi);

/// χ = u u† with u_n = tr(E_n† U)/4.
ProcessMatrix ideal_chi(const Mat4& u);

/// Re tr(χ_a χ_b), clamped to [0, 1] (warns if the clamp exceeds 1e-6).
double process_fidelity(const ProcessMatrix& a, const ProcessMatrix& b);

struct ReadoutResult {
  Eigen::Vector4d probabilities;
  bool projected = false;  // observed vector lay outside the image of the simplex
};

/// Least squares M·p = p_obs subject to p ≥ 0 and Σp = 1.
ReadoutResult apply_readout_correction(const Eigen::Vector4d& histogram,
                                       const ConfusionMatrix& confusion);

/// Maps a two-qubit input density matrix to the output of the gate.
using GateExecutor = std::function<Mat4(const Mat4&)>;

struct QptOptions {
  ConfusionMatrix confusion;
  std::optional<std::int64_t> shots;  // empty: exact expectation values
  std::uint64_t seed = 0;
  double prep_depolarizing = 0.0;  // ρ_in → (1 − p)ρ_in + p·I/4 before the gate
  std::optional<bool> cp_project;  // default: on for finite shots only
  int threads = 1;
};

struct QptResult {
  ProcessMatrix chi;
  std::vector<ProcessPair> pairs;  // nominal inputs with reconstructed outputs
  int projected_histograms = 0;
};

/// Full protocol: 16 preparations, 9 Pauli settings, readout corruption and
/// correction, state tomography, then linear inversion.
QptResult simulate_qpt(const GateExecutor& gate, const QptOptions& options = {});

/// Outcome probabilities (00, 01, 10, 11) of measuring ρ in setting (a, b),
/// a, b ∈ {1: X, 2: Y, 3: Z}.
Eigen::Vector4d measurement_probabilities(const Mat4& rho, int a, int b);

/// Linear-inversion state estimate from the nine settings' probabilities,
/// indexed 3·(a − 1) + (b − 1).
Mat4 state_from_settings(const std::array<Eigen::Vector4d, 9>& probabilities);

}  // namespace paraswap
