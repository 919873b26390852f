#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "paraswap/device_model.hpp"
#include "paraswap/dynamics.hpp"
#include "paraswap/error_analysis.hpp"
#include "paraswap/hamiltonian.hpp"
#include "paraswap/tomography.hpp"

namespace paraswap {

/// Two-qubit iSWAP: |01⟩ ↔ i|10⟩, |00⟩ and |11⟩ fixed.
Mat4 iswap();

/// diag(1, e^{ib}, e^{ia}, e^{i(a+b)}): Z phases a on Q1 and b on Q2.
Mat4 local_z(double a, double b);

/// Superoperator acting on column-major vec(ρ) of a two-qubit state.
using Superop = Mat16;

Superop superop_from_kraus(const std::vector<Mat4>& kraus);
Mat4 apply_superop(const Superop& s, const Mat4& rho);

/// Eigenvectors of the static Hamiltonian at φ, column b labelled with bare
/// state b and phased so that its overlap with that bare state is real and
/// positive.
CMatrix dressed_basis(const DeviceParams& params, double phi, const ModelSpec& spec);

/// Population of eigenstates of h.matrix(t) whose label has the coupler excited.
double coupler_leakage(const TimeDependentHamiltonian& h, double t, const CVector& psi);

/// Simulates one flux pulse on the full three-mode system and reduces the
/// result to the computational two-qubit space. Inputs and outputs live in
/// the dressed basis of the idle point: the coupler label is traced out,
/// qubit labels above |1⟩ are discarded, the rotating frame of the
/// Lamb-shifted qubit frequencies is removed, and virtual Z phases applied.
class GateSimulator {
 public:
  GateSimulator(const DeviceParams& params, const FluxPulse& pulse, const ModelSpec& spec,
                const NoiseModel& noise, EvolveOptions options = {});

  /// Noiseless computational-space block per final coupler level (Kraus set).
  const std::vector<Mat4>& coherent_kraus() const { return kraus_; }
  /// Coupler-ground computational block of the noiseless propagator, frame removed.
  Mat4 coherent_block() const { return kraus_.front(); }
  /// P(|10⟩ → |01⟩) at the end of the pulse, noiseless.
  double transfer() const;
  /// Largest coupler_leakage over the noiseless computational trajectories.
  double max_coupler_population() const { return max_coupler_population_; }

  void set_virtual_z(double a, double b) { virtual_z_ = {a, b}; }
  std::pair<double, double> virtual_z() const { return virtual_z_; }

  /// Channel including noise and virtual Z (computed lazily and cached).
  const Superop& channel() const;
  Mat4 apply(const Mat4& rho) const { return apply_superop(channel(), rho); }
  GateExecutor executor() const;

 private:
  Mat4 frame_correction() const;
  Superop compute_channel() const;

  DeviceParams params_;
  FluxPulse pulse_;
  ModelSpec spec_;
  NoiseModel noise_;
  EvolveOptions options_;
  CMatrix dressed_;
  std::vector<Mat4> kraus_;
  double max_coupler_population_ = 0.0;
  std::pair<double, double> virtual_z_{0.0, 0.0};
  mutable std::optional<Superop> channel_;
};

/// Local Z phases (a, b) maximizing |tr(iSWAP† Z(a,b) U)|.
std::pair<double, double> calibrate_virtual_z(const Mat4& block, const Mat4& target);

struct CalibrationOptions {
  ModelSpec spec = ModelSpec::two_level();
  double ramp = kDefaultRamp;
  double freq_window = units::mhz(2.0);  // half-width of the ω_φ search
  double amp_window = 0.3;               // relative half-width of the Ω search
  int refinement_passes = 1;
  double min_transfer = 0.9;
  EvolveOptions evolve;
};

struct GateCalibration {
  FluxPulse pulse;
  double initial_amplitude = 0.0;    // from the exact first-harmonic exchange rate
  double initial_frequency = 0.0;    // effective_drive_frequency at that amplitude
  double transfer = 0.0;             // P(|10⟩ → |01⟩) at the target time
  double swap_time = 0.0;            // time of maximal transfer on a fine grid
  double max_coupler_population = 0.0;
  double virtual_z_q1 = 0.0;
  double virtual_z_q2 = 0.0;
  double coherent_fidelity = 0.0;    // process fidelity of the noiseless gate
};

/// Frequency-then-amplitude calibration of the parametric iSWAP at φ_dc so
/// the full swap lands at `target_time`, followed by virtual Z calibration.
GateCalibration calibrate_gate(const DeviceParams& params, double phi_dc, double target_time,
                               const CalibrationOptions& options = {});

/// Ω with |resonant_exchange_rate| = π/(2·t_eff), t_eff = duration − ramp.
double amplitude_for_gate_time(const DeviceParams& params, double phi_dc, double duration,
                               double ramp);

struct SweepGrid {
  std::string x_name;
  std::string y_name;
  std::vector<double> x;
  std::vector<double> y;
  RMatrix values;  // |y| × |x|
};

/// P(Q1 excited) after preparing the dressed |10⟩ and driving at each (ω_φ, t).
SweepGrid chevron_scan(const DeviceParams& params, double phi_dc, double amplitude,
                       const std::vector<double>& drive_freqs, const std::vector<double>& times,
                       const ModelSpec& spec = ModelSpec::two_level(), double ramp = 0.0,
                       int threads = 1);

/// Drive frequency where the time-averaged transfer of a chevron peaks.
double chevron_resonance(const SweepGrid& chevron);

struct SwapSpectroscopy {
  SweepGrid grid;                  // P(Q2) vs (coupler frequency, time)
  std::vector<double> j12_fit;     // |J₁₂| from the exchange oscillation (angular)
  std::vector<double> j12_model;   // effective_coupling_j12 at the same flux
  std::vector<double> ripple;      // Hann-windowed amplitude above the exchange band
  std::vector<bool> ripple_flag;
};

/// Static-flux swap between resonant qubits (Q1 brought to Q2's frequency)
/// for each coupler frequency.
SwapSpectroscopy swap_spectroscopy(const DeviceParams& params,
                                   const std::vector<double>& coupler_freqs,
                                   const std::vector<double>& times,
                                   const ModelSpec& spec = ModelSpec::transmon(3),
                                   double ripple_threshold = 0.05, int threads = 1);

struct RamseyOptions {
  double detuning = units::mhz(2.0);  // artificial fringe frequency
  double duration = 5e-6;
  int samples = 501;
};

struct RamseyResult {
  double zz = 0.0;  // angular
  double freq_q2_ground = 0.0;
  double freq_q2_excited = 0.0;
};

/// Two Ramsey experiments on Q1 (Q2 in |0⟩, then |1⟩); the difference of the
/// fitted fringe frequencies is ξ_ZZ.
RamseyResult ramsey_zz(const DeviceParams& params, double phi, int n_levels = 3,
                       const RamseyOptions& options = {});

/// Vacuum-Rabi energy swap between qubit q and the coupler tuned onto the
/// dressed resonance (full swap contrast); returns half the fitted
/// oscillation angular frequency.
double energy_swap_g(const DeviceParams& params, Qubit q,
                     const ModelSpec& spec = ModelSpec::transmon(3));

struct SpectroscopyPoint {
  double flux_mv;
  double phi;
  double frequency;
};

std::vector<SpectroscopyPoint> coupler_spectroscopy(const DeviceParams& params,
                                                    const std::vector<double>& flux_mv);

struct QptSettings {
  QptOptions qpt;
  bool subtract_spam = true;
};

struct GateQpt {
  ProcessMatrix chi_exp;
  ProcessMatrix chi_control;
  ErrorMatrix error_exp;
  ErrorMatrix error_control;
  ErrorMatrix error;  // SPAM-subtracted
  double process_fidelity = 0.0;  // vs ideal iSWAP, before SPAM subtraction
};

/// Experimental and control QPT of a simulated gate, with SPAM subtraction.
GateQpt run_gate_qpt(const GateSimulator& gate, const QptSettings& settings = {});

/// Fidelity of N concatenated gates (composed channel) against iSWAP^N.
/// Coherent errors add up across repetitions, so the decay is exponential
/// only when the per-gate error is incoherent.
std::vector<std::pair<int, double>> repeat_gate_qpt(const GateSimulator& gate,
                                                    const std::vector<int>& n_list,
                                                    const QptSettings& settings = {});

std::vector<std::pair<int, double>> repeat_channel_qpt(const Superop& single,
                                                       const std::vector<int>& n_list,
                                                       const QptSettings& settings = {});

/// Keeps only the diagonal of the error matrix: the Pauli channel with the
/// same fidelity, applied after `target`.
Superop pauli_twirl(const Superop& channel, const Mat4& target);

struct OperatingPoint {
  std::string name;
  double flux_mv = 0.0;
};

struct PointResult {
  OperatingPoint point;
  double phi_dc = 0.0;
  double coupler_freq = 0.0;
  double static_zz = 0.0;
  GateCalibration calibration;
  GateQpt qpt;
  ErrorBudget budget;
  PhysicalityMonitor physicality;
};

struct BudgetOptions {
  CalibrationOptions calibration;
  QptSettings qpt;
  double gate_time = 204e-9;
  int zz_levels = 3;
  double coupler_t1 = kInfinity;
  double coupler_tphi = kInfinity;
  int threads = 1;
};

/// Calibrate, simulate with noise, run QPT and assemble the error budget.
PointResult run_operating_point(const DeviceParams& params, const OperatingPoint& point,
                                const BudgetOptions& options = {});

std::vector<PointResult> run_error_budget(const DeviceParams& params,
                                          const std::vector<OperatingPoint>& points,
                                          const BudgetOptions& options = {});

}  // namespace paraswap
