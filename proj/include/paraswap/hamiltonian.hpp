#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paraswap/device_model.hpp"
#include "paraswap/linalg.hpp"

namespace paraswap {

enum class ModelKind { TwoLevel, Transmon };

/// Which static Hamiltonian to build: the two-level (Pauli) model or the
/// multi-level transmon model with `n_levels` states per mode.
struct ModelSpec {
  ModelKind kind = ModelKind::Transmon;
  int n_levels = 3;

  static ModelSpec two_level() { return {ModelKind::TwoLevel, 2}; }
  static ModelSpec transmon(int n_levels = 3) { return {ModelKind::Transmon, n_levels}; }

  int levels() const { return kind == ModelKind::TwoLevel ? 2 : n_levels; }
  std::vector<int> dims() const { return {levels(), levels(), levels()}; }
  std::string name() const;
};

// Mode order in every tensor product: Q1 ⊗ Q2 ⊗ coupler.
inline constexpr int kModeQ1 = 0;
inline constexpr int kModeQ2 = 1;
inline constexpr int kModeCoupler = 2;

struct HamiltonianModel {
  ModelSpec spec;
  std::vector<int> dims;
  CMatrix static_part;

  int dimension() const { return static_cast<int>(static_part.rows()); }
};

/// Two-level model: Σ ω_k σ⁺_kσ⁻_k (ground-referenced −½ω σ_z) plus
/// exchange couplings g_i(σ⁺_iσ⁻_c + h.c.) and g₁₂(σ⁺_1σ⁻_2 + h.c.).
HamiltonianModel build_static_two_level(const DeviceParams& params, double phi);

/// Transmon model: Σ ω_k a†a − (E_c/2) a†a†aa plus exchange couplings.
HamiltonianModel build_static_transmon(const DeviceParams& params, double phi, int n_levels);

HamiltonianModel build_static(const DeviceParams& params, double phi, const ModelSpec& spec);

/// Assigns every bare product state to a distinct eigenvector, greedily in
/// decreasing order of overlap (ties go to the lower bare index). Entry b of
/// the result is the eigenvector column labelled with bare state b.
std::vector<int> label_eigenstates(const CMatrix& eigenvectors);

/// Parametric flux drive φ(t) = φ_dc + s(t)·Ω·cos(ω_φ t + ϕ) where s(t) is a
/// flat-top envelope with raised-cosine ramps of length `ramp`.
struct FluxPulse {
  double phi_dc = 0.0;
  double omega_drive = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double duration = 0.0;
  double ramp = 0.0;

  double envelope(double t) const;
  double flux(double t) const;
  void validate() const;
};

inline constexpr double kDefaultRamp = 2e-9;

/// H(t) = diag(E_frame) + diag(residual) + f(t)·diag(drive) + Σ couplings,
/// with a time-independent coupling list. E_frame is harmonic in each mode so
/// that lowering and number operators acquire only a global phase in the
/// interaction picture; the integrator works in that frame.
class TimeDependentHamiltonian {
 public:
  struct Coupling {
    int row;
    int col;
    cplx value;
    double frame_freq;  // E_frame[row] − E_frame[col]
  };

  using DriveFunction = std::function<double(double)>;

  TimeDependentHamiltonian() = default;
  TimeDependentHamiltonian(std::vector<int> dims, const CMatrix& static_part,
                           std::vector<double> mode_frequencies, RVector drive_diagonal,
                           DriveFunction drive_offset, double drive_frequency);

  /// Constant Hamiltonian with no frame (mode frequencies zero).
  static TimeDependentHamiltonian constant(const CMatrix& h, std::vector<int> dims = {});

  const std::vector<int>& dims() const { return dims_; }
  int dimension() const { return static_cast<int>(frame_.size()); }
  const std::vector<double>& mode_frequencies() const { return mode_frequencies_; }
  const RVector& frame_energies() const { return frame_; }
  const RVector& residual_diagonal() const { return residual_; }
  const RVector& drive_diagonal() const { return drive_diag_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  double drive_frequency() const { return drive_frequency_; }
  bool driven() const { return static_cast<bool>(drive_offset_); }

  double drive_offset(double t) const { return drive_offset_ ? drive_offset_(t) : 0.0; }

  /// Dense lab-frame matrix at time t.
  CMatrix matrix(double t) const;

 private:
  std::vector<int> dims_;
  std::vector<double> mode_frequencies_;
  RVector frame_;
  RVector residual_;
  RVector drive_diag_;
  std::vector<Coupling> couplings_;
  DriveFunction drive_offset_;
  double drive_frequency_ = 0.0;
};

/// H(t) = H_static(φ(t)); the coupler frequency follows the exact flux map.
/// Throws DomainError when φ_dc ± Ω leaves the principal branch.
TimeDependentHamiltonian build_time_dependent(const DeviceParams& params, const FluxPulse& pulse,
                                              const ModelSpec& spec);

/// Static Hamiltonian at fixed flux in the same frame representation.
TimeDependentHamiltonian build_static_evaluator(const DeviceParams& params, double phi,
                                                const ModelSpec& spec);

/// Table-I style coefficients of the second-order drive expansion of J₁₂.
struct ExpansionCoefficients {
  double j12 = 0.0;
  double second_order_dc = 0.0;   // Ω²/4 · ∂²J₁₂/∂φ²
  double second_order_osc = 0.0;  // Ω²/8 · ∂²J₁₂/∂φ²
  double first_order = 0.0;       // Ω/2 · ∂J₁₂/∂φ
};

ExpansionCoefficients expansion_coefficients(const DeviceParams& params, double phi_dc,
                                             double amplitude);

/// Δ₁₂,Ω = Δ₁₂ + (Ω²/4)(∂²ω̃₂/∂φ² − ∂²ω̃₁/∂φ²).
double effective_drive_frequency(const DeviceParams& params, double phi_dc, double amplitude);

/// Half the first Fourier cosine coefficient of J₁₂(φ_dc + Ω cos θ) over one
/// drive period: the resonant exchange rate without truncating the expansion.
double resonant_exchange_rate(const DeviceParams& params, double phi_dc, double amplitude);

}  // namespace paraswap
