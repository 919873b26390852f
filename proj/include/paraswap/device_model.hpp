#pragma once

#include <array>
#include <utility>

#include "paraswap/units.hpp"

namespace paraswap {

enum class Qubit { Q1 = 0, Q2 = 1 };

/// One transmon mode. Frequencies are angular (rad/s); `anharmonicity` is the
/// positive magnitude E_c, so E(2) − 2E(1) = −anharmonicity.
struct TransmonParams {
  double freq_max = 0.0;
  double anharmonicity = 0.0;
  double asymmetry = 0.0;

  void validate(const char* name) const;
};

/// Affine instrument-voltage ↔ flux calibration: φ = (mV − offset_mv) / volts_per_phi0.
struct FluxMap {
  double volts_per_phi0 = 1.0;  // mV per Φ₀
  double offset_mv = 0.0;

  double to_phi(double millivolts) const;
  double to_mv(double phi) const;
  void validate() const;
};

struct DeviceParams {
  TransmonParams q1;
  TransmonParams q2;
  TransmonParams coupler;
  FluxMap coupler_flux_map;
  double g1 = 0.0;
  double g2 = 0.0;
  double g12 = 0.0;
  double t1_q1 = kInfinity;
  double t1_q2 = kInfinity;
  double tphi_q1 = kInfinity;
  double tphi_q2 = kInfinity;

  double qubit_frequency(Qubit q) const { return q == Qubit::Q1 ? q1.freq_max : q2.freq_max; }
  double qubit_coupling(Qubit q) const { return q == Qubit::Q1 ? g1 : g2; }

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;
};

/// Coupler frequency of a split transmon:
/// ω_c(φ) = (ω_max + E_c)·(cos²πφ + d²·sin²πφ)^{1/4} − E_c.
double coupler_frequency(const DeviceParams& params, double phi);

/// Positive-branch inverse of `coupler_frequency` (φ ∈ [0, ½)).
double flux_for_coupler_frequency(const DeviceParams& params, double frequency);

/// Δ_i(φ) = ω_i − ω_c(φ).
double detuning(const DeviceParams& params, Qubit q, double phi);

/// True when g_i < |Δ_i(φ)| / 5 for both qubits; logs a warning otherwise.
bool check_dispersive(const DeviceParams& params, double phi);

/// J₁₂ = g₁₂ + g₁g₂/Δ(φ) with Δ the harmonic mean of Δ₁ and Δ₂.
double effective_coupling_j12(const DeviceParams& params, double phi);

inline constexpr double kDefaultFluxStep = 1e-4;

/// Five-point central-difference derivative of J₁₂ with respect to φ (order 1 or 2).
double j12_derivative(const DeviceParams& params, double phi, int order,
                      double step = kDefaultFluxStep);

struct LambShiftedFrequency {
  double value = 0.0;   // ω̃_i
  double d_phi = 0.0;   // ∂ω̃_i/∂φ
  double d2_phi = 0.0;  // ∂²ω̃_i/∂φ²
};

/// ω̃_i = ω_i + g_i²/Δ_i(φ) and its first two flux derivatives.
LambShiftedFrequency lamb_shifted_freq(const DeviceParams& params, Qubit q, double phi,
                                       double step = kDefaultFluxStep);

/// ξ_ZZ = E₁₁ − E₀₁ − E₁₀ + E₀₀ from exact diagonalization of the transmon
/// Hamiltonian with `n_levels` per mode (angular units).
double static_zz(const DeviceParams& params, double phi, int n_levels = 3);

/// Flux interval on the positive branch where the coupler stays at least
/// 5·max(g) above the upper qubit.
std::pair<double, double> dispersive_flux_interval(const DeviceParams& params);

/// Root of J₁₂(φ) on [lo, hi]; throws NoSignChange without a bracket.
double find_off_flux(const DeviceParams& params, double lo, double hi);
double find_off_flux(const DeviceParams& params);

/// Root of ξ_ZZ(φ) on [lo, hi].
double find_zero_zz_flux(const DeviceParams& params, int n_levels, double lo, double hi);
double find_zero_zz_flux(const DeviceParams& params, int n_levels = 3);

}  // namespace paraswap
