#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "paraswap/device_model.hpp"
#include "paraswap/hamiltonian.hpp"
#include "paraswap/linalg.hpp"

namespace paraswap {

/// Density matrix over a tensor-product space.
struct QuantumState {
  std::vector<int> dims;
  CMatrix rho;

  static QuantumState from_density(CMatrix rho, std::vector<int> dims);
  static QuantumState pure(const CVector& psi, std::vector<int> dims);
  /// Product basis state with the given per-mode occupation numbers.
  static QuantumState basis(const std::vector<int>& occupation, std::vector<int> dims);

  int dimension() const { return static_cast<int>(rho.rows()); }
  double trace() const { return rho.trace().real(); }
  double purity() const;
  /// Probability that `mode` holds exactly `level` excitations.
  double level_population(int mode, int level) const;
  /// ⟨a†a⟩ of `mode`.
  double mean_occupation(int mode) const;
  /// Throws InvalidArgument when the Hermitian/trace/positivity invariants fail.
  void validate(double tol = 1e-9) const;
};

/// Per-mode T1 and pure-dephasing times (infinite disables the channel).
struct NoiseModel {
  std::vector<double> t1;
  std::vector<double> tphi;

  /// Qubit coherence from the device; the coupler is noiseless unless given.
  static NoiseModel from_device(const DeviceParams& params, double coupler_t1 = kInfinity,
                                double coupler_tphi = kInfinity);
  static NoiseModel none(int modes = 3);

  bool empty() const;
  void validate() const;
};

/// √(1/T1)·a and √(1/(2Tφ))·(2a†a) for every finite time, embedded in `dims`.
/// On an isolated two-level mode this gives 1/T2 = 1/(2T1) + 1/Tφ.
std::vector<CMatrix> collapse_operators(const NoiseModel& noise, const std::vector<int>& dims);

/// Running record of state sanity across every sampled time point.
struct PhysicalityMonitor {
  double max_trace_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double max_purity_error = 0.0;  // unitary path only
  long samples = 0;

  void record(const CMatrix& rho, bool unitary);
  void merge(const PhysicalityMonitor& other);
  bool ok(double tol = 1e-6) const {
    return max_trace_error < tol && min_eigenvalue > -tol;
  }
};

struct EvolveOptions {
  double dt_max = 0.0;  // 0: 2π/(50·ω_φ) for driven Hamiltonians, unbounded otherwise
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  double trace_tol = 1e-6;
  long max_steps = 2'000'000;
  PhysicalityMonitor* monitor = nullptr;
};

/// Lindblad propagator for one Hamiltonian and noise model. Integration runs in
/// the interaction picture of the harmonic frame of `h` with an adaptive
/// Dormand–Prince 5(4) stepper; results are returned in the lab frame.
class Propagator {
 public:
  Propagator(TimeDependentHamiltonian h, const NoiseModel& noise, EvolveOptions options = {});
  Propagator(TimeDependentHamiltonian h, std::vector<CMatrix> collapse_ops,
             EvolveOptions options = {});

  const TimeDependentHamiltonian& hamiltonian() const { return h_; }
  bool has_noise() const { return !jumps_.empty() || has_rates_; }

  /// Density matrix at time `duration` starting from `rho0` at t = 0.
  CMatrix evolve_density(const CMatrix& rho0, double duration) const;
  /// Density matrices at each of the increasing `times` (t = 0 is the start).
  std::vector<CMatrix> sample_density(const CMatrix& rho0, const std::vector<double>& times) const;

  /// Schrödinger evolution of the columns of `psi0` (no noise allowed).
  CMatrix evolve_states(const CMatrix& psi0, double duration) const;
  std::vector<CMatrix> sample_states(const CMatrix& psi0, const std::vector<double>& times) const;

  double effective_dt_max(double duration) const;

 private:
  struct JumpEntry {
    int to;
    int from;
    cplx amp;
  };
  struct Jump {
    std::vector<JumpEntry> entries;
  };
  struct Sparse {
    int row;
    int col;
    cplx value;
  };

  void setup(std::vector<CMatrix> collapse_ops);
  void lindblad_rhs(const std::vector<double>& x, std::vector<double>& dxdt, double t) const;
  void schrodinger_rhs(const std::vector<double>& x, std::vector<double>& dxdt, double t,
                       int columns) const;
  std::vector<cplx> coupling_phases(double t) const;
  CMatrix to_lab(const CMatrix& rho_int, double t) const;
  CMatrix states_to_lab(const CMatrix& psi_int, double t) const;

  TimeDependentHamiltonian h_;
  EvolveOptions options_;
  std::vector<double> coupling_freqs_;
  std::vector<int> coupling_freq_index_;  // per coupling, into coupling_freqs_
  std::vector<Jump> jumps_;
  std::vector<Sparse> anticommutator_offdiag_;  // −½ Σ c†c off-diagonal entries
  RMatrix rates_;                               // elementwise dissipative rates
  bool has_rates_ = false;
};

/// Exact propagation under a constant Hermitian Hamiltonian through its
/// eigendecomposition: ψ(t) = V·exp(−iEt)·V†·ψ(0).
class StaticPropagator {
 public:
  explicit StaticPropagator(const CMatrix& h);

  const RVector& energies() const { return energies_; }
  const CMatrix& eigenvectors() const { return vectors_; }
  CMatrix evolve_states(const CMatrix& psi0, double t) const;

 private:
  RVector energies_;
  CMatrix vectors_;
};

/// Evolve `state` under `h` for `duration`. Uses the Schrödinger path when the
/// noise model is empty and the state is pure.
QuantumState evolve(const TimeDependentHamiltonian& h, const QuantumState& state, double duration,
                    const NoiseModel& noise, const EvolveOptions& options = {});

struct PopulationTrace {
  std::vector<double> times;
  std::vector<double> pop_q1;
  std::vector<double> pop_q2;
  std::vector<double> pop_coupler;
  double max_coupler_population = 0.0;
};

/// Excited-state population 1 − P(n = 0) of each mode on a uniform grid of
/// `n_times` points spanning the pulse.
PopulationTrace simulate_population(const DeviceParams& params, const FluxPulse& pulse,
                                    const QuantumState& initial, const NoiseModel& noise,
                                    const ModelSpec& spec, int n_times,
                                    const EvolveOptions& options = {});

}  // namespace paraswap
