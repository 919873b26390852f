#include "paraswap/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "paraswap/errors.hpp"

namespace paraswap {
namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

Eigen::Map<const CMatrix> view(const State& x, int rows, int cols) {
  return Eigen::Map<const CMatrix>(reinterpret_cast<const cplx*>(x.data()), rows, cols);
}

Eigen::Map<CMatrix> view(State& x, int rows, int cols) {
  return Eigen::Map<CMatrix>(reinterpret_cast<cplx*>(x.data()), rows, cols);
}

State pack(const CMatrix& m) {
  State x(2 * static_cast<std::size_t>(m.size()));
  view(x, static_cast<int>(m.rows()), static_cast<int>(m.cols())) = m;
  return x;
}

bool finite_time(double t) { return std::isfinite(t); }

}  // namespace

QuantumState QuantumState::from_density(CMatrix rho, std::vector<int> dims) {
  if (dims.empty()) dims = {static_cast<int>(rho.rows())};
  if (rho.rows() != rho.cols() || product(dims) != rho.rows()) {
    throw InvalidArgument("density matrix shape does not match the mode dimensions");
  }
  return {std::move(dims), std::move(rho)};
}

QuantumState QuantumState::pure(const CVector& psi, std::vector<int> dims) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw InvalidArgument("state vector has zero norm");
  const CVector v = psi / n;
  return from_density(v * v.adjoint(), std::move(dims));
}

QuantumState QuantumState::basis(const std::vector<int>& occupation, std::vector<int> dims) {
  if (occupation.size() != dims.size()) throw InvalidArgument("one occupation per mode required");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (occupation[k] < 0 || occupation[k] >= dims[k]) {
      throw InvalidArgument("occupation exceeds the mode truncation");
    }
  }
  CVector psi = CVector::Zero(product(dims));
  psi(basis_index(occupation, dims)) = 1.0;
  return pure(psi, std::move(dims));
}

double QuantumState::purity() const { return (rho * rho).trace().real(); }

double QuantumState::level_population(int mode, int level) const {
  double p = 0.0;
  for (int j = 0; j < dimension(); ++j) {
    if (basis_digits(j, dims)[mode] == level) p += rho(j, j).real();
  }
  return p;
}

double QuantumState::mean_occupation(int mode) const {
  double n = 0.0;
  for (int j = 0; j < dimension(); ++j) n += basis_digits(j, dims)[mode] * rho(j, j).real();
  return n;
}

void QuantumState::validate(double tol) const {
  if (!is_hermitian(rho, tol)) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(trace() - 1.0) > tol) throw InvalidArgument("density matrix trace differs from 1");
  if (min_eigenvalue_hermitian(rho) < -tol) {
    throw InvalidArgument("density matrix has a negative eigenvalue");
  }
}

NoiseModel NoiseModel::from_device(const DeviceParams& params, double coupler_t1,
                                   double coupler_tphi) {
  return {{params.t1_q1, params.t1_q2, coupler_t1}, {params.tphi_q1, params.tphi_q2, coupler_tphi}};
}

NoiseModel NoiseModel::none(int modes) {
  return {std::vector<double>(modes, kInfinity), std::vector<double>(modes, kInfinity)};
}

bool NoiseModel::empty() const {
  for (double t : t1) {
    if (finite_time(t)) return false;
  }
  for (double t : tphi) {
    if (finite_time(t)) return false;
  }
  return true;
}

void NoiseModel::validate() const {
  for (double t : t1) {
    if (!(t > 0.0)) throw InvalidArgument("T1 must be positive or infinite");
  }
  for (double t : tphi) {
    if (!(t > 0.0)) throw InvalidArgument("Tphi must be positive or infinite");
  }
}

std::vector<CMatrix> collapse_operators(const NoiseModel& noise, const std::vector<int>& dims) {
  noise.validate();
  std::vector<CMatrix> ops;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const CMatrix a = lowering(dims[k]);
    if (k < noise.t1.size() && finite_time(noise.t1[k])) {
      ops.push_back(std::sqrt(1.0 / noise.t1[k]) * embed(a, static_cast<int>(k), dims));
    }
    if (k < noise.tphi.size() && finite_time(noise.tphi[k])) {
      const CMatrix n2 = 2.0 * a.adjoint() * a;
      ops.push_back(std::sqrt(1.0 / (2.0 * noise.tphi[k])) * embed(n2, static_cast<int>(k), dims));
    }
  }
  return ops;
}

void PhysicalityMonitor::record(const CMatrix& rho, bool unitary) {
  ++samples;
  const double tr = rho.trace().real();
  max_trace_error = std::max(max_trace_error, std::abs(tr - 1.0));
  min_eigenvalue = std::min(min_eigenvalue, min_eigenvalue_hermitian(rho));
  if (unitary) {
    max_purity_error = std::max(max_purity_error, std::abs((rho * rho).trace().real() - 1.0));
  }
}

void PhysicalityMonitor::merge(const PhysicalityMonitor& other) {
  max_trace_error = std::max(max_trace_error, other.max_trace_error);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
  max_purity_error = std::max(max_purity_error, other.max_purity_error);
  samples += other.samples;
}

Propagator::Propagator(TimeDependentHamiltonian h, const NoiseModel& noise, EvolveOptions options)
    : h_(std::move(h)), options_(options) {
  setup(collapse_operators(noise, h_.dims()));
}

Propagator::Propagator(TimeDependentHamiltonian h, std::vector<CMatrix> collapse_ops,
                       EvolveOptions options)
    : h_(std::move(h)), options_(options) {
  setup(std::move(collapse_ops));
}

void Propagator::setup(std::vector<CMatrix> collapse_ops) {
  const int d = h_.dimension();
  const RVector& e = h_.frame_energies();
  const double scale = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
  // Couplings share few distinct frame frequencies; phases are computed once per frequency.
  for (const auto& c : h_.couplings()) {
    auto it = std::find(coupling_freqs_.begin(), coupling_freqs_.end(), c.frame_freq);
    if (it == coupling_freqs_.end()) {
      coupling_freqs_.push_back(c.frame_freq);
      it = coupling_freqs_.end() - 1;
    }
    coupling_freq_index_.push_back(static_cast<int>(it - coupling_freqs_.begin()));
  }
  rates_ = RMatrix::Zero(d, d);
  CMatrix k_sum = CMatrix::Zero(d, d);
  for (const CMatrix& c : collapse_ops) {
    if (c.rows() != d || c.cols() != d) throw InvalidArgument("collapse operator has wrong size");
    k_sum += c.adjoint() * c;
    Jump jump;
    bool diagonal = true;
    std::optional<double> phase;
    for (int col = 0; col < d; ++col) {
      for (int row = 0; row < d; ++row) {
        const cplx v = c(row, col);
        if (v == cplx(0.0, 0.0)) continue;
        if (row != col) diagonal = false;
        const double w = e(row) - e(col);
        if (!phase) phase = w;
        if (std::abs(w - *phase) > scale) {
          throw InvalidArgument("collapse operator is not covariant under the integration frame");
        }
        jump.entries.push_back({row, col, v});
      }
    }
    if (jump.entries.empty()) continue;
    if (diagonal) {
      CVector cd = c.diagonal();
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) rates_(j, k) += (cd(j) * std::conj(cd(k))).real();
      }
      has_rates_ = true;
    } else {
      jumps_.push_back(std::move(jump));
    }
  }
  for (int col = 0; col < d; ++col) {
    for (int row = 0; row < d; ++row) {
      const cplx v = k_sum(row, col);
      if (v == cplx(0.0, 0.0)) continue;
      if (row == col) continue;
      if (std::abs(e(row) - e(col)) > scale) {
        throw InvalidArgument("collapse operators mix frame energies");
      }
      anticommutator_offdiag_.push_back({row, col, -0.5 * v});
    }
  }
  const RVector kd = k_sum.diagonal().real();
  if (kd.cwiseAbs().maxCoeff() > 0.0) {
    has_rates_ = true;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) rates_(j, k) -= 0.5 * (kd(j) + kd(k));
    }
  }
}

double Propagator::effective_dt_max(double duration) const {
  if (options_.dt_max > 0.0) return options_.dt_max;
  const double w = std::abs(h_.drive_frequency());
  if (h_.driven() && w > 0.0) return 2.0 * std::numbers::pi / (50.0 * w);
  return std::max(duration, 1e-15);
}

void Propagator::lindblad_rhs(const State& x, State& dxdt, double t) const {
  const int d = h_.dimension();
  auto rho = view(x, d, d);
  auto out = view(dxdt, d, d);
  const double f = h_.drive_offset(t);
  const RVector h = h_.residual_diagonal() + f * h_.drive_diagonal();
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      out(j, k) = cplx(rates_(j, k), -(h(j) - h(k))) * rho(j, k);
    }
  }
  const std::vector<cplx> phases = coupling_phases(t);
  const auto& couplings = h_.couplings();
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto& c = couplings[i];
    const cplx w = c.value * phases[coupling_freq_index_[i]];
    out.row(c.row) += (-kI * w) * rho.row(c.col);
    out.col(c.col) += (kI * w) * rho.col(c.row);
  }
  for (const auto& s : anticommutator_offdiag_) {
    out.row(s.row) += s.value * rho.row(s.col);
    out.col(s.col) += s.value * rho.col(s.row);
  }
  for (const auto& jump : jumps_) {
    for (const auto& p : jump.entries) {
      for (const auto& q : jump.entries) {
        out(p.to, q.to) += p.amp * std::conj(q.amp) * rho(p.from, q.from);
      }
    }
  }
}

void Propagator::schrodinger_rhs(const State& x, State& dxdt, double t, int columns) const {
  const int d = h_.dimension();
  auto psi = view(x, d, columns);
  auto out = view(dxdt, d, columns);
  const double f = h_.drive_offset(t);
  const RVector h = h_.residual_diagonal() + f * h_.drive_diagonal();
  out = (-kI * h).asDiagonal() * psi;
  const std::vector<cplx> phases = coupling_phases(t);
  const auto& couplings = h_.couplings();
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto& c = couplings[i];
    const cplx w = c.value * phases[coupling_freq_index_[i]];
    out.row(c.row) += (-kI * w) * psi.row(c.col);
  }
}

std::vector<cplx> Propagator::coupling_phases(double t) const {
  std::vector<cplx> phases(coupling_freqs_.size());
  for (std::size_t i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, coupling_freqs_[i] * t);
  return phases;
}

CMatrix Propagator::to_lab(const CMatrix& rho_int, double t) const {
  const RVector& e = h_.frame_energies();
  const int d = h_.dimension();
  CVector phase(d);
  for (int j = 0; j < d; ++j) phase(j) = std::polar(1.0, -e(j) * t);
  return phase.asDiagonal() * rho_int * phase.conjugate().asDiagonal();
}

CMatrix Propagator::states_to_lab(const CMatrix& psi_int, double t) const {
  const RVector& e = h_.frame_energies();
  const int d = h_.dimension();
  CVector phase(d);
  for (int j = 0; j < d; ++j) phase(j) = std::polar(1.0, -e(j) * t);
  return phase.asDiagonal() * psi_int;
}

namespace {

template <class System>
void integrate_sampled(System sys, State& x, const std::vector<double>& times, double dt_max,
                       const EvolveOptions& opt,
                       const std::function<void(const State&, double)>& observe) {
  if (times.empty()) return;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] >= times[i - 1])) throw InvalidArgument("sample times must be increasing");
  }
  if (times.front() != 0.0) throw InvalidArgument("sample times must start at t = 0");
  const double span = times.back();
  if (span == 0.0) {
    for (double t : times) observe(x, t);
    return;
  }
  using Stepper = odeint::runge_kutta_dopri5<State>;
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, dt_max, Stepper());
  const double dt0 = std::min(dt_max, span / 100.0);
  try {
    // integrate_times skips duplicate times; emit those by hand.
    std::vector<double> unique_times;
    std::vector<std::size_t> counts;
    for (double t : times) {
      if (!unique_times.empty() && unique_times.back() == t) {
        ++counts.back();
      } else {
        unique_times.push_back(t);
        counts.push_back(1);
      }
    }
    std::size_t idx = 0;
    odeint::integrate_times(
        stepper, sys, x, unique_times.begin(), unique_times.end(), dt0,
        [&](const State& s, double t) {
          for (std::size_t r = 0; r < counts[idx]; ++r) observe(s, t);
          ++idx;
        },
        odeint::max_step_checker(static_cast<int>(std::min<long>(opt.max_steps, 1L << 30))));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw IntegrationError(std::string("ODE integration failed: ") + ex.what());
  }
}

}  // namespace

std::vector<CMatrix> Propagator::sample_density(const CMatrix& rho0,
                                                const std::vector<double>& times) const {
  const int d = h_.dimension();
  if (rho0.rows() != d || rho0.cols() != d) throw InvalidArgument("state dimension mismatch");
  const double tr0 = rho0.trace().real();
  const bool check_trace = std::abs(tr0) > 0.5;
  State x = pack(rho0);
  std::vector<CMatrix> out;
  out.reserve(times.size());
  auto observe = [&](const State& s, double t) {
    CMatrix rho = to_lab(view(s, d, d), t);
    if (check_trace) {
      const double drift = std::abs(rho.trace().real() - tr0);
      if (drift > options_.trace_tol) {
        std::ostringstream os;
        os << "trace drifted by " << drift << " at t=" << t;
        throw IntegrationError(os.str());
      }
      if (options_.monitor) options_.monitor->record(rho, false);
    }
    out.push_back(std::move(rho));
  };
  auto sys = [this](const State& xs, State& dx, double t) { lindblad_rhs(xs, dx, t); };
  integrate_sampled(sys, x, times, effective_dt_max(times.empty() ? 0.0 : times.back()), options_,
                    observe);
  return out;
}

CMatrix Propagator::evolve_density(const CMatrix& rho0, double duration) const {
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
  if (duration == 0.0) return rho0;
  return sample_density(rho0, {0.0, duration}).back();
}

std::vector<CMatrix> Propagator::sample_states(const CMatrix& psi0,
                                               const std::vector<double>& times) const {
  if (has_noise()) throw InvalidArgument("Schrödinger path requires a noiseless propagator");
  const int d = h_.dimension();
  const int m = static_cast<int>(psi0.cols());
  if (psi0.rows() != d) throw InvalidArgument("state dimension mismatch");
  State x = pack(psi0);
  std::vector<CMatrix> out;
  out.reserve(times.size());
  auto observe = [&](const State& s, double t) {
    CMatrix psi = states_to_lab(view(s, d, m), t);
    if (options_.monitor) {
      for (int c = 0; c < m; ++c) {
        const double n = psi.col(c).squaredNorm();
        if (n > 0.5) options_.monitor->record(psi.col(c) * psi.col(c).adjoint() / n, true);
      }
    }
    out.push_back(std::move(psi));
  };
  auto sys = [this, m](const State& xs, State& dx, double t) { schrodinger_rhs(xs, dx, t, m); };
  integrate_sampled(sys, x, times, effective_dt_max(times.empty() ? 0.0 : times.back()), options_,
                    observe);
  return out;
}

CMatrix Propagator::evolve_states(const CMatrix& psi0, double duration) const {
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
  if (duration == 0.0) return psi0;
  return sample_states(psi0, {0.0, duration}).back();
}

StaticPropagator::StaticPropagator(const CMatrix& h) {
  if (!is_hermitian(h)) throw InvalidArgument("static propagator needs a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (h + h.adjoint()));
  energies_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

CMatrix StaticPropagator::evolve_states(const CMatrix& psi0, double t) const {
  CVector phase(energies_.size());
  for (Eigen::Index j = 0; j < energies_.size(); ++j) phase(j) = std::polar(1.0, -energies_(j) * t);
  return vectors_ * (phase.asDiagonal() * (vectors_.adjoint() * psi0));
}

QuantumState evolve(const TimeDependentHamiltonian& h, const QuantumState& state, double duration,
                    const NoiseModel& noise, const EvolveOptions& options) {
  if (state.dims != h.dims()) throw InvalidArgument("state and Hamiltonian dimensions differ");
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be >= 0");
  if (duration == 0.0) return state;
  Propagator prop(h, noise, options);
  if (!prop.has_noise() && std::abs(state.purity() - 1.0) < 1e-12) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (state.rho + state.rho.adjoint()));
    const CVector psi = solver.eigenvectors().col(state.dimension() - 1);
    const CVector out = prop.evolve_states(psi, duration).col(0);
    return QuantumState::pure(out, state.dims);
  }
  return QuantumState::from_density(prop.evolve_density(state.rho, duration), state.dims);
}

PopulationTrace simulate_population(const DeviceParams& params, const FluxPulse& pulse,
                                    const QuantumState& initial, const NoiseModel& noise,
                                    const ModelSpec& spec, int n_times,
                                    const EvolveOptions& options) {
  if (n_times < 2) throw InvalidArgument("simulate_population needs at least 2 time points");
  const TimeDependentHamiltonian h = build_time_dependent(params, pulse, spec);
  if (initial.dims != h.dims()) throw InvalidArgument("initial state dimension mismatch");
  PopulationTrace trace;
  for (int i = 0; i < n_times; ++i) trace.times.push_back(pulse.duration * i / (n_times - 1));
  trace.times.back() = pulse.duration;

  Propagator prop(h, noise, options);
  std::vector<CMatrix> rhos;
  if (!prop.has_noise() && std::abs(initial.purity() - 1.0) < 1e-12) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(initial.rho);
    const CVector psi = solver.eigenvectors().col(initial.dimension() - 1);
    for (const CMatrix& s : prop.sample_states(psi, trace.times)) {
      rhos.push_back(s.col(0) * s.col(0).adjoint());
    }
  } else {
    rhos = prop.sample_density(initial.rho, trace.times);
  }
  for (const CMatrix& rho : rhos) {
    QuantumState s{initial.dims, rho};
    trace.pop_q1.push_back(1.0 - s.level_population(kModeQ1, 0));
    trace.pop_q2.push_back(1.0 - s.level_population(kModeQ2, 0));
    trace.pop_coupler.push_back(1.0 - s.level_population(kModeCoupler, 0));
    trace.max_coupler_population = std::max(trace.max_coupler_population, trace.pop_coupler.back());
  }
  return trace;
}

}  // namespace paraswap
