#include "paraswap/experiments.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "paraswap/errors.hpp"
#include "paraswap/fitting.hpp"
#include "paraswap/log.hpp"
#include "paraswap/parallel.hpp"

namespace paraswap {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix<cplx, 16, 1> vec4(const Mat4& m) {
  return Eigen::Map<const Eigen::Matrix<cplx, 16, 1>>(m.data());
}

// Full-space index of the computational state |q1 q2⟩ with the coupler in `level`.
int full_index(int comp, int level, const std::vector<int>& dims) {
  return basis_index({comp >> 1, comp & 1, level}, dims);
}

// Dressed computational states with the coupler label in its ground state.
CMatrix computational_columns(const CMatrix& dressed, const std::vector<int>& dims) {
  CMatrix out(dressed.rows(), 4);
  for (int c = 0; c < 4; ++c) out.col(c) = dressed.col(full_index(c, 0, dims));
  return out;
}

// Reduced computational-space state: trace out the coupler label, drop qubit labels > 1.
Mat4 reduce(const CMatrix& rho, const CMatrix& dressed, const std::vector<int>& dims) {
  Mat4 out = Mat4::Zero();
  for (int l = 0; l < dims[kModeCoupler]; ++l) {
    CMatrix cols(dressed.rows(), 4);
    for (int c = 0; c < 4; ++c) cols.col(c) = dressed.col(full_index(c, l, dims));
    out += cols.adjoint() * rho * cols;
  }
  return out;
}

double transfer_probability(const CVector& psi, const CMatrix& dressed, const std::vector<int>& dims) {
  // |01⟩ is computational index 1; any coupler label counts.
  double p = 0.0;
  for (int l = 0; l < dims[kModeCoupler]; ++l) p += std::norm(dressed.col(full_index(1, l, dims)).dot(psi));
  return p;
}

Superop superop_from_pairs(const std::array<Mat4, 16>& in, const std::array<Mat4, 16>& out) {
  Superop a, b;
  for (int k = 0; k < 16; ++k) {
    a.col(k) = vec4(in[k]);
    b.col(k) = vec4(out[k]);
  }
  return b * a.inverse();
}

Superop conjugation(const Mat4& u) {
  return kron(CMatrix(u.conjugate()), CMatrix(u));
}

double simulate_transfer(const DeviceParams& params, const FluxPulse& pulse, const ModelSpec& spec,
                         const CMatrix& dressed, const EvolveOptions& options) {
  const TimeDependentHamiltonian h = build_time_dependent(params, pulse, spec);
  const Propagator prop(h, NoiseModel::none(), options);
  const CVector psi0 = dressed.col(full_index(2, 0, h.dims()));
  const CVector out = prop.evolve_states(psi0, pulse.duration).col(0);
  return transfer_probability(out, dressed, h.dims());
}

struct ExchangeFit {
  double peak = 0.0;       // maximum of the fitted oscillation
  double swap_time = 0.0;  // pulse length at the first fitted maximum
};

// Dressed |10⟩ → |01⟩ exchange on a pulse of length `window`, fitted with a
// cosine. The fit smooths the sub-period structure from the drive phase.
ExchangeFit fit_exchange(const DeviceParams& params, const FluxPulse& pulse, double window,
                         const ModelSpec& spec, const CMatrix& dressed, const EvolveOptions& options) {
  FluxPulse longer = pulse;
  longer.duration = window;
  const TimeDependentHamiltonian h = build_time_dependent(params, longer, spec);
  const Propagator prop(h, NoiseModel::none(), options);
  constexpr int kSamples = 401;
  std::vector<double> times(kSamples), t_ns(kSamples), p(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    times[i] = window * i / (kSamples - 1);
    t_ns[i] = units::to_ns(times[i]);
  }
  const auto traj = prop.sample_states(dressed.col(full_index(2, 0, h.dims())), times);
  for (int i = 0; i < kSamples; ++i) p[i] = transfer_probability(traj[i].col(0), dressed, h.dims());
  const FitResult fit = fit_cosine(t_ns, p);
  double amp = fit.params(0), w = fit.params(1), phase = fit.params(2);
  if (w < 0.0) {
    w = -w;
    phase = -phase;
  }
  if (amp < 0.0) phase += kPi;
  const double period = 2.0 * kPi / w;
  // First maximum of cos(w t + phase) after the opening quarter period.
  double t_peak = std::fmod(-phase, 2.0 * kPi) / w;
  while (t_peak < 0.25 * period) t_peak += period;
  // The closing ramp adds half its length to an abruptly stopped pulse.
  return {fit.params(3) + std::abs(amp), units::ns(t_peak) + 0.5 * pulse.ramp};
}

}  // namespace

Mat4 iswap() {
  Mat4 u = Mat4::Zero();
  u(0, 0) = 1.0;
  u(1, 2) = kI;
  u(2, 1) = kI;
  u(3, 3) = 1.0;
  return u;
}

Mat4 local_z(double a, double b) {
  Mat4 z = Mat4::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = std::polar(1.0, b);
  z(2, 2) = std::polar(1.0, a);
  z(3, 3) = std::polar(1.0, a + b);
  return z;
}

CMatrix dressed_basis(const DeviceParams& params, double phi, const ModelSpec& spec) {
  const HamiltonianModel model = build_static(params, phi, spec);
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(model.static_part);
  const CMatrix& v = solver.eigenvectors();
  const std::vector<int> labels = label_eigenstates(v);
  CMatrix out(v.rows(), v.cols());
  for (Eigen::Index b = 0; b < v.cols(); ++b) {
    const CVector col = v.col(labels[b]);
    const cplx overlap = col(b);
    out.col(b) = std::abs(overlap) > 0.0 ? CVector(col * std::polar(1.0, -std::arg(overlap))) : col;
  }
  return out;
}

double coupler_leakage(const TimeDependentHamiltonian& h, double t, const CVector& psi) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix(t));
  const std::vector<int> labels = label_eigenstates(solver.eigenvectors());
  double p = 0.0;
  for (int b = 0; b < h.dimension(); ++b) {
    if (basis_digits(b, h.dims())[kModeCoupler] > 0) {
      p += std::norm(solver.eigenvectors().col(labels[b]).dot(psi));
    }
  }
  return p;
}

Superop superop_from_kraus(const std::vector<Mat4>& kraus) {
  Superop s = Superop::Zero();
  for (const Mat4& k : kraus) s += conjugation(k);
  return s;
}

Mat4 apply_superop(const Superop& s, const Mat4& rho) {
  const Eigen::Matrix<cplx, 16, 1> v = s * vec4(rho);
  return Eigen::Map<const Mat4>(v.data());
}

GateSimulator::GateSimulator(const DeviceParams& params, const FluxPulse& pulse,
                             const ModelSpec& spec, const NoiseModel& noise,
                             EvolveOptions options)
    : params_(params), pulse_(pulse), spec_(spec), noise_(noise), options_(options) {
  const TimeDependentHamiltonian h = build_time_dependent(params_, pulse_, spec_);
  const auto& dims = h.dims();
  dressed_ = dressed_basis(params_, pulse_.phi_dc, spec_);

  constexpr int kSamples = 201;
  std::vector<double> times(kSamples);
  for (int i = 0; i < kSamples; ++i) times[i] = pulse_.duration * i / (kSamples - 1);
  times.back() = pulse_.duration;
  EvolveOptions quiet = options_;
  quiet.monitor = nullptr;
  const Propagator prop(h, NoiseModel::none(), quiet);
  const auto traj = prop.sample_states(computational_columns(dressed_, dims), times);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (int c = 0; c < 4; ++c) {
      max_coupler_population_ =
          std::max(max_coupler_population_, coupler_leakage(h, times[i], traj[i].col(c)));
    }
  }
  const CMatrix& final_states = traj.back();
  const Mat4 frame = frame_correction();
  for (int l = 0; l < dims[kModeCoupler]; ++l) {
    Mat4 k = Mat4::Zero();
    for (int r = 0; r < 4; ++r) {
      const CVector out_state = dressed_.col(full_index(r, l, dims));
      for (int c = 0; c < 4; ++c) k(r, c) = out_state.dot(final_states.col(c));
    }
    kraus_.push_back(frame * k);
  }
}

Mat4 GateSimulator::frame_correction() const {
  const double w1 = lamb_shifted_freq(params_, Qubit::Q1, pulse_.phi_dc).value;
  const double w2 = lamb_shifted_freq(params_, Qubit::Q2, pulse_.phi_dc).value;
  return local_z(w1 * pulse_.duration, w2 * pulse_.duration);
}

double GateSimulator::transfer() const {
  double p = 0.0;
  for (const Mat4& k : kraus_) p += std::norm(k(1, 2));
  return p;
}

Superop GateSimulator::compute_channel() const {
  const Superop vz = conjugation(local_z(virtual_z_.first, virtual_z_.second));
  if (noise_.empty()) return vz * superop_from_kraus(kraus_);

  const TimeDependentHamiltonian h = build_time_dependent(params_, pulse_, spec_);
  const Propagator prop(h, noise_, options_);
  const auto& preps = preparation_set();
  std::array<Mat4, 16> outputs;
  const Mat4 frame = frame_correction();
  const CMatrix comp = computational_columns(dressed_, h.dims());
  for (int k = 0; k < 16; ++k) {
    const CMatrix rho = prop.evolve_density(comp * preps[k] * comp.adjoint(), pulse_.duration);
    outputs[k] = frame * reduce(rho, dressed_, h.dims()) * frame.adjoint();
  }
  return vz * superop_from_pairs(preps, outputs);
}

const Superop& GateSimulator::channel() const {
  if (!channel_) channel_ = compute_channel();
  return *channel_;
}

GateExecutor GateSimulator::executor() const {
  const Superop s = channel();
  return [s](const Mat4& rho) { return apply_superop(s, rho); };
}

std::pair<double, double> calibrate_virtual_z(const Mat4& block, const Mat4& target) {
  const Mat4 m = block * target.adjoint();
  const cplx d0 = m(0, 0), d1 = m(1, 1), d2 = m(2, 2), d3 = m(3, 3);
  auto objective = [&](double a, double b) {
    return std::abs(d0 + std::polar(1.0, b) * d1 + std::polar(1.0, a) * d2 +
                    std::polar(1.0, a + b) * d3);
  };
  double best_a = 0.0, best_b = 0.0, best = -1.0;
  for (int start = 0; start < 8; ++start) {
    double a = 2.0 * kPi * start / 8.0;
    double b = 0.0;
    for (int it = 0; it < 200; ++it) {
      // For fixed a the optimum b aligns the two phasor groups, and vice versa.
      const double nb = std::arg(d0 + std::polar(1.0, a) * d2) -
                        std::arg(d1 + std::polar(1.0, a) * d3);
      const double na = std::arg(d0 + std::polar(1.0, nb) * d1) -
                        std::arg(d2 + std::polar(1.0, nb) * d3);
      const bool done = std::abs(std::remainder(na - a, 2 * kPi)) < 1e-14 &&
                        std::abs(std::remainder(nb - b, 2 * kPi)) < 1e-14;
      a = na;
      b = nb;
      if (done) break;
    }
    const double v = objective(a, b);
    if (v > best + 1e-15) {
      best = v;
      best_a = std::remainder(a, 2 * kPi);
      best_b = std::remainder(b, 2 * kPi);
    }
  }
  return {best_a, best_b};
}

double amplitude_for_gate_time(const DeviceParams& params, double phi_dc, double duration,
                               double ramp) {
  const double t_eff = duration - ramp;
  if (!(t_eff > 0.0)) throw InvalidArgument("gate time must exceed the ramp time");
  const double target = kPi / (2.0 * t_eff);
  const double max_amp = 0.5 - std::abs(phi_dc) - 1e-3;
  auto rate = [&](double amp) {
    try {
      return std::abs(resonant_exchange_rate(params, phi_dc, amp)) - target;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  constexpr int kGrid = 400;
  double prev_amp = 0.0;
  double prev = -target;
  for (int i = 1; i <= kGrid; ++i) {
    const double amp = max_amp * i / kGrid;
    const double v = rate(amp);
    if (std::isnan(v)) break;
    if (v >= 0.0) {
      if (v == 0.0) return amp;
      auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
      std::uintmax_t iters = 100;
      auto [lo, hi] = boost::math::tools::toms748_solve(rate, prev_amp, amp, prev, v, tol, iters);
      return 0.5 * (lo + hi);
    }
    prev_amp = amp;
    prev = v;
  }
  std::ostringstream os;
  os << "no drive amplitude reaches a " << units::to_ns(duration) << " ns swap at phi_dc=" << phi_dc;
  throw CalibrationError(os.str());
}

GateCalibration calibrate_gate(const DeviceParams& params, double phi_dc, double target_time,
                               const CalibrationOptions& options) {
  if (!(target_time > 0.0)) throw InvalidArgument("target time must be positive");
  GateCalibration cal;
  FluxPulse pulse;
  pulse.phi_dc = phi_dc;
  pulse.duration = target_time;
  pulse.ramp = options.ramp;
  pulse.amplitude = amplitude_for_gate_time(params, phi_dc, target_time, options.ramp);
  pulse.omega_drive = effective_drive_frequency(params, phi_dc, pulse.amplitude);
  cal.initial_amplitude = pulse.amplitude;
  cal.initial_frequency = pulse.omega_drive;

  const double max_amp = 0.5 - std::abs(phi_dc) - 1e-4;
  const CMatrix dressed = dressed_basis(params, phi_dc, options.spec);
  auto transfer_at = [&](double amp, double freq) {
    FluxPulse p = pulse;
    p.amplitude = amp;
    p.omega_drive = freq;
    return simulate_transfer(params, p, options.spec, dressed, options.evolve);
  };
  auto check_edge = [](double x, double lo, double hi, const char* what) {
    const double margin = 0.01 * (hi - lo);
    if (x - lo < margin || hi - x < margin) {
      std::ostringstream os;
      os << "calibration optimum for " << what << " sits at the edge of its search window";
      throw CalibrationError(os.str());
    }
  };
  const double window = 2.2 * target_time;
  auto exchange = [&](double amp, double freq) {
    FluxPulse p = pulse;
    p.amplitude = amp;
    p.omega_drive = freq;
    return fit_exchange(params, p, window, options.spec, dressed, options.evolve);
  };
  constexpr int kBits = 30;
  for (int pass = 0; pass <= options.refinement_passes; ++pass) {
    // Drive frequency: maximize the exchange contrast.
    const double f_lo = pulse.omega_drive - options.freq_window;
    const double f_hi = pulse.omega_drive + options.freq_window;
    std::uintmax_t iters = 60;
    const auto fbest = boost::math::tools::brent_find_minima(
        [&](double f) { return -exchange(pulse.amplitude, f).peak; }, f_lo, f_hi, kBits, iters);
    check_edge(fbest.first, f_lo, f_hi, "drive frequency");
    pulse.omega_drive = fbest.first;

    // Amplitude: full-swap time equal to the target.
    const double a_lo = pulse.amplitude * (1.0 - options.amp_window);
    const double a_hi = std::min(pulse.amplitude * (1.0 + options.amp_window), max_amp);
    auto mismatch = [&](double a) {
      return (exchange(a, pulse.omega_drive).swap_time - target_time) / target_time;
    };
    const double m_lo = mismatch(a_lo), m_hi = mismatch(a_hi);
    if (!(m_lo > 0.0 && m_hi < 0.0)) {
      throw CalibrationError("no drive amplitude within the search window gives the target swap time");
    }
    std::uintmax_t root_iters = 60;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        mismatch, a_lo, a_hi, m_lo, m_hi,
        [](double a, double b) { return std::abs(a - b) <= 1e-7 * std::abs(a); }, root_iters);
    pulse.amplitude = 0.5 * (lo + hi);
  }
  cal.swap_time = exchange(pulse.amplitude, pulse.omega_drive).swap_time;
  cal.transfer = transfer_at(pulse.amplitude, pulse.omega_drive);
  if (cal.transfer < options.min_transfer) {
    std::ostringstream os;
    os << "calibrated transfer " << cal.transfer << " below " << options.min_transfer;
    throw CalibrationError(os.str());
  }

  const GateSimulator sim(params, pulse, options.spec, NoiseModel::none(), options.evolve);
  const auto [za, zb] = calibrate_virtual_z(sim.coherent_block(), iswap());
  cal.virtual_z_q1 = za;
  cal.virtual_z_q2 = zb;
  cal.max_coupler_population = sim.max_coupler_population();
  Superop s = conjugation(local_z(za, zb)) * superop_from_kraus(sim.coherent_kraus());
  cal.coherent_fidelity = process_fidelity(chi_from_superop(s), ideal_chi(iswap()));
  cal.pulse = pulse;
  return cal;
}

SweepGrid chevron_scan(const DeviceParams& params, double phi_dc, double amplitude,
                       const std::vector<double>& drive_freqs, const std::vector<double>& times,
                       const ModelSpec& spec, double ramp, int threads) {
  if (drive_freqs.empty() || times.empty()) throw InvalidArgument("chevron ranges must be nonempty");
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw InvalidArgument("chevron times must be nonnegative and increasing");
  }
  SweepGrid grid{"drive_freq", "time", drive_freqs, times,
                 RMatrix::Zero(static_cast<Eigen::Index>(times.size()),
                               static_cast<Eigen::Index>(drive_freqs.size()))};
  const CMatrix dressed = dressed_basis(params, phi_dc, spec);
  std::vector<double> sample_times = times;
  const bool prepend = sample_times.front() != 0.0;
  if (prepend) sample_times.insert(sample_times.begin(), 0.0);
  parallel_for(drive_freqs.size(), threads, [&](std::size_t ix) {
    FluxPulse pulse;
    pulse.phi_dc = phi_dc;
    pulse.amplitude = amplitude;
    pulse.omega_drive = drive_freqs[ix];
    pulse.duration = std::max(times.back(), 1e-12);
    pulse.ramp = std::min(ramp, 0.5 * pulse.duration);
    const TimeDependentHamiltonian h = build_time_dependent(params, pulse, spec);
    const Propagator prop(h, NoiseModel::none());
    const auto traj = prop.sample_states(dressed.col(full_index(2, 0, h.dims())), sample_times);
    for (std::size_t it = 0; it < times.size(); ++it) {
      const RVector weights = (dressed.adjoint() * traj[it + (prepend ? 1 : 0)].col(0)).cwiseAbs2();
      double p = 0.0;
      for (int b = 0; b < h.dimension(); ++b) {
        if (basis_digits(b, h.dims())[kModeQ1] > 0) p += weights(b);
      }
      grid.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(ix)) = p;
    }
  });
  return grid;
}

double chevron_resonance(const SweepGrid& chevron) {
  const Eigen::Index nx = chevron.values.cols();
  if (nx < 3) throw InvalidArgument("chevron needs at least 3 drive frequencies");
  const RVector transfer = (1.0 - chevron.values.array()).colwise().mean().transpose();
  Eigen::Index k = 0;
  transfer.maxCoeff(&k);
  if (k == 0 || k == nx - 1) throw FitError("chevron resonance lies at the edge of the scan");
  return parabolic_vertex(chevron.x[k - 1], transfer(k - 1), chevron.x[k], transfer(k),
                          chevron.x[k + 1], transfer(k + 1));
}

SwapSpectroscopy swap_spectroscopy(const DeviceParams& params,
                                   const std::vector<double>& coupler_freqs,
                                   const std::vector<double>& times, const ModelSpec& spec,
                                   double ripple_threshold, int threads) {
  if (coupler_freqs.empty() || times.size() < 16) {
    throw InvalidArgument("swap spectroscopy needs coupler frequencies and >= 16 time points");
  }
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * dt) {
      throw InvalidArgument("swap spectroscopy times must be uniformly spaced");
    }
  }
  DeviceParams resonant = params;
  resonant.q1.freq_max = params.q2.freq_max;

  const std::size_t nf = coupler_freqs.size();
  SwapSpectroscopy out;
  out.grid = {"coupler_freq", "time", coupler_freqs, times,
              RMatrix::Zero(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(nf))};
  out.j12_fit.assign(nf, std::numeric_limits<double>::quiet_NaN());
  out.j12_model.assign(nf, 0.0);
  out.ripple.assign(nf, 0.0);
  out.ripple_flag.assign(nf, false);

  parallel_for(nf, threads, [&](std::size_t ix) {
    const double phi = flux_for_coupler_frequency(resonant, coupler_freqs[ix]);
    const HamiltonianModel model = build_static(resonant, phi, spec);
    const StaticPropagator prop(model.static_part);
    CVector psi0 = CVector::Zero(model.dimension());
    psi0(basis_index({1, 0, 0}, model.dims)) = 1.0;
    std::vector<double> p2(times.size());
    for (std::size_t it = 0; it < times.size(); ++it) {
      const CVector psi = prop.evolve_states(psi0, times[it]).col(0);
      QuantumState s{model.dims, psi * psi.adjoint()};
      p2[it] = 1.0 - s.level_population(kModeQ2, 0);
      out.grid.values(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(ix)) = p2[it];
    }
    out.j12_model[ix] = effective_coupling_j12(resonant, phi);

    // A complete swap within the record is needed for a frequency estimate.
    const double peak = *std::max_element(p2.begin(), p2.end());
    double j_fit = std::numeric_limits<double>::quiet_NaN();
    if (peak > 0.5) {
      try {
        const FitResult fit = fit_cosine(times, p2);
        j_fit = 0.5 * std::abs(fit.params(1));
      } catch (const FitError&) {
      }
    }
    out.j12_fit[ix] = j_fit;

    const double mean = std::accumulate(p2.begin(), p2.end(), 0.0) / static_cast<double>(p2.size());
    // Hann window so leakage of the slow exchange does not pose as ripple.
    std::vector<double> centered(p2.size());
    double wsum = 0.0;
    for (std::size_t i = 0; i < p2.size(); ++i) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                              static_cast<double>(p2.size() - 1)));
      centered[i] = w * (p2[i] - mean);
      wsum += w;
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, centered);
    const double n = static_cast<double>(centered.size());
    const double exchange = std::isnan(j_fit) ? 0.0 : 2.0 * j_fit;
    const double cutoff = std::max(3.0 * exchange, units::mhz(20.0));
    double power = 0.0;
    for (std::size_t k = 1; k < spectrum.size() / 2; ++k) {
      const double w = 2.0 * kPi * static_cast<double>(k) / (n * dt);
      if (w > cutoff) power += std::norm(spectrum[k]);
    }
    out.ripple[ix] = 2.0 * std::sqrt(power) / wsum;
    out.ripple_flag[ix] = out.ripple[ix] > ripple_threshold;
  });
  return out;
}

RamseyResult ramsey_zz(const DeviceParams& params, double phi, int n_levels,
                       const RamseyOptions& options) {
  if (options.samples < 16) throw InvalidArgument("Ramsey record needs at least 16 samples");
  const HamiltonianModel model = build_static_transmon(params, phi, n_levels);
  const StaticPropagator prop(model.static_part);
  const std::vector<int> labels = label_eigenstates(prop.eigenvectors());
  const double reference =
      lamb_shifted_freq(params, Qubit::Q1, phi).value - options.detuning;

  std::vector<double> times(options.samples);
  for (int i = 0; i < options.samples; ++i) times[i] = options.duration * i / (options.samples - 1);
  // Fringe times in µs keep the fit well scaled.
  std::vector<double> t_us(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) t_us[i] = units::to_us(times[i]);

  auto fringe_frequency = [&](int q2) {
    const CVector ground = prop.eigenvectors().col(labels[basis_index({0, q2, 0}, model.dims)]);
    const CVector excited = prop.eigenvectors().col(labels[basis_index({1, q2, 0}, model.dims)]);
    // Ideal π/2 on Q1 within the dressed computational states.
    const CVector psi0 = (ground + excited) / std::sqrt(2.0);
    std::vector<double> signal(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      const CVector psi = prop.evolve_states(psi0, times[i]).col(0);
      const cplx a0 = ground.dot(psi);
      const cplx a1 = excited.dot(psi);
      // Second π/2 whose phase advances at the reference frequency.
      const cplx z = 2.0 * std::conj(a0) * a1 * std::polar(1.0, reference * times[i]);
      signal[i] = 0.5 * (1.0 + z.real());
    }
    const FitResult fit = fit_damped_cosine(t_us, signal);
    return std::abs(fit.params(1)) * 1e6;
  };
  RamseyResult r;
  r.freq_q2_ground = fringe_frequency(0);
  r.freq_q2_excited = fringe_frequency(1);
  r.zz = r.freq_q2_excited - r.freq_q2_ground;
  return r;
}

double energy_swap_g(const DeviceParams& params, Qubit q, const ModelSpec& spec) {
  DeviceParams p = params;
  const double target = params.qubit_frequency(q);
  // Park the spectator qubit far below so it only adds a small dispersive shift.
  TransmonParams& other = q == Qubit::Q1 ? p.q2 : p.q1;
  other.freq_max = std::max(target - units::ghz(1.5), 0.1 * target);
  const int mode = q == Qubit::Q1 ? kModeQ1 : kModeQ2;
  std::vector<int> occ{0, 0, 0};
  occ[mode] = 1;
  const int excited = basis_index(occ, build_static(p, 0.0, spec).dims);

  // Tune the coupler onto the dressed resonance: the bias where the
  // qubit-like eigenvector is most evenly shared, i.e. full swap contrast.
  auto qubit_weight = [&](double freq) {
    const HamiltonianModel m = build_static(p, flux_for_coupler_frequency(p, freq), spec);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.static_part);
    return es.eigenvectors().row(excited).cwiseAbs2().maxCoeff();
  };
  const double span = std::max(4.0 * std::max(p.g1, p.g2), units::mhz(20.0));
  const double upper = std::min(target + span, coupler_frequency(p, 0.0));
  const auto best = boost::math::tools::brent_find_minima(qubit_weight, target - span, upper, 40);
  if (best.second > 0.99) throw FitError("energy swap: qubit and coupler do not hybridize");
  const double phi = flux_for_coupler_frequency(p, best.first);
  const HamiltonianModel model = build_static(p, phi, spec);
  const StaticPropagator prop(model.static_part);
  CVector psi0 = CVector::Zero(model.dimension());
  psi0(excited) = 1.0;

  constexpr int kSamples = 2001;
  const double window = 200e-9;
  std::vector<double> t_ns(kSamples), pop(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    const double t = window * i / (kSamples - 1);
    t_ns[i] = units::to_ns(t);
    const CVector psi = prop.evolve_states(psi0, t).col(0);
    QuantumState s{model.dims, psi * psi.adjoint()};
    pop[i] = 1.0 - s.level_population(mode, 0);
  }
  const auto [lo, hi] = std::minmax_element(pop.begin(), pop.end());
  if (*hi - *lo < 1e-3) throw FitError("energy swap: no qubit-coupler oscillation observed");
  const FitResult fit = fit_cosine(t_ns, pop);
  return 0.5 * std::abs(fit.params(1)) * 1e9;
}

std::vector<SpectroscopyPoint> coupler_spectroscopy(const DeviceParams& params,
                                                    const std::vector<double>& flux_mv) {
  std::vector<SpectroscopyPoint> out;
  out.reserve(flux_mv.size());
  for (double mv : flux_mv) {
    const double phi = params.coupler_flux_map.to_phi(mv);
    if (std::abs(phi) >= 0.5) throw DomainError("coupler bias leaves the principal flux branch");
    out.push_back({mv, phi, coupler_frequency(params, phi)});
  }
  return out;
}

GateQpt run_gate_qpt(const GateSimulator& gate, const QptSettings& settings) {
  GateQpt out;
  QptOptions exp_opts = settings.qpt;
  out.chi_exp = simulate_qpt(gate.executor(), exp_opts).chi;
  QptOptions ctrl_opts = settings.qpt;
  ctrl_opts.seed = settings.qpt.seed ^ 0x9e3779b97f4a7c15ULL;
  out.chi_control = simulate_qpt([](const Mat4& rho) { return rho; }, ctrl_opts).chi;
  out.error_exp = error_matrix(out.chi_exp, iswap(), "iSWAP");
  out.error_control = error_matrix(out.chi_control, Mat4::Identity(), "I");
  out.error = settings.subtract_spam ? subtract_spam(out.error_exp, out.error_control)
                                     : out.error_exp;
  out.process_fidelity = process_fidelity(out.chi_exp, ideal_chi(iswap()));
  return out;
}

std::vector<std::pair<int, double>> repeat_channel_qpt(const Superop& single,
                                                       const std::vector<int>& n_list,
                                                       const QptSettings& settings) {
  if (n_list.empty()) throw InvalidArgument("repetition list is empty");
  std::vector<std::pair<int, double>> out;
  for (int n : n_list) {
    if (n < 1) throw InvalidArgument("repetition counts must be >= 1");
    Superop s = Superop::Identity();
    Mat4 target = Mat4::Identity();
    for (int k = 0; k < n; ++k) {
      s = single * s;
      target = iswap() * target;
    }
    QptOptions opts = settings.qpt;
    opts.seed = settings.qpt.seed + static_cast<std::uint64_t>(n);
    const auto chi = simulate_qpt([s](const Mat4& rho) { return apply_superop(s, rho); }, opts).chi;
    out.emplace_back(n, process_fidelity(chi, ideal_chi(target)));
  }
  return out;
}

std::vector<std::pair<int, double>> repeat_gate_qpt(const GateSimulator& gate,
                                                    const std::vector<int>& n_list,
                                                    const QptSettings& settings) {
  return repeat_channel_qpt(gate.channel(), n_list, settings);
}

Superop pauli_twirl(const Superop& channel, const Mat4& target) {
  const ErrorMatrix e = error_matrix(chi_from_superop(channel), target);
  std::vector<Mat4> kraus;
  for (int m = 0; m < 16; ++m) {
    const double p = std::max(e.chi_err(m, m).real(), 0.0);
    if (p > 0.0) kraus.push_back(std::sqrt(p) * pauli_basis()[m] * target);
  }
  return superop_from_kraus(kraus);
}

PointResult run_operating_point(const DeviceParams& params, const OperatingPoint& point,
                                const BudgetOptions& options) {
  PointResult r;
  r.point = point;
  r.phi_dc = params.coupler_flux_map.to_phi(point.flux_mv);
  r.coupler_freq = coupler_frequency(params, r.phi_dc);
  check_dispersive(params, r.phi_dc);
  r.static_zz = static_zz(params, r.phi_dc, options.zz_levels);
  r.calibration = calibrate_gate(params, r.phi_dc, options.gate_time, options.calibration);

  EvolveOptions evolve = options.calibration.evolve;
  evolve.monitor = &r.physicality;
  GateSimulator gate(params, r.calibration.pulse, options.calibration.spec,
                     NoiseModel::from_device(params, options.coupler_t1, options.coupler_tphi), evolve);
  gate.set_virtual_z(r.calibration.virtual_z_q1, r.calibration.virtual_z_q2);
  r.qpt = run_gate_qpt(gate, options.qpt);
  r.budget = error_budget(r.qpt.error, options.gate_time, params.t1_q1, params.t1_q2,
                          params.tphi_q1, params.tphi_q2);
  return r;
}

std::vector<PointResult> run_error_budget(const DeviceParams& params,
                                          const std::vector<OperatingPoint>& points,
                                          const BudgetOptions& options) {
  std::vector<PointResult> out(points.size());
  parallel_for(points.size(), options.threads, [&](std::size_t i) {
    out[i] = run_operating_point(params, points[i], options);
  });
  return out;
}

}  // namespace paraswap
