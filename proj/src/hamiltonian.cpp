#include "paraswap/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "paraswap/errors.hpp"

namespace paraswap {
namespace {

constexpr double kPi = std::numbers::pi;

// Exchange term g(A B† + A† B) between two modes.
CMatrix exchange(const CMatrix& a, const CMatrix& b, double g) {
  return g * (a * b.adjoint() + a.adjoint() * b);
}

}  // namespace

std::string ModelSpec::name() const {
  if (kind == ModelKind::TwoLevel) return "two_level";
  return "transmon" + std::to_string(n_levels);
}

HamiltonianModel build_static_two_level(const DeviceParams& params, double phi) {
  const std::vector<int> dims{2, 2, 2};
  Mat2 sigma_minus;
  sigma_minus << 0, 1, 0, 0;  // |0><1|
  const CMatrix z = pauli::Z();
  const CMatrix id2 = CMatrix::Identity(2, 2);
  const double freqs[3] = {params.q1.freq_max, params.q2.freq_max,
                           coupler_frequency(params, phi)};

  HamiltonianModel model{ModelSpec::two_level(), dims, CMatrix::Zero(8, 8)};
  std::vector<CMatrix> sm(3);
  for (int k = 0; k < 3; ++k) {
    sm[k] = embed(sigma_minus, k, dims);
    // −½ω(σ_z − 1): ground-referenced, so |1> sits at +ω.
    model.static_part += -0.5 * freqs[k] * embed(z - id2, k, dims);
  }
  model.static_part += exchange(sm[kModeQ1], sm[kModeCoupler], params.g1);
  model.static_part += exchange(sm[kModeQ2], sm[kModeCoupler], params.g2);
  model.static_part += exchange(sm[kModeQ1], sm[kModeQ2], params.g12);
  return model;
}

HamiltonianModel build_static_transmon(const DeviceParams& params, double phi, int n_levels) {
  if (n_levels < 2) throw InvalidArgument("transmon model needs at least 2 levels per mode");
  const std::vector<int> dims{n_levels, n_levels, n_levels};
  const int d = n_levels * n_levels * n_levels;
  const CMatrix a = lowering(n_levels);
  const CMatrix n = a.adjoint() * a;
  const CMatrix kerr = a.adjoint() * a.adjoint() * a * a;
  const double freqs[3] = {params.q1.freq_max, params.q2.freq_max,
                           coupler_frequency(params, phi)};
  const double ec[3] = {params.q1.anharmonicity, params.q2.anharmonicity,
                        params.coupler.anharmonicity};

  HamiltonianModel model{ModelSpec::transmon(n_levels), dims, CMatrix::Zero(d, d)};
  std::vector<CMatrix> am(3);
  for (int k = 0; k < 3; ++k) {
    am[k] = embed(a, k, dims);
    model.static_part += embed(freqs[k] * n - 0.5 * ec[k] * kerr, k, dims);
  }
  model.static_part += exchange(am[kModeQ1], am[kModeCoupler], params.g1);
  model.static_part += exchange(am[kModeQ2], am[kModeCoupler], params.g2);
  model.static_part += exchange(am[kModeQ1], am[kModeQ2], params.g12);
  return model;
}

HamiltonianModel build_static(const DeviceParams& params, double phi, const ModelSpec& spec) {
  if (spec.kind == ModelKind::TwoLevel) return build_static_two_level(params, phi);
  return build_static_transmon(params, phi, spec.n_levels);
}

std::vector<int> label_eigenstates(const CMatrix& eigenvectors) {
  const int d = static_cast<int>(eigenvectors.rows());
  struct Candidate {
    double overlap;
    int bare;
    int eig;
  };
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(d) * d);
  for (int b = 0; b < d; ++b) {
    for (int k = 0; k < d; ++k) cands.push_back({std::norm(eigenvectors(b, k)), b, k});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.overlap != y.overlap) return x.overlap > y.overlap;
    return x.bare < y.bare;
  });
  std::vector<int> label(d, -1);
  std::vector<bool> taken(d, false);
  int assigned = 0;
  for (const auto& c : cands) {
    if (assigned == d) break;
    if (label[c.bare] >= 0 || taken[c.eig]) continue;
    label[c.bare] = c.eig;
    taken[c.eig] = true;
    ++assigned;
  }
  return label;
}

double FluxPulse::envelope(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  if (ramp <= 0.0) return 1.0;
  if (t < ramp) return 0.5 * (1.0 - std::cos(kPi * t / ramp));
  if (t > duration - ramp) return 0.5 * (1.0 - std::cos(kPi * (duration - t) / ramp));
  return 1.0;
}

double FluxPulse::flux(double t) const {
  return phi_dc + envelope(t) * amplitude * std::cos(omega_drive * t + phase);
}

void FluxPulse::validate() const {
  std::ostringstream os;
  if (!(amplitude >= 0.0)) os << "pulse amplitude must be >= 0; ";
  if (!(duration > 0.0)) os << "pulse duration must be > 0; ";
  if (!(ramp >= 0.0 && ramp <= 0.5 * duration)) os << "pulse ramp must lie in [0, duration/2]; ";
  if (!std::isfinite(omega_drive) || !std::isfinite(phase) || !std::isfinite(phi_dc)) {
    os << "pulse parameters must be finite; ";
  }
  if (!os.str().empty()) throw InvalidArgument(os.str());
  if (std::abs(phi_dc) + amplitude >= 0.5) {
    throw DomainError("flux excursion phi_dc +/- amplitude leaves the principal branch");
  }
}

TimeDependentHamiltonian::TimeDependentHamiltonian(std::vector<int> dims,
                                                   const CMatrix& static_part,
                                                   std::vector<double> mode_frequencies,
                                                   RVector drive_diagonal,
                                                   DriveFunction drive_offset,
                                                   double drive_frequency)
    : dims_(std::move(dims)),
      mode_frequencies_(std::move(mode_frequencies)),
      drive_diag_(std::move(drive_diagonal)),
      drive_offset_(std::move(drive_offset)),
      drive_frequency_(drive_frequency) {
  const int d = static_cast<int>(static_part.rows());
  int prod = 1;
  for (int n : dims_) prod *= n;
  if (prod != d || static_part.cols() != d) {
    throw InvalidArgument("Hamiltonian dimension does not match mode dimensions");
  }
  if (mode_frequencies_.size() != dims_.size()) {
    throw InvalidArgument("one frame frequency per mode is required");
  }
  if (drive_diag_.size() == 0) drive_diag_ = RVector::Zero(d);
  if (drive_diag_.size() != d) throw InvalidArgument("drive diagonal has the wrong size");

  frame_ = RVector::Zero(d);
  for (int j = 0; j < d; ++j) {
    const auto digits = basis_digits(j, dims_);
    for (std::size_t k = 0; k < digits.size(); ++k) frame_(j) += mode_frequencies_[k] * digits[k];
  }
  residual_ = static_part.diagonal().real() - frame_;
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      if (r == c) continue;
      const cplx v = static_part(r, c);
      if (v != cplx(0.0, 0.0)) couplings_.push_back({r, c, v, frame_(r) - frame_(c)});
    }
  }
}

TimeDependentHamiltonian TimeDependentHamiltonian::constant(const CMatrix& h,
                                                            std::vector<int> dims) {
  if (dims.empty()) dims = {static_cast<int>(h.rows())};
  std::vector<double> zeros(dims.size(), 0.0);
  return TimeDependentHamiltonian(std::move(dims), h, std::move(zeros), RVector(), nullptr, 0.0);
}

CMatrix TimeDependentHamiltonian::matrix(double t) const {
  const int d = dimension();
  CMatrix h = CMatrix::Zero(d, d);
  const double f = drive_offset(t);
  for (int j = 0; j < d; ++j) h(j, j) = frame_(j) + residual_(j) + f * drive_diag_(j);
  for (const auto& c : couplings_) h(c.row, c.col) += c.value;
  return h;
}

namespace {

RVector coupler_occupation(const std::vector<int>& dims) {
  const int d = dims[0] * dims[1] * dims[2];
  RVector occ(d);
  for (int j = 0; j < d; ++j) occ(j) = basis_digits(j, dims)[kModeCoupler];
  return occ;
}

}  // namespace

TimeDependentHamiltonian build_time_dependent(const DeviceParams& params, const FluxPulse& pulse,
                                              const ModelSpec& spec) {
  pulse.validate();
  const HamiltonianModel model = build_static(params, pulse.phi_dc, spec);
  const double wc_dc = coupler_frequency(params, pulse.phi_dc);
  std::vector<double> modes{params.q1.freq_max, params.q2.freq_max, wc_dc};
  TimeDependentHamiltonian::DriveFunction offset;
  if (pulse.amplitude > 0.0) {
    offset = [params, pulse, wc_dc](double t) {
      return coupler_frequency(params, pulse.flux(t)) - wc_dc;
    };
  }
  return TimeDependentHamiltonian(model.dims, model.static_part, std::move(modes),
                                  coupler_occupation(model.dims), std::move(offset),
                                  pulse.omega_drive);
}

TimeDependentHamiltonian build_static_evaluator(const DeviceParams& params, double phi,
                                                const ModelSpec& spec) {
  const HamiltonianModel model = build_static(params, phi, spec);
  std::vector<double> modes{params.q1.freq_max, params.q2.freq_max,
                            coupler_frequency(params, phi)};
  return TimeDependentHamiltonian(model.dims, model.static_part, std::move(modes),
                                  coupler_occupation(model.dims), nullptr, 0.0);
}

ExpansionCoefficients expansion_coefficients(const DeviceParams& params, double phi_dc,
                                             double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("drive amplitude must be >= 0");
  ExpansionCoefficients c;
  c.j12 = effective_coupling_j12(params, phi_dc);
  const double d1 = j12_derivative(params, phi_dc, 1);
  const double d2 = j12_derivative(params, phi_dc, 2);
  const double osc = amplitude * amplitude / 8.0 * d2;
  c.second_order_osc = osc;
  c.second_order_dc = 2.0 * osc;
  c.first_order = amplitude / 2.0 * d1;
  return c;
}

double effective_drive_frequency(const DeviceParams& params, double phi_dc, double amplitude) {
  const auto w1 = lamb_shifted_freq(params, Qubit::Q1, phi_dc);
  const auto w2 = lamb_shifted_freq(params, Qubit::Q2, phi_dc);
  const double delta12 = w1.value - w2.value;
  if (amplitude == 0.0) return delta12;
  return delta12 + amplitude * amplitude / 4.0 * (w2.d2_phi - w1.d2_phi);
}

double resonant_exchange_rate(const DeviceParams& params, double phi_dc, double amplitude) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("drive amplitude must be >= 0");
  if (amplitude == 0.0) return 0.0;
  if (std::abs(phi_dc) + amplitude >= 0.5) {
    throw DomainError("flux excursion leaves the principal branch");
  }
  constexpr int kSamples = 512;
  double acc = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double theta = 2.0 * kPi * k / kSamples;
    acc += effective_coupling_j12(params, phi_dc + amplitude * std::cos(theta)) * std::cos(theta);
  }
  // first cosine coefficient is 2/N Σ f cos θ; the resonant rate is half of it
  return acc / kSamples;
}

}  // namespace paraswap
