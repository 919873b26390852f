#include "paraswap/device_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "paraswap/errors.hpp"
#include "paraswap/hamiltonian.hpp"
#include "paraswap/log.hpp"

namespace paraswap {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_time(double t, const char* name) {
  if (!(t > 0.0)) {
    std::ostringstream os;
    os << name << " must be positive or infinite (got " << t << ")";
    throw InvalidArgument(os.str());
  }
}

template <class F>
double bracketed_root(F f, double lo, double hi, const char* what) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << what << ": no sign change on [" << lo << ", " << hi << "]";
    throw NoSignChange(os.str());
  }
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 1e-10 * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  return 0.5 * (a + b);
}

}  // namespace

void TransmonParams::validate(const char* name) const {
  std::ostringstream os;
  if (!(freq_max > 0.0)) os << name << ".freq_max must be > 0; ";
  if (!(anharmonicity > 0.0)) os << name << ".anharmonicity must be > 0; ";
  if (!(asymmetry >= 0.0 && asymmetry < 1.0)) os << name << ".asymmetry must be in [0,1); ";
  if (!os.str().empty()) throw InvalidArgument(os.str());
}

double FluxMap::to_phi(double millivolts) const { return (millivolts - offset_mv) / volts_per_phi0; }
double FluxMap::to_mv(double phi) const { return offset_mv + phi * volts_per_phi0; }

void FluxMap::validate() const {
  if (volts_per_phi0 == 0.0 || !std::isfinite(volts_per_phi0)) {
    throw InvalidArgument("flux map volts_per_phi0 must be finite and nonzero");
  }
  if (!std::isfinite(offset_mv)) throw InvalidArgument("flux map offset must be finite");
}

void DeviceParams::validate() const {
  q1.validate("q1");
  q2.validate("q2");
  coupler.validate("coupler");
  coupler_flux_map.validate();
  if (!(g1 >= 0.0 && g2 >= 0.0 && std::isfinite(g1) && std::isfinite(g2))) {
    throw InvalidArgument("qubit-coupler couplings must be finite and >= 0");
  }
  if (!std::isfinite(g12)) throw InvalidArgument("g12 must be finite");
  require_positive_time(t1_q1, "t1_q1");
  require_positive_time(t1_q2, "t1_q2");
  require_positive_time(tphi_q1, "tphi_q1");
  require_positive_time(tphi_q2, "tphi_q2");
}

double coupler_frequency(const DeviceParams& params, double phi) {
  const auto& c = params.coupler;
  const double cs = std::cos(kPi * phi);
  const double sn = std::sin(kPi * phi);
  const double r = std::sqrt(cs * cs + c.asymmetry * c.asymmetry * sn * sn);
  return (c.freq_max + c.anharmonicity) * std::sqrt(r) - c.anharmonicity;
}

double flux_for_coupler_frequency(const DeviceParams& params, double frequency) {
  const double hi = 0.5 - 1e-12;
  const double f_top = coupler_frequency(params, 0.0);
  const double f_bottom = coupler_frequency(params, hi);
  if (frequency > f_top || frequency < f_bottom) {
    std::ostringstream os;
    os << "coupler frequency " << units::to_ghz(frequency) << " GHz outside tunable range ["
       << units::to_ghz(f_bottom) << ", " << units::to_ghz(f_top) << "] GHz";
    throw DomainError(os.str());
  }
  return bracketed_root([&](double p) { return coupler_frequency(params, p) - frequency; }, 0.0,
                        hi, "flux_for_coupler_frequency");
}

double detuning(const DeviceParams& params, Qubit q, double phi) {
  return params.qubit_frequency(q) - coupler_frequency(params, phi);
}

bool check_dispersive(const DeviceParams& params, double phi) {
  bool ok = true;
  for (Qubit q : {Qubit::Q1, Qubit::Q2}) {
    const double d = std::abs(detuning(params, q, phi));
    if (!(params.qubit_coupling(q) < d / 5.0)) {
      ok = false;
      std::ostringstream os;
      os << "dispersive condition violated at phi=" << phi << " for Q"
         << (q == Qubit::Q1 ? 1 : 2) << " (g/|Delta| = " << params.qubit_coupling(q) / d << ")";
      log::warn(os.str());
    }
  }
  return ok;
}

double effective_coupling_j12(const DeviceParams& params, double phi) {
  const double d1 = detuning(params, Qubit::Q1, phi);
  const double d2 = detuning(params, Qubit::Q2, phi);
  const double scale = params.coupler.freq_max * 1e-12;
  if (std::abs(d1) <= scale || std::abs(d2) <= scale) {
    throw DomainError("effective_coupling_j12: qubit-coupler detuning is zero");
  }
  const double harmonic = 2.0 / (1.0 / d1 + 1.0 / d2);
  return params.g12 + params.g1 * params.g2 / harmonic;
}

double j12_derivative(const DeviceParams& params, double phi, int order, double step) {
  if (order != 1 && order != 2) throw InvalidArgument("j12_derivative: order must be 1 or 2");
  if (!(step > 0.0)) throw InvalidArgument("j12_derivative: step must be positive");
  if (std::abs(phi) + 2.0 * step >= 0.5) {
    throw DomainError("j12_derivative: stencil leaves the principal flux branch");
  }
  // fourth-order five-point stencils
  auto f = [&](double k) { return effective_coupling_j12(params, phi + k * step); };
  const double fp1 = f(1.0), fm1 = f(-1.0), fp2 = f(2.0), fm2 = f(-2.0);
  if (order == 1) return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * step);
  return (16.0 * (fp1 + fm1) - (fp2 + fm2) - 30.0 * f(0.0)) / (12.0 * step * step);
}

LambShiftedFrequency lamb_shifted_freq(const DeviceParams& params, Qubit q, double phi,
                                       double step) {
  const double g = params.qubit_coupling(q);
  const double w = params.qubit_frequency(q);
  auto value = [&](double p) {
    const double d = detuning(params, q, p);
    if (std::abs(d) <= params.coupler.freq_max * 1e-12) {
      throw DomainError("lamb_shifted_freq: qubit-coupler detuning is zero");
    }
    return w + g * g / d;
  };
  LambShiftedFrequency out;
  out.value = value(phi);
  if (std::abs(phi) + step < 0.5) {
    const double fp = value(phi + step);
    const double fm = value(phi - step);
    out.d_phi = (fp - fm) / (2.0 * step);
    out.d2_phi = (fp - 2.0 * out.value + fm) / (step * step);
  }
  return out;
}

double static_zz(const DeviceParams& params, double phi, int n_levels) {
  if (n_levels < 2) throw InvalidArgument("static_zz: n_levels must be >= 2");
  if (params.g1 == 0.0 && params.g2 == 0.0 && params.g12 == 0.0) return 0.0;
  const HamiltonianModel model = build_static_transmon(params, phi, n_levels);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(model.static_part);
  const CMatrix& vecs = solver.eigenvectors();
  const RVector& vals = solver.eigenvalues();
  const std::vector<int> labels = label_eigenstates(vecs);

  auto energy = [&](int n1, int n2) {
    const int bare = basis_index({n1, n2, 0}, model.dims);
    Eigen::Index best = 0;
    vecs.row(bare).cwiseAbs2().maxCoeff(&best);
    if (best != labels[bare]) {
      std::ostringstream os;
      os << "static_zz: bare state |" << n1 << n2 << "0> has an ambiguous eigenstate label at phi="
         << phi;
      throw DegeneracyError(os.str());
    }
    return vals(labels[bare]);
  };
  const double e00 = energy(0, 0);
  const double e01 = energy(0, 1);
  const double e10 = energy(1, 0);
  const double e11 = energy(1, 1);
  return (e11 - e10) - (e01 - e00);
}

std::pair<double, double> dispersive_flux_interval(const DeviceParams& params) {
  const double top_qubit = std::max(params.q1.freq_max, params.q2.freq_max);
  const double margin = 5.0 * std::max(params.g1, params.g2);
  const double f_floor = top_qubit + margin;
  if (f_floor >= coupler_frequency(params, 0.0)) {
    throw DomainError("coupler never reaches the dispersive regime above the qubits");
  }
  return {0.0, flux_for_coupler_frequency(params, f_floor)};
}

double find_off_flux(const DeviceParams& params, double lo, double hi) {
  return bracketed_root([&](double p) { return effective_coupling_j12(params, p); }, lo, hi,
                        "find_off_flux");
}

double find_off_flux(const DeviceParams& params) {
  const auto [lo, hi] = dispersive_flux_interval(params);
  return find_off_flux(params, lo, hi);
}

double find_zero_zz_flux(const DeviceParams& params, int n_levels, double lo, double hi) {
  return bracketed_root([&](double p) { return static_zz(params, p, n_levels); }, lo, hi,
                        "find_zero_zz_flux");
}

double find_zero_zz_flux(const DeviceParams& params, int n_levels) {
  const auto [lo, hi] = dispersive_flux_interval(params);
  return find_zero_zz_flux(params, n_levels, lo, hi);
}

}  // namespace paraswap
