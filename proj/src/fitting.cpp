#include "paraswap/fitting.hpp"

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "paraswap/errors.hpp"

namespace paraswap {
namespace {

struct Residuals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ModelFunction* model;
  const std::vector<double>* x;
  const std::vector<double>* y;
  int n_params;
  mutable int evaluations = 0;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(x->size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    ++evaluations;
    for (std::size_t i = 0; i < x->size(); ++i) r(i) = (*model)(p, (*x)[i]) - (*y)[i];
    return 0;
  }
};

}  // namespace

FitResult curve_fit(const ModelFunction& model, const std::vector<double>& x,
                    const std::vector<double>& y, const RVector& initial,
                    const FitOptions& options) {
  const int np = static_cast<int>(initial.size());
  if (x.size() != y.size()) throw InvalidArgument("curve_fit: x and y differ in length");
  if (static_cast<int>(x.size()) < np) throw FitError("curve_fit: fewer points than parameters");

  Residuals f{&model, &x, &y, np};
  Eigen::NumericalDiff<Residuals, Eigen::Central> functor(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals, Eigen::Central>> lm(functor);
  lm.parameters.maxfev = options.max_evaluations;
  lm.parameters.xtol = options.xtol;
  lm.parameters.ftol = options.ftol;
  Eigen::VectorXd p = initial;
  const auto status = lm.minimize(p);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  if (status == Status::ImproperInputParameters || status == Status::TooManyFunctionEvaluation ||
      !p.allFinite()) {
    std::ostringstream os;
    os << "Levenberg-Marquardt did not converge (status " << static_cast<int>(status) << ")";
    throw FitError(os.str());
  }

  FitResult out;
  out.params = p;
  Eigen::VectorXd r(x.size());
  f(p, r);
  out.rss = r.squaredNorm();
  out.evaluations = f.evaluations;
  Eigen::MatrixXd jac(x.size(), np);
  functor.df(p, jac);
  const int dof = static_cast<int>(x.size()) - np;
  out.std_errors = RVector::Constant(np, std::numeric_limits<double>::quiet_NaN());
  if (dof > 0) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = (out.rss / dof) * lu.inverse();
      out.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
  }
  return out;
}

double dominant_frequency(const std::vector<double>& y, double dt) {
  const std::size_t n = y.size();
  if (n < 4) throw FitError("record too short for a spectrum");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  // Zero padding to 8x refines the bin spacing.
  std::vector<double> padded(8 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = y[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, padded);
  const std::size_t half = padded.size() / 2;
  std::size_t best = 1;
  double best_mag = -1.0;
  for (std::size_t k = 1; k < half; ++k) {
    const double mag = std::abs(spec[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best = k;
    }
  }
  double k = static_cast<double>(best);
  if (best > 1 && best + 1 < half) {
    k = parabolic_vertex(best - 1.0, std::abs(spec[best - 1]), best, best_mag, best + 1.0,
                         std::abs(spec[best + 1]));
  }
  return 2.0 * std::numbers::pi * k / (static_cast<double>(padded.size()) * dt);
}

double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
  if (a == 0.0) return x1;
  const double v = -b / (2.0 * a);
  return std::clamp(v, std::min({x0, x1, x2}), std::max({x0, x1, x2}));
}

namespace {

void require_uniform(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 8) throw FitError("need at least 8 uniformly spaced points");
}

std::pair<double, double> initial_phase_amp(const std::vector<double>& x,
                                            const std::vector<double>& y, double w, double offset) {
  // Project onto cos/sin at the FFT frequency for the starting phase and amplitude.
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c += (y[i] - offset) * std::cos(w * x[i]);
    s += (y[i] - offset) * std::sin(w * x[i]);
  }
  const double amp = 2.0 * std::hypot(c, s) / static_cast<double>(x.size());
  return {std::atan2(-s, c), amp};
}

}  // namespace

FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  require_uniform(x, y);
  const double dt = x[1] - x[0];
  const double span = x.back() - x.front();
  const double w0 = dominant_frequency(y, dt);
  const double offset = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  auto [phase, amp] = initial_phase_amp(x, y, w0, offset);
  if (!(amp > 1e-9)) throw FitError("no oscillation to fit");
  RVector p0(5);
  p0 << amp, w0, phase, 0.1 / span, offset;
  ModelFunction model = [](const RVector& p, double t) {
    return p(0) * std::exp(-p(3) * t) * std::cos(p(1) * t + p(2)) + p(4);
  };
  return curve_fit(model, x, y, p0);
}

FitResult fit_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  require_uniform(x, y);
  const double dt = x[1] - x[0];
  const double w0 = dominant_frequency(y, dt);
  const double offset = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  auto [phase, amp] = initial_phase_amp(x, y, w0, offset);
  if (!(amp > 1e-9)) throw FitError("no oscillation to fit");
  RVector p0(4);
  p0 << amp, w0, phase, offset;
  ModelFunction model = [](const RVector& p, double t) {
    return p(0) * std::cos(p(1) * t + p(2)) + p(3);
  };
  return curve_fit(model, x, y, p0);
}

FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw FitError("need at least 4 points");
  const double y_end = y.back();
  const double amp = y.front() - y_end;
  if (amp == 0.0) throw FitError("flat record");
  double tau = (x.back() - x.front()) / 3.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i] - y_end) < std::abs(amp) / std::exp(1.0)) {
      tau = std::max(x[i] - x.front(), 1e-30);
      break;
    }
  }
  RVector p0(3);
  p0 << amp, tau, y_end;
  ModelFunction model = [](const RVector& p, double t) { return p(0) * std::exp(-t / p(1)) + p(2); };
  return curve_fit(model, x, y, p0);
}

}  // namespace paraswap
