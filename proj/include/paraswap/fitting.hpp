#pragma once

#include <functional>
#include <vector>

#include "paraswap/linalg.hpp"

namespace paraswap {

struct FitResult {
  RVector params;
  RVector std_errors;  // from s²·(JᵀJ)⁻¹ at the optimum
  double rss = 0.0;
  int evaluations = 0;
};

using ModelFunction = std::function<double(const RVector& params, double x)>;

struct FitOptions {
  int max_evaluations = 4000;
  double xtol = 1e-12;
  double ftol = 1e-14;
};

/// Levenberg–Marquardt least squares of y ≈ model(p, x) with a central
/// difference Jacobian. Throws FitError if the optimizer fails.
FitResult curve_fit(const ModelFunction& model, const std::vector<double>& x,
                    const std::vector<double>& y, const RVector& initial,
                    const FitOptions& options = {});

/// y = amp·exp(−γx)·cos(ω x + phase) + offset; params (amp, ω, phase, γ, offset).
/// The initial frequency comes from the FFT peak of the mean-removed record.
FitResult fit_damped_cosine(const std::vector<double>& x, const std::vector<double>& y);

/// y = amp·cos(ω x + phase) + offset; params (amp, ω, phase, offset).
FitResult fit_cosine(const std::vector<double>& x, const std::vector<double>& y);

/// y = amp·exp(−x/tau) + offset; params (amp, tau, offset).
FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y);

/// Angular frequency of the dominant nonzero FFT bin (with parabolic
/// interpolation) of a uniformly sampled record.
double dominant_frequency(const std::vector<double>& y, double dt);

/// Parabola through three points; abscissa of its extremum.
double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

}  // namespace paraswap
