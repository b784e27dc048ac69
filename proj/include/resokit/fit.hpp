#pragma once

// Least-squares fit of mBVD element values to a measured admittance trace.

#include "resokit/mbvd.hpp"
#include "resokit/network.hpp"

#include <vector>

namespace resokit {

struct FitConfig {
  int max_iterations = 200;
  /// Forward-difference step in log-parameter space (a relative step in the element).
  double jacobian_step = 1e-6;
  double min_relative_improvement = 1e-10;
  double min_relative_step = 1e-8;
  double initial_damping = 1e-3;
  /// Resistances are kept at or above this value [ohm].
  double resistance_floor = 1e-6;
  /// Fit R_m, L_m, C_m, C_0 with R_s, R_0 held before releasing all six.
  bool staged = true;
  /// Also try a seed whose motional branch is moved onto the measured resonances.
  bool align_resonance = true;
};

struct FitResult {
  MbvdParams params;
  /// sqrt(mean |Y_model - Y_meas|^2) [S]
  double rms_residual = 0.0;
  /// rms_residual / sqrt(mean |Y_meas|^2)
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool aligned_seed = false;
  /// Weighted cost at the start and after every accepted step.
  std::vector<double> cost_history;
};

/// Deterministic starting point from the measured resonances and the
/// off-resonance capacitance.
MbvdParams initial_guess(const AdmittanceTrace& y);

/// Damped Gauss-Newton on log(element) with weights
/// 1 / max(|Y_meas|, 0.01 max|Y_meas|)^2. A run that exhausts max_iterations
/// returns its best point with converged = false.
FitResult fit_mbvd(const AdmittanceTrace& y, const MbvdParams& init, const FitConfig& config = {});

/// Stacked [Re; Im] weighted residuals, length 2 n.
std::vector<double> weighted_residuals(const AdmittanceTrace& y, const MbvdParams& p);

/// Forward-difference Jacobian of weighted_residuals with respect to the log of
/// (r_s, r_0, r_m, l_m, c_m, c_0); row-major, 6 columns.
std::vector<double> numeric_jacobian(const AdmittanceTrace& y, const MbvdParams& p, double step);

}  // namespace resokit
