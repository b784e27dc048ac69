#pragma once

// One-port network math: S <-> Y, renormalization, Smith-chart circle fitting
// and source-impedance tuning.

#include "resokit/touchstone.hpp"
#include "resokit/types.hpp"

#include <span>
#include <vector>

namespace resokit {

/// Admittance in siemens on a strictly increasing frequency grid.
class AdmittanceTrace {
public:
  AdmittanceTrace(std::vector<double> frequencies_hz, std::vector<Complex> y);

  std::span<const double> frequencies() const { return frequencies_; }
  std::span<const Complex> y() const { return y_; }
  std::size_t size() const { return frequencies_.size(); }

  /// Number of samples with Re(y) < -eps (non-passive beyond rounding).
  std::size_t passivity_violations(double eps = 1e-6) const;

private:
  std::vector<double> frequencies_;
  std::vector<Complex> y_;
};

struct SmithCircle {
  Complex center;
  double radius = 0.0;
  /// RMS of |p - center| - radius over the fitted points.
  double rms_residual = 0.0;
};

/// Y = (1 - S) / (z0 (1 + S)). Throws SingularReflection when |1 + S| < 1e-12.
/// Logs a warning when the result is non-passive beyond 1e-6 S.
AdmittanceTrace s_to_y(const OnePortTrace& trace);

/// S = (1 - z0 Y) / (1 + z0 Y).
OnePortTrace y_to_s(const AdmittanceTrace& trace, double z0);

/// Re-expresses S11 at a new real reference impedance through the admittance.
OnePortTrace renormalize(const OnePortTrace& trace, double z0_new);

/// Algebraic (Kasa) least-squares circle through the points.
/// Throws TooFewPoints below 5 points and DegenerateLocus when they are collinear.
SmithCircle fit_circle(std::span<const Complex> points);

/// Circle fit over the S11 samples whose frequency lies inside band.
SmithCircle fit_smith_circle(const OnePortTrace& trace, const FrequencyBand& band);

struct TuneOptions {
  double z0_min = 1.0;
  double z0_max = 5000.0;
  double resolution = 0.1;
};

struct TunedTrace {
  double z0_star = 0.0;
  OnePortTrace tuned;
  SmithCircle circle;
  /// True when the coarse scan found the objective multimodal.
  bool used_grid_fallback = false;
};

/// Real source impedance minimizing the distance of the fitted Smith circle's
/// center from the chart origin, and the trace renormalized to it.
TunedTrace tune_source_impedance(const OnePortTrace& trace, const FrequencyBand& band,
                                 const TuneOptions& options = {});

}  // namespace resokit
