#pragma once

// Resonator figures of merit from a one-port trace: series/parallel resonance,
// effective coupling, admittance ratio, Bode-Q, Q_max and FoM.

#include "resokit/network.hpp"
#include "resokit/touchstone.hpp"
#include "resokit/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace resokit {

struct ResonancePair {
  double f_s = 0.0;
  double f_p = 0.0;
};

/// f_s at max |Y|, f_p at min |Y| above f_s, each refined by a three-point
/// parabola through log|Y|. Throws ResonanceNotBracketed when either extremum
/// sits on a grid endpoint.
ResonancePair find_fs_fp(const AdmittanceTrace& y);

/// (pi^2 / 8) (f_p^2 - f_s^2) / f_s^2. Throws DomainError unless f_p >= f_s > 0.
double keff2(double f_s, double f_p);

struct AdmittanceRatio {
  double linear = 0.0;
  double db = 0.0;
};

/// |Y(f_s)| / |Y(f_p)| at the nearest grid samples.
AdmittanceRatio admittance_ratio(const AdmittanceTrace& y, double f_s, double f_p);

struct QPoint {
  double frequency = 0.0;
  double q = 0.0;
};

struct BodeQCurve {
  std::vector<QPoint> points;
  /// Frequencies where 1 - |S11|^2 < 1e-6; no Q value is produced there.
  std::vector<double> flagged;
};

/// Q = w |dS11/dw| / (1 - |S11|^2). Second-order central differences on the
/// (possibly non-uniform) grid, one-sided at the ends.
BodeQCurve bode_q(const OnePortTrace& trace);

/// Local quadratic least-squares smoothing of S11 over 2*half_window+1 samples.
OnePortTrace smooth_trace(const OnePortTrace& trace, std::size_t half_window);

/// Largest Q inside band. Throws EmptyBand if no unflagged sample falls in it.
double q_max(const BodeQCurve& curve, const FrequencyBand& band);

double fom(double keff2, double q_max);

struct ExtractionOptions {
  /// Smith-circle band for impedance tuning; default [0.98 f_s, 1.02 f_p].
  std::optional<FrequencyBand> fit_band;
  /// Q_max search band; default [0.9 f_s, 1.1 f_p].
  std::optional<FrequencyBand> q_band;
  /// 0 disables smoothing before the Bode-Q derivative.
  std::size_t smoothing_half_window = 0;
  TuneOptions tune;
};

struct ExtractionReport {
  std::string device;
  std::optional<double> lambda_m;

  double f_s = 0.0;
  double f_p = 0.0;
  double keff2 = 0.0;
  /// Coupling from fitted mBVD elements, when a fit was run.
  std::optional<double> keff2_mbvd;
  double y_ratio = 0.0;
  double y_ratio_db = 0.0;

  FrequencyBand fit_band;
  FrequencyBand q_band;
  double z0_input = 0.0;
  double z0_star = 0.0;
  SmithCircle tuned_circle;

  BodeQCurve q_bode;
  double q_max = 0.0;
  double fom = 0.0;
};

/// s_to_y -> find_fs_fp -> keff2 -> admittance_ratio -> tune_source_impedance
/// -> bode_q -> q_max -> fom.
ExtractionReport full_extraction(const OnePortTrace& trace, const ExtractionOptions& options = {});

/// Table column order: device, lambda_nm, f_s_GHz, keff2_pct, q_max, fom.
std::string report_csv_header();
std::string report_csv_row(const ExtractionReport& report);

}  // namespace resokit
