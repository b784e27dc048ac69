#pragma once

// Frequency-scaling explorer: predicts series resonance and coupling of
// candidate SH-SAW geometries from a piecewise-linear dispersion table.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace resokit {

struct DeviceGeometry {
  double lambda = 0.0;    ///< acoustic wavelength [m]
  double h_ln = 0.0;      ///< LN film thickness [m]
  double h_elec = 0.0;    ///< electrode thickness [m]
  double duty = 0.5;      ///< IDT duty factor
  int n_e = 2;            ///< electrodes
  int n_r = 0;            ///< reflector gratings
  double aperture = 1.0;  ///< in wavelengths

  double h_ln_over_lambda() const { return h_ln / lambda; }
  double h_elec_over_lambda() const { return h_elec / lambda; }
};

void validate(const DeviceGeometry& g);

struct DispersionAnchor {
  double h_ln_over_lambda = 0.0;
  double h_elec_over_lambda = 0.0;
  double duty = 0.5;
  double v_p = 0.0;  ///< phase velocity [m/s]
  double keff2 = 0.0;
  std::string family;
  std::string provenance;
};

inline constexpr std::string_view kMeasuredFamily = "measured";
inline constexpr std::string_view kSimulatedFamily = "simulated";

/// Immutable anchor set. Construction rejects duplicate (ratios, duty, family)
/// tuples, non-positive v_p, keff2 outside [0, 1), and a 50%-duty measured
/// family whose v_p is not strictly decreasing in h_ln/lambda.
class DispersionTable {
public:
  explicit DispersionTable(std::vector<DispersionAnchor> anchors);

  /// Header: h_ln_over_lambda,h_elec_over_lambda,duty,v_p_mps,keff2,family,provenance
  static DispersionTable from_csv(std::string_view text);
  std::string to_csv() const;

  const std::vector<DispersionAnchor>& anchors() const { return anchors_; }

  /// Anchors of one family at one duty, sorted by h_ln/lambda.
  std::vector<DispersionAnchor> subfamily(std::string_view family, double duty) const;
  /// Distinct duties present in a family, ascending.
  std::vector<double> duties(std::string_view family) const;
  /// True if some h_ln/lambda node of the family carries two h_elec/lambda values.
  bool resolves_h_elec(std::string_view family) const;
  /// True if some h_ln/lambda node of the family carries two duties.
  bool resolves_duty(std::string_view family) const;

private:
  std::vector<DispersionAnchor> anchors_;
};

/// The bundled table (measured rows and simulated endpoints).
DispersionTable builtin_dispersion_table();
/// The bundled table in its CSV form.
std::string_view builtin_dispersion_csv();

struct PredictOptions {
  bool allow_extrapolation = false;
};

struct Prediction {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// v_p(h_ln/lambda) / lambda. Throws OutOfTableRange outside the anchor hull
/// unless extrapolation is enabled.
Prediction predict_fs(const DeviceGeometry& g, const DispersionTable& table,
                      std::string_view family, const PredictOptions& options = {});
Prediction predict_keff2(const DeviceGeometry& g, const DispersionTable& table,
                         std::string_view family, const PredictOptions& options = {});

/// Wavelength giving series resonance target_fs for film thickness h_ln, by
/// bisection. Throws TargetOutOfRange when the target is outside the table hull.
double scale_to_frequency(double target_fs, double h_ln, const DispersionTable& table,
                          std::string_view family, double duty = 0.5,
                          double relative_tolerance = 1e-4);

enum class SweepAxis { Lambda, HLn, HElec, Duty };
std::optional<SweepAxis> parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

struct SweepRow {
  double value = 0.0;
  std::optional<double> f_s;
  std::optional<double> keff2;
  std::vector<std::string> warnings;
  /// Empty on success; prediction failures are recorded here, not thrown.
  std::string error;
};

std::vector<SweepRow> sweep(const DeviceGeometry& base, SweepAxis axis,
                            std::span<const double> values, const DispersionTable& table,
                            std::string_view family, const PredictOptions& options = {});

/// Columns: value,f_s_GHz,keff2_pct,warnings,error
std::string sweep_csv(SweepAxis axis, std::span<const SweepRow> rows);

}  // namespace resokit
