#pragma once

// Modified Butterworth-Van Dyke equivalent circuit:
//
//   R_s in series with ( R_m - L_m - C_m  ||  C_0 - R_0 )

#include "resokit/network.hpp"
#include "resokit/touchstone.hpp"
#include "resokit/types.hpp"

#include <span>

namespace resokit {

struct MbvdParams {
  double r_s = 0.0;  ///< series electrode resistance [ohm]
  double r_0 = 0.0;  ///< static-branch dielectric loss [ohm]
  double r_m = 0.0;  ///< motional resistance [ohm]
  double l_m = 0.0;  ///< motional inductance [H]
  double c_m = 0.0;  ///< motional capacitance [F]
  double c_0 = 0.0;  ///< static capacitance [F]

  bool operator==(const MbvdParams&) const = default;
};

/// Throws InvalidArgument on non-finite values, non-positive L_m/C_m/C_0,
/// negative resistances, or C_m >= 8 C_0.
void validate(const MbvdParams& p);

Complex admittance(const MbvdParams& p, double f_hz);

/// 1 / (2 pi sqrt(L_m C_m)).
double derived_fs(const MbvdParams& p);
/// Lossless antiresonance: f_s sqrt(1 + C_m / C_0).
double derived_fp(const MbvdParams& p);
/// Coupling implied by the element values, (pi^2 / 8) C_m / C_0.
double model_keff2(const MbvdParams& p);
/// Motional quality factor 2 pi f_s L_m / R_m (infinite when R_m = 0).
double motional_q(const MbvdParams& p);

/// Element values for a target series resonance, capacitance ratio and motional Q.
MbvdParams params_from_resonance(double f_s, double cm_over_c0, double q_m, double c_0,
                                 double r_s, double r_0);

AdmittanceTrace synthesize_admittance(const MbvdParams& p, std::span<const double> grid);
OnePortTrace synthesize_s11(const MbvdParams& p, std::span<const double> grid, double z0);

/// n points evenly spaced over [f_lo, f_hi] inclusive.
std::vector<double> linear_grid(double f_lo, double f_hi, std::size_t n);

}  // namespace resokit
