#include "resokit/mbvd.hpp"

#include "resokit/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace resokit {

void validate(const MbvdParams& p) {
  const double all[] = {p.r_s, p.r_0, p.r_m, p.l_m, p.c_m, p.c_0};
  for (double v : all) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "mBVD element is not finite");
  }
  if (!(p.l_m > 0.0) || !(p.c_m > 0.0) || !(p.c_0 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("mBVD needs L_m, C_m, C_0 > 0 (got {}, {}, {})", p.l_m, p.c_m, p.c_0));
  }
  if (p.r_s < 0.0 || p.r_0 < 0.0 || p.r_m < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "mBVD resistances must be non-negative");
  }
  if (!(p.c_m < 8.0 * p.c_0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("C_m/C_0 = {} exceeds the sanity bound of 8", p.c_m / p.c_0));
  }
}

Complex admittance(const MbvdParams& p, double f_hz) {
  const double w = kTwoPi * f_hz;
  const Complex z_m{p.r_m, w * p.l_m - 1.0 / (w * p.c_m)};
  const Complex z_0{p.r_0, -1.0 / (w * p.c_0)};
  const Complex z_sum = z_m + z_0;
  if (z_sum == Complex{}) return {};  // lossless antiresonance
  const Complex z = p.r_s + z_m * z_0 / z_sum;
  if (z == Complex{}) return {std::numeric_limits<double>::infinity(), 0.0};  // short
  return 1.0 / z;
}

double derived_fs(const MbvdParams& p) { return 1.0 / (kTwoPi * std::sqrt(p.l_m * p.c_m)); }

double derived_fp(const MbvdParams& p) { return derived_fs(p) * std::sqrt(1.0 + p.c_m / p.c_0); }

double model_keff2(const MbvdParams& p) {
  return std::numbers::pi * std::numbers::pi / 8.0 * (p.c_m / p.c_0);
}

double motional_q(const MbvdParams& p) {
  if (p.r_m == 0.0) return std::numeric_limits<double>::infinity();
  return kTwoPi * derived_fs(p) * p.l_m / p.r_m;
}

MbvdParams params_from_resonance(double f_s, double cm_over_c0, double q_m, double c_0,
                                 double r_s, double r_0) {
  MbvdParams p;
  const double w = kTwoPi * f_s;
  p.c_0 = c_0;
  p.c_m = cm_over_c0 * c_0;
  p.l_m = 1.0 / (w * w * p.c_m);
  p.r_m = std::isinf(q_m) ? 0.0 : w * p.l_m / q_m;
  p.r_s = r_s;
  p.r_0 = r_0;
  validate(p);
  return p;
}

AdmittanceTrace synthesize_admittance(const MbvdParams& p, std::span<const double> grid) {
  validate(p);
  validate_frequency_grid(grid);
  std::vector<Complex> y(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) y[i] = admittance(p, grid[i]);
  return AdmittanceTrace({grid.begin(), grid.end()}, std::move(y));
}

OnePortTrace synthesize_s11(const MbvdParams& p, std::span<const double> grid, double z0) {
  return y_to_s(synthesize_admittance(p, grid), z0);
}

std::vector<double> linear_grid(double f_lo, double f_hi, std::size_t n) {
  if (n < 2 || !(f_hi > f_lo)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("grid needs >= 2 points over a non-empty span (got {} points, [{}, {}])",
                            n, f_lo, f_hi));
  }
  std::vector<double> grid(n);
  const double step = (f_hi - f_lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = f_lo + step * static_cast<double>(i);
  grid.back() = f_hi;
  return grid;
}

}  // namespace resokit
