#pragma once

// Test-only oracles, written from the textbook formulas and sharing no code
// with the library, plus the parameter sets the suites reuse.

#include "resokit/mbvd.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Y = 1/(R_s + 1/(Y_m + Y_0)), branch by branch.
inline cd admittance(const resokit::MbvdParams& p, double f) {
  const double w = 2.0 * pi * f;
  const cd j{0.0, 1.0};
  const cd y_m = 1.0 / (p.r_m + j * w * p.l_m + 1.0 / (j * w * p.c_m));
  const cd y_0 = j * w * p.c_0 / (1.0 + j * w * p.c_0 * p.r_0);
  return 1.0 / (p.r_s + 1.0 / (y_m + y_0));
}

inline cd reflection(const resokit::MbvdParams& p, double f, double z0) {
  const cd y = oracle::admittance(p, f);
  return (1.0 - z0 * y) / (1.0 + z0 * y);
}

/// Bode Q with dS/dw taken from the model itself by a small central step.
inline double bode_q(const resokit::MbvdParams& p, double f, double z0) {
  const double h = f * 1e-7;
  const cd ds = (oracle::reflection(p, f + h, z0) - oracle::reflection(p, f - h, z0)) / (2.0 * 2.0 * pi * h);
  const double mag = std::abs(oracle::reflection(p, f, z0));
  return 2.0 * pi * f * std::abs(ds) / (1.0 - mag * mag);
}

inline double keff2(double fs, double fp) { return pi * pi / 8.0 * (fp * fp / (fs * fs) - 1.0); }

inline double lerp_table(double x, const std::vector<double>& xs, const std::vector<double>& vs) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (x >= xs[i] && x <= xs[i + 1]) {
      const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
      return vs[i] * (1.0 - t) + vs[i + 1] * t;
    }
  }
  return std::nan("");
}

}  // namespace oracle

namespace support {

/// Element set built directly from (f_s, C_m/C_0, Q_m, C_0).
inline resokit::MbvdParams resonator(double f_s, double ratio, double q_m, double c_0, double r_s,
                                     double r_0) {
  const double w = 2.0 * oracle::pi * f_s;
  resokit::MbvdParams p;
  p.c_0 = c_0;
  p.c_m = ratio * c_0;
  p.l_m = 1.0 / (w * w * p.c_m);
  p.r_m = w * p.l_m / q_m;
  p.r_s = r_s;
  p.r_0 = r_0;
  return p;
}

/// Device-A-like set: f_s 9.05 GHz, C_m/C_0 = 0.1216, Q_m = 213, C_0 = 100 fF.
inline resokit::MbvdParams device_a(double r_s = 0.2, double r_0 = 1.0) {
  return resonator(9.05e9, 0.1216, 213.0, 100e-15, r_s, r_0);
}

inline resokit::MbvdParams lossless(double f_s, double ratio, double c_0 = 100e-15) {
  auto p = resonator(f_s, ratio, 1.0, c_0, 0.0, 0.0);
  p.r_m = 0.0;
  return p;
}

inline std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return g;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("resokit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
