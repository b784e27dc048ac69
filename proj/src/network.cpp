#include "resokit/network.hpp"

#include "resokit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace resokit {

namespace {

constexpr double kSingularTol = 1e-12;
constexpr double kCollinearTol = 1e-12;

std::vector<Complex> band_points(const OnePortTrace& trace, const FrequencyBand& band) {
  std::vector<Complex> pts;
  const auto f = trace.frequencies();
  const auto s = trace.s11();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (band.contains(f[i])) pts.push_back(s[i]);
  }
  return pts;
}

// Circle-center distance from the origin for the band admittances seen at z0.
double center_offset(std::span<const Complex> y_band, double z0, std::vector<Complex>& scratch) {
  scratch.resize(y_band.size());
  for (std::size_t i = 0; i < y_band.size(); ++i) {
    const Complex zy = z0 * y_band[i];
    scratch[i] = (1.0 - zy) / (1.0 + zy);
  }
  return std::abs(fit_circle(scratch).center);
}

}  // namespace

AdmittanceTrace::AdmittanceTrace(std::vector<double> frequencies_hz, std::vector<Complex> y)
    : frequencies_(std::move(frequencies_hz)), y_(std::move(y)) {
  if (frequencies_.size() != y_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("{} frequencies but {} admittance samples", frequencies_.size(),
                            y_.size()));
  }
  validate_frequency_grid(frequencies_);
}

std::size_t AdmittanceTrace::passivity_violations(double eps) const {
  return static_cast<std::size_t>(
      std::count_if(y_.begin(), y_.end(), [eps](Complex v) { return v.real() < -eps; }));
}

AdmittanceTrace s_to_y(const OnePortTrace& trace) {
  const auto s = trace.s11();
  const double z0 = trace.z0();
  std::vector<Complex> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Complex den = 1.0 + s[i];
    if (std::abs(den) < kSingularTol) {
      throw Error(ErrorKind::SingularReflection,
                  fmt::format("S11 = -1 (short) at {} Hz; admittance is unbounded",
                              trace.frequencies()[i]));
    }
    y[i] = (1.0 - s[i]) / (z0 * den);
  }
  AdmittanceTrace out({trace.frequencies().begin(), trace.frequencies().end()}, std::move(y));
  if (const auto n = out.passivity_violations(); n > 0) {
    spdlog::warn("{} admittance samples have Re(Y) < -1e-6 S (non-passive data)", n);
  }
  return out;
}

OnePortTrace y_to_s(const AdmittanceTrace& trace, double z0) {
  if (!(z0 > 0.0) || !std::isfinite(z0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("z0 must be positive, got {}", z0));
  }
  const auto y = trace.y();
  std::vector<Complex> s(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::isinf(std::abs(y[i]))) {
      s[i] = -1.0;
      continue;
    }
    const Complex zy = z0 * y[i];
    s[i] = (1.0 - zy) / (1.0 + zy);
  }
  return OnePortTrace({trace.frequencies().begin(), trace.frequencies().end()}, std::move(s), z0);
}

OnePortTrace renormalize(const OnePortTrace& trace, double z0_new) {
  if (!(z0_new > 0.0) || !std::isfinite(z0_new)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("z0 must be positive, got {}", z0_new));
  }
  if (z0_new == trace.z0()) return trace;
  return y_to_s(s_to_y(trace), z0_new);
}

SmithCircle fit_circle(std::span<const Complex> points) {
  const std::size_t n = points.size();
  if (n < 5) {
    throw Error(ErrorKind::TooFewPoints,
                fmt::format("circle fit needs at least 5 points, got {}", n));
  }
  // Center the data for conditioning.
  Complex mean{};
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const Complex d = p - mean;
    sxx += d.real() * d.real();
    syy += d.imag() * d.imag();
    sxy += d.real() * d.imag();
  }
  // Smallest eigenvalue of the 2x2 scatter = mean squared distance to the best line.
  const double half_tr = 0.5 * (sxx + syy);
  const double disc = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
  const double lambda_min = std::max(half_tr - disc, 0.0) / static_cast<double>(n);
  if (std::sqrt(lambda_min) <= kCollinearTol) {
    throw Error(ErrorKind::DegenerateLocus, "points are collinear; circle radius is unbounded");
  }

  // Minimize sum (x^2 + y^2 + D x + E y + F)^2.
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Complex d = points[i] - mean;
    const auto row = static_cast<Eigen::Index>(i);
    a(row, 0) = d.real();
    a(row, 1) = d.imag();
    a(row, 2) = 1.0;
    b(row) = -(d.real() * d.real() + d.imag() * d.imag());
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Complex c_local{-0.5 * sol(0), -0.5 * sol(1)};
  const double r2 = std::norm(c_local) - sol(2);
  if (!(r2 > 0.0) || !std::isfinite(r2)) {
    throw Error(ErrorKind::DegenerateLocus, "circle fit produced a non-positive radius");
  }

  SmithCircle circle;
  circle.center = c_local + mean;
  circle.radius = std::sqrt(r2);
  double ss = 0.0;
  for (const auto& p : points) {
    const double e = std::abs(p - circle.center) - circle.radius;
    ss += e * e;
  }
  circle.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return circle;
}

SmithCircle fit_smith_circle(const OnePortTrace& trace, const FrequencyBand& band) {
  validate_band(band);
  return fit_circle(band_points(trace, band));
}

TunedTrace tune_source_impedance(const OnePortTrace& trace, const FrequencyBand& band,
                                 const TuneOptions& options) {
  validate_band(band);
  if (!(options.z0_min > 0.0) || !(options.z0_max > options.z0_min) ||
      !(options.resolution > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "invalid source-impedance search range");
  }

  const AdmittanceTrace y = s_to_y(trace);
  std::vector<Complex> y_band;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (band.contains(y.frequencies()[i])) y_band.push_back(y.y()[i]);
  }
  std::vector<Complex> scratch;
  auto objective = [&](double z0) { return center_offset(y_band, z0, scratch); };

  // Coarse log-spaced scan to bracket the minimum and check unimodality.
  constexpr int kCoarse = 64;
  std::vector<double> zs(kCoarse);
  std::vector<double> vals(kCoarse);
  const double log_lo = std::log(options.z0_min);
  const double log_hi = std::log(options.z0_max);
  for (int k = 0; k < kCoarse; ++k) {
    zs[k] = std::exp(log_lo + (log_hi - log_lo) * k / (kCoarse - 1));
    vals[k] = objective(zs[k]);
  }
  zs.front() = options.z0_min;
  zs.back() = options.z0_max;
  const auto k_min = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  bool unimodal = true;
  for (int k = 1; k <= k_min; ++k) unimodal &= vals[k] <= vals[k - 1];
  for (int k = k_min + 1; k < kCoarse; ++k) unimodal &= vals[k] >= vals[k - 1];

  double lo = 0.0;
  double hi = 0.0;
  if (unimodal) {
    lo = zs[std::max(k_min - 1, 0)];
    hi = zs[std::min(k_min + 1, kCoarse - 1)];
  } else {
    double best_z = options.z0_min;
    double best_v = std::numeric_limits<double>::infinity();
    for (double z = options.z0_min; z <= options.z0_max; z += 1.0) {
      const double v = objective(z);
      if (v < best_v) {
        best_v = v;
        best_z = z;
      }
    }
    lo = std::max(options.z0_min, best_z - 1.0);
    hi = std::min(options.z0_max, best_z + 1.0);
  }

  // Golden-section refinement.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > options.resolution) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double z_star = 0.5 * (lo + hi);
  // Keep the endpoints when the minimum sits on the search boundary.
  for (double cand : {options.z0_min, options.z0_max}) {
    if (std::abs(cand - z_star) <= options.resolution && objective(cand) < objective(z_star)) {
      z_star = cand;
    }
  }

  OnePortTrace tuned = renormalize(trace, z_star);
  const SmithCircle circle = fit_smith_circle(tuned, band);
  return TunedTrace{z_star, std::move(tuned), circle, !unimodal};
}

}  // namespace resokit
