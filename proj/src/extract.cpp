#include "resokit/extract.hpp"

#include "resokit/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace resokit {

namespace {

constexpr double kFlagThreshold = 1e-6;

// Abscissa of the vertex of the parabola through three points; x1 if degenerate.
double parabola_vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
  if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2)) return x1;
  const double a = x1 - x0;
  const double b = x1 - x2;
  const double num = a * a * (y1 - y2) - b * b * (y1 - y0);
  const double den = a * (y1 - y2) - b * (y1 - y0);
  if (den == 0.0 || !std::isfinite(num / den)) return x1;
  return std::clamp(x1 - 0.5 * num / den, x0, x2);
}

double refine(std::span<const double> f, std::span<const double> v, std::size_t i) {
  return parabola_vertex(f[i - 1], f[i], f[i + 1], v[i - 1], v[i], v[i + 1]);
}

std::size_t nearest_index(std::span<const double> f, double x) {
  const auto it = std::lower_bound(f.begin(), f.end(), x);
  if (it == f.begin()) return 0;
  if (it == f.end()) return f.size() - 1;
  const auto i = static_cast<std::size_t>(it - f.begin());
  return (x - f[i - 1] <= f[i] - x) ? i - 1 : i;
}

std::string fmt6(double v) { return fmt::format("{:.6g}", v); }

}  // namespace

ResonancePair find_fs_fp(const AdmittanceTrace& y) {
  const auto f = y.frequencies();
  const std::size_t n = y.size();
  std::vector<double> log_mag(n);
  for (std::size_t i = 0; i < n; ++i) log_mag[i] = std::log(std::abs(y.y()[i]));

  const auto i_s = static_cast<std::size_t>(
      std::max_element(log_mag.begin(), log_mag.end()) - log_mag.begin());
  if (i_s == 0 || i_s + 1 >= n) {
    throw Error(ErrorKind::ResonanceNotBracketed,
                "resonance not bracketed: |Y| maximum lies on the sweep edge");
  }
  const auto i_p = static_cast<std::size_t>(
      std::min_element(log_mag.begin() + static_cast<std::ptrdiff_t>(i_s) + 1, log_mag.end()) -
      log_mag.begin());
  if (i_p + 1 >= n) {
    throw Error(ErrorKind::ResonanceNotBracketed,
                "resonance not bracketed: no |Y| minimum above the series resonance");
  }

  std::vector<double> neg(log_mag.size());
  std::transform(log_mag.begin(), log_mag.end(), neg.begin(), [](double v) { return -v; });
  return {refine(f, neg, i_s), refine(f, log_mag, i_p)};
}

double keff2(double f_s, double f_p) {
  if (!(f_s > 0.0) || !(f_p >= f_s)) {
    throw Error(ErrorKind::DomainError,
                fmt::format("keff2 needs f_p >= f_s > 0 (got f_s = {}, f_p = {})", f_s, f_p));
  }
  return std::numbers::pi * std::numbers::pi / 8.0 * (f_p * f_p - f_s * f_s) / (f_s * f_s);
}

AdmittanceRatio admittance_ratio(const AdmittanceTrace& y, double f_s, double f_p) {
  const auto f = y.frequencies();
  for (double x : {f_s, f_p}) {
    if (!(x >= f.front() && x <= f.back())) {
      throw Error(ErrorKind::DomainError,
                  fmt::format("{} Hz lies outside the trace span [{}, {}]", x, f.front(),
                              f.back()));
    }
  }
  const double ys = std::abs(y.y()[nearest_index(f, f_s)]);
  const double yp = std::abs(y.y()[nearest_index(f, f_p)]);
  AdmittanceRatio r;
  r.linear = ys / yp;
  r.db = 20.0 * std::log10(r.linear);
  return r;
}

BodeQCurve bode_q(const OnePortTrace& trace) {
  const std::size_t n = trace.size();
  if (n < 3) {
    throw Error(ErrorKind::TooFewPoints, fmt::format("Bode-Q needs >= 3 samples, got {}", n));
  }
  const auto f = trace.frequencies();
  const auto s = trace.s11();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = kTwoPi * f[i];

  BodeQCurve curve;
  curve.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex ds;
    if (i == 0) {
      ds = (s[1] - s[0]) / (w[1] - w[0]);
    } else if (i + 1 == n) {
      ds = (s[i] - s[i - 1]) / (w[i] - w[i - 1]);
    } else {
      const double h1 = w[i] - w[i - 1];
      const double h2 = w[i + 1] - w[i];
      ds = (h1 * h1 * s[i + 1] - h2 * h2 * s[i - 1] + (h2 * h2 - h1 * h1) * s[i]) /
           (h1 * h2 * (h1 + h2));
    }
    const double den = 1.0 - std::norm(s[i]);
    if (den < kFlagThreshold) {
      curve.flagged.push_back(f[i]);
      continue;
    }
    curve.points.push_back({f[i], w[i] * std::abs(ds) / den});
  }
  return curve;
}

OnePortTrace smooth_trace(const OnePortTrace& trace, std::size_t half_window) {
  if (half_window == 0) return trace;
  const std::size_t n = trace.size();
  const std::size_t width = std::min(2 * half_window + 1, n);
  if (width < 3) return trace;
  const auto f = trace.frequencies();
  const auto s = trace.s11();

  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Window of fixed width, shifted inward at the edges.
    std::size_t start = i >= half_window ? i - half_window : 0;
    start = std::min(start, n - width);
    const double scale = f[start + width - 1] - f[start];
    Eigen::MatrixXd a(static_cast<Eigen::Index>(width), 3);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(width), 2);
    for (std::size_t k = 0; k < width; ++k) {
      const double x = (f[start + k] - f[i]) / scale;
      const auto row = static_cast<Eigen::Index>(k);
      a(row, 0) = 1.0;
      a(row, 1) = x;
      a(row, 2) = x * x;
      b(row, 0) = s[start + k].real();
      b(row, 1) = s[start + k].imag();
    }
    const Eigen::MatrixXd coef = a.colPivHouseholderQr().solve(b);
    out[i] = {coef(0, 0), coef(0, 1)};
  }
  return OnePortTrace({f.begin(), f.end()}, std::move(out), trace.z0());
}

double q_max(const BodeQCurve& curve, const FrequencyBand& band) {
  bool found = false;
  double best = 0.0;
  for (const auto& p : curve.points) {
    if (band.contains(p.frequency) && (!found || p.q > best)) {
      best = p.q;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::EmptyBand,
                fmt::format("no unflagged Bode-Q sample in [{}, {}] Hz", band.lo, band.hi));
  }
  return best;
}

double fom(double keff2, double q_max) {
  if (keff2 < 0.0 || q_max < 0.0) {
    throw Error(ErrorKind::DomainError, "FoM inputs must be non-negative");
  }
  return keff2 * q_max;
}

ExtractionReport full_extraction(const OnePortTrace& trace, const ExtractionOptions& options) {
  const AdmittanceTrace y = s_to_y(trace);
  const ResonancePair res = find_fs_fp(y);

  ExtractionReport report;
  report.f_s = res.f_s;
  report.f_p = res.f_p;
  report.keff2 = keff2(res.f_s, res.f_p);
  if (!(report.f_p > report.f_s) || report.keff2 >= 1.0) {
    throw Error(ErrorKind::DomainError,
                fmt::format("implausible resonance pair f_s = {} Hz, f_p = {} Hz", res.f_s,
                            res.f_p));
  }
  const AdmittanceRatio yr = admittance_ratio(y, res.f_s, res.f_p);
  report.y_ratio = yr.linear;
  report.y_ratio_db = yr.db;

  report.fit_band = options.fit_band.value_or(FrequencyBand{0.98 * res.f_s, 1.02 * res.f_p});
  report.q_band = options.q_band.value_or(FrequencyBand{0.9 * res.f_s, 1.1 * res.f_p});
  validate_band(report.q_band);

  TunedTrace tuned = tune_source_impedance(trace, report.fit_band, options.tune);
  report.z0_input = trace.z0();
  report.z0_star = tuned.z0_star;
  report.tuned_circle = tuned.circle;

  report.q_bode = bode_q(options.smoothing_half_window > 0
                             ? smooth_trace(tuned.tuned, options.smoothing_half_window)
                             : tuned.tuned);
  report.q_max = q_max(report.q_bode, report.q_band);
  report.fom = fom(report.keff2, report.q_max);
  return report;
}

std::string report_csv_header() { return "device,lambda_nm,f_s_GHz,keff2_pct,q_max,fom"; }

std::string report_csv_row(const ExtractionReport& report) {
  const std::string lambda = report.lambda_m ? fmt6(*report.lambda_m * 1e9) : std::string{};
  return fmt::format("{},{},{},{},{},{}", detail::csv_field(report.device), lambda, fmt6(report.f_s / 1e9),
                     fmt6(report.keff2 * 100.0), fmt6(report.q_max), fmt6(report.fom));
}

}  // namespace resokit
