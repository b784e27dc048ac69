// One line per acceptance criterion; exit status is the number of failures.

#include "resokit/design.hpp"
#include "resokit/extract.hpp"
#include "resokit/fit.hpp"
#include "resokit/mbvd.hpp"
#include "resokit/network.hpp"
#include "resokit/touchstone.hpp"
#include "../support.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <functional>

using namespace resokit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, std::string_view title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("[{}] {} {} ({:.0f} ms): {}\n", o.pass ? "PASS" : "FAIL", id, title, ms, o.detail);
  std::fflush(stdout);
}

double element(const MbvdParams& p, int k) {
  const double v[] = {p.r_s, p.r_0, p.r_m, p.l_m, p.c_m, p.c_0};
  return v[k];
}

Outcome fom_closure() {
  struct Row { const char* name; double k, q, fom; };
  const Row rows[] = {{"A", 0.15, 213, 32}, {"B", 0.11, 172, 19}, {"C", 0.13, 126, 16},
                      {"D", 0.09, 111, 10}, {"E", 0.07, 58, 4},   {"F", 0.16, 99, 16}};
  Outcome o;
  for (const auto& r : rows) {
    const double f = fom(r.k, r.q);
    const bool ok = std::abs(f - r.fom) <= 0.5;
    o.pass = o.pass && ok;
    o.detail += fmt::format("{}={:.2f}{} ", r.name, f, ok ? "" : "!");
  }
  o.detail += "(tol +/-0.5)";
  return o;
}

Outcome dispersion_monotone() {
  const auto m = builtin_dispersion_table().subfamily(kMeasuredFamily, 0.5);
  const double expected[] = {3736, 3690, 3528, 3484, 3209};
  Outcome o;
  o.pass = m.size() == 5;
  for (std::size_t i = 0; i < m.size() && i < 5; ++i) {
    o.pass = o.pass && m[i].v_p == expected[i] && (i == 0 || m[i].v_p < m[i - 1].v_p);
    o.detail += fmt::format("{}{}", i ? " > " : "", m[i].v_p);
  }
  o.detail += " m/s (exact)";
  return o;
}

Outcome scaling_inverse() {
  const auto t = builtin_dispersion_table();
  const double e = scale_to_frequency(13.37e9, 0.7e-6, t, kMeasuredFamily);
  const double f = scale_to_frequency(9.34e9, 0.7e-6, t, kMeasuredFamily);
  const double de = support::rel(e, 240e-9);
  const double df = support::rel(f, 400e-9);
  return {de <= 5e-3 && df <= 5e-3,
          fmt::format("13.37 GHz -> {:.2f} nm ({:.3f}%), 9.34 GHz -> {:.2f} nm ({:.3f}%) (tol 0.5%)",
                      e * 1e9, de * 100, f * 1e9, df * 100)};
}

Outcome round_trip() {
  const auto p = support::resonator(9.05e9, 0.1216, 213.0, 100e-15, 0.2, 1.0);
  const auto y_grid = support::grid(8.5e9, 10.5e9, 4001);
  const auto r = full_extraction(synthesize_s11(p, y_grid, 50.0));
  const double e_fs = support::rel(r.f_s, 9.05e9);
  const double e_k = std::abs(r.keff2 - 0.15) * 100.0;
  const double e_q = support::rel(r.q_max, 213.0);

  const auto y = synthesize_admittance(p, y_grid);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  double worst = 0.0;
  const int trials = 10;
  for (int trial = 0; trial < trials; ++trial) {
    MbvdParams init{p.r_s * (1 + u(rng)), p.r_0 * (1 + u(rng)), p.r_m * (1 + u(rng)),
                    p.l_m * (1 + u(rng)), p.c_m * (1 + u(rng)), p.c_0 * (1 + u(rng))};
    const auto fit = fit_mbvd(y, init);
    for (int k = 0; k < 6; ++k) {
      worst = std::max(worst, support::rel(element(fit.params, k), element(p, k)));
    }
  }
  return {e_fs <= 5e-4 && e_k <= 0.3 && e_q <= 0.10 && worst <= 0.01,
          fmt::format("f_s err {:.4f}% (tol 0.05%), k_eff2 {:.3f}% err {:.3f} pt (tol 0.3), "
                      "Q_max {:.1f} err {:.2f}% (tol 10%), fit worst element err {:.2e} over {} "
                      "starts (tol 1%)",
                      e_fs * 100, r.keff2 * 100, e_k, r.q_max, e_q * 100, worst, trials)};
}

Outcome coupling_identity() {
  Outcome o;
  for (double ratio : {0.01, 0.05, 0.1216, 0.3}) {
    const auto p = support::lossless(9.05e9, ratio);
    const auto g = support::grid(0.9 * derived_fs(p), 1.1 * derived_fp(p), 4001);
    const auto pair = find_fs_fp(synthesize_admittance(p, g));
    const double err = support::rel(keff2(pair.f_s, pair.f_p), oracle::pi * oracle::pi / 8 * ratio);
    o.pass = o.pass && err <= 5e-3;
    o.detail += fmt::format("{}: {:.3e} ", ratio, err);
  }
  o.detail += "(tol 0.5% rel)";
  return o;
}

Outcome bode_guards() {
  const auto g = support::grid(8.5e9, 10.5e9, 4001);
  const auto lossless = bode_q(synthesize_s11(support::lossless(9.05e9, 0.1216), g, 50.0));
  const bool empty = lossless.points.empty() && lossless.flagged.size() == g.size();

  const auto p = support::resonator(9.05e9, 0.1216, 213.0, 100e-15, 0.2, 1.0);
  const auto t = synthesize_s11(p, g, 50.0);
  std::vector<double> scaled(g);
  for (auto& f : scaled) f *= 2.0;
  const auto a = bode_q(t);
  const auto b = bode_q(OnePortTrace(scaled, {t.s11().begin(), t.s11().end()}, 50.0));
  double scale_err = a.points.size() == b.points.size() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < std::min(a.points.size(), b.points.size()); ++i) {
    scale_err = std::max(scale_err, support::rel(b.points[i].q, a.points[i].q));
  }

  const double q1 = full_extraction(t).q_max;
  const double q2 = full_extraction(synthesize_s11(p, support::grid(8.5e9, 10.5e9, 8001), 50.0)).q_max;
  const double dq = support::rel(q2, q1);
  return {empty && scale_err <= 1e-10 && dq < 0.01,
          fmt::format("lossless: {} of {} flagged, {} values; rescale err {:.1e} (tol 1e-10); "
                      "grid doubling dQ {:.2e} (tol 1%)",
                      lossless.flagged.size(), g.size(), lossless.points.size(), scale_err, dq)};
}

Outcome z0_invariance() {
  const auto p = support::resonator(9.05e9, 0.1216, 213.0, 100e-15, 0.2, 1.0);
  const auto t = synthesize_s11(p, support::grid(8.5e9, 10.5e9, 4001), 50.0);
  const auto ref = full_extraction(t);
  double worst = 0.0;
  for (double z : {25.0, 50.0, 75.0, 200.0}) {
    const auto r = full_extraction(renormalize(t, z));
    worst = std::max({worst, support::rel(r.f_s, ref.f_s), support::rel(r.f_p, ref.f_p),
                      support::rel(r.keff2, ref.keff2), support::rel(r.y_ratio, ref.y_ratio)});
  }
  return {worst <= 1e-6, fmt::format("worst relative change {:.2e} over 25/50/75/200 ohm (tol 1e-6)",
                                     worst)};
}

Outcome parser_round_trip() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> count(2, 80);
  std::uniform_real_distribution<double> step(1.0, 1e8);
  std::uniform_real_distribution<double> start(1.0, 5e10);
  std::uniform_real_distribution<double> mag(1e-6, 1.0);
  std::uniform_real_distribution<double> phase(-oracle::pi, oracle::pi);
  const FrequencyUnit units[] = {FrequencyUnit::Hz, FrequencyUnit::kHz, FrequencyUnit::MHz,
                                 FrequencyUnit::GHz};
  const ValueFormat formats[] = {ValueFormat::RI, ValueFormat::MA, ValueFormat::DB};
  int cases = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    for (auto unit : units) {
      for (auto vf : formats) {
        const int n = count(rng);
        std::vector<double> f(n);
        std::vector<Complex> s(n);
        f[0] = start(rng);
        for (int i = 1; i < n; ++i) f[i] = f[i - 1] + step(rng);
        for (auto& v : s) v = std::polar(mag(rng), phase(rng));
        const OnePortTrace trace(f, s, 50.0);
        const auto back = parse_touchstone(write_touchstone(trace, {unit, vf, 50.0})).trace;
        for (int i = 0; i < n; ++i) {
          worst = std::max({worst, support::rel(back.frequencies()[i], f[i]),
                            std::abs(back.s11()[i] - s[i]) / std::abs(s[i])});
        }
        ++cases;
      }
    }
  }
  return {cases >= 100 && worst <= 1e-9,
          fmt::format("{} cases over 12 format/unit pairs, worst relative error {:.2e} (tol 1e-9)",
                      cases, worst)};
}

}  // namespace

int main() {
  criterion(1, "Table FoM closure", fom_closure);
  criterion(2, "Measured dispersion monotone", dispersion_monotone);
  criterion(3, "Scaling inverse", scaling_inverse);
  criterion(4, "mBVD round trip", round_trip);
  criterion(5, "Lossless coupling identity", coupling_identity);
  criterion(6, "Bode-Q guards and invariances", bode_guards);
  criterion(7, "Reference-impedance invariance", z0_invariance);
  criterion(8, "Touchstone round trip", parser_round_trip);
  fmt::print("{} of 8 criteria passed\n", 8 - failures);
  return failures;
}
