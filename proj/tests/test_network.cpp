#include "resokit/error.hpp"
#include "resokit/extract.hpp"
#include "resokit/mbvd.hpp"
#include "resokit/network.hpp"
#include "support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace resokit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OnePortTrace circle_trace(Complex center, double radius, std::size_t n, double z0 = 50.0) {
  std::vector<double> f(n);
  std::vector<Complex> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = 1e9 + 1e6 * double(i);
    s[i] = center + std::polar(radius, 2.0 * oracle::pi * double(i) / double(n));
  }
  return OnePortTrace(f, s, z0);
}

OnePortTrace device_a_trace(double z0 = 50.0) {
  return synthesize_s11(support::device_a(), support::grid(8.5e9, 10.5e9, 4001), z0);
}

}  // namespace

TEST_CASE("network: S to Y reference cases", "[network]") {
  const OnePortTrace t({1e9, 2e9, 3e9}, {Complex(0, 0), Complex(1, 0), Complex(0.5, 0)}, 50.0);
  const auto y = s_to_y(t);
  CHECK_THAT(y.y()[0].real(), WithinRel(0.02, 1e-15));
  CHECK(std::abs(y.y()[1]) == 0.0);
  CHECK_THAT(y.y()[2].real(), WithinRel(1.0 / 150.0, 1e-15));
}

TEST_CASE("network: S = -1 is singular", "[network]") {
  const OnePortTrace t({1e9, 2e9}, {Complex(0, 0), Complex(-1, 0)}, 50.0);
  try {
    s_to_y(t);
    FAIL("expected SingularReflection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularReflection);
  }
}

TEST_CASE("network: Y to S reference cases and inverse pair", "[network]") {
  const AdmittanceTrace y({1e9, 2e9}, {Complex(0.02, 0), Complex(0, 0)});
  const auto s = y_to_s(y, 50.0);
  CHECK_THAT(std::abs(s.s11()[0]), WithinAbs(0.0, 1e-15));
  CHECK(s.s11()[1] == Complex(1.0, 0.0));
  CHECK_THROWS_AS(y_to_s(y, 0.0), Error);

  const auto t = device_a_trace();
  const auto back = y_to_s(s_to_y(t), t.z0());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(back.s11()[i] - t.s11()[i]) <= 1e-12 * std::abs(t.s11()[i]));
  }
}

TEST_CASE("network: renormalization", "[network]") {
  SECTION("same z0 is the identity") {
    const auto t = device_a_trace();
    const auto r = renormalize(t, 50.0);
    CHECK(std::equal(r.s11().begin(), r.s11().end(), t.s11().begin()));
  }
  SECTION("matched 50 ohm load seen from 100 ohm") {
    const OnePortTrace t({1e9, 2e9}, {Complex{}, Complex{}}, 50.0);
    const auto r = renormalize(t, 100.0);
    CHECK_THAT(r.s11()[0].real(), WithinAbs(-1.0 / 3.0, 1e-15));
    CHECK(r.z0() == 100.0);
  }
  SECTION("round trip through 75 ohm") {
    const auto t = device_a_trace();
    const auto back = renormalize(renormalize(t, 75.0), t.z0());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(std::abs(back.s11()[i] - t.s11()[i]) <= 1e-12 * std::abs(t.s11()[i]));
    }
  }
  SECTION("admittance is invariant") {
    const auto t = device_a_trace();
    const auto y = s_to_y(t);
    for (double z : {10.0, 50.0, 75.0, 200.0}) {
      const auto yz = s_to_y(renormalize(t, z));
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(yz.y()[i] - y.y()[i]) <= 1e-10 * std::abs(y.y()[i]));
      }
    }
  }
  SECTION("passivity is preserved") {
    const auto t = device_a_trace();
    for (double z : {1.0, 10.0, 333.0, 5000.0}) {
      const auto moved = renormalize(t, z);
      for (const auto& s : moved.s11()) CHECK(std::abs(s) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("network: passivity violations are counted, not fatal", "[network]") {
  const AdmittanceTrace y({1e9, 2e9, 3e9}, {Complex(-1e-3, 0), Complex(-1e-7, 0), Complex(1, 0)});
  CHECK(y.passivity_violations() == 1);
  const OnePortTrace active({1e9, 2e9}, {Complex(1.5, 0), Complex(0.1, 0)}, 50.0);
  CHECK_NOTHROW(s_to_y(active));
}

TEST_CASE("network: circle fit", "[network]") {
  SECTION("exact circle") {
    const auto c = fit_smith_circle(circle_trace({0.2, 0.1}, 0.3, 12), {0.5e9, 2e9});
    CHECK_THAT(c.center.real(), WithinAbs(0.2, 1e-10));
    CHECK_THAT(c.center.imag(), WithinAbs(0.1, 1e-10));
    CHECK_THAT(c.radius, WithinAbs(0.3, 1e-10));
    CHECK(c.rms_residual <= 1e-10);
  }
  SECTION("arc of a circle") {
    std::vector<Complex> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(Complex(-0.4, 0.3) + std::polar(0.55, 0.05 * i));
    const auto c = fit_circle(pts);
    CHECK_THAT(c.center.real(), WithinAbs(-0.4, 1e-9));
    CHECK_THAT(c.center.imag(), WithinAbs(0.3, 1e-9));
    CHECK_THAT(c.radius, WithinAbs(0.55, 1e-9));
  }
  SECTION("degenerate inputs") {
    const std::vector<Complex> same(8, Complex(0.3, 0.3));
    std::vector<Complex> line;
    for (int i = 0; i < 8; ++i) line.emplace_back(0.1 * i, 0.05 * i);
    auto kind = [](std::span<const Complex> pts) {
      try {
        fit_circle(pts);
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::InvalidArgument;
    };
    CHECK(kind(same) == ErrorKind::DegenerateLocus);
    CHECK(kind(line) == ErrorKind::DegenerateLocus);
    CHECK(kind(std::vector<Complex>(same.begin(), same.begin() + 4)) == ErrorKind::TooFewPoints);
  }
  SECTION("band with too few samples") {
    CHECK_THROWS_AS(fit_smith_circle(circle_trace({0, 0}, 0.5, 40), {1.0e9, 1.0035e9}), Error);
  }
  SECTION("mBVD locus near resonance is close to a circle") {
    const auto p = support::device_a();
    const auto t = device_a_trace();
    const auto c =
        fit_smith_circle(t, {0.95 * derived_fs(p), 1.05 * derived_fp(p)});
    CHECK(c.rms_residual < 0.05 * c.radius);
  }
}

TEST_CASE("network: source impedance tuning", "[network]") {
  SECTION("a circle centred at the origin stays at 50 ohm") {
    const auto tuned = tune_source_impedance(circle_trace({0, 0}, 0.5, 50), {0.5e9, 2e9});
    CHECK_THAT(tuned.z0_star, WithinAbs(50.0, 0.1));
    // A z0 error of dz moves the centre by roughly dz / (2 * 50).
    CHECK_THAT(std::abs(tuned.circle.center), WithinAbs(0.0, TuneOptions{}.resolution / 50.0));
  }
  SECTION("optimum does not depend on the label of the input reference") {
    const auto t = device_a_trace();
    const FrequencyBand band{0.98 * 9.05e9, 1.02 * 9.586e9};
    const auto a = tune_source_impedance(t, band);
    const auto b = tune_source_impedance(renormalize(t, 200.0), band);
    CHECK_THAT(a.z0_star, WithinAbs(b.z0_star, 0.1));
  }
  SECTION("Device-A-like resonator") {
    const auto p = support::device_a();
    const auto t = device_a_trace();
    const auto pair = find_fs_fp(s_to_y(t));
    const FrequencyBand band{0.98 * pair.f_s, 1.02 * pair.f_p};
    const auto before = fit_smith_circle(t, band);
    const auto tuned = tune_source_impedance(t, band);
    CHECK(std::abs(tuned.circle.center) < std::abs(before.center));
    CHECK(tuned.tuned.z0() == tuned.z0_star);
    // Static-capacitor reactance at f_s is the scale of the optimum.
    const double x_c0 = 1.0 / (2.0 * oracle::pi * derived_fs(p) * p.c_0);
    CHECK(support::rel(tuned.z0_star, x_c0) < 0.2);
    // Frozen from this search on this grid.
    CHECK_THAT(tuned.z0_star, WithinAbs(157.5968, 0.1));
    // The search result beats its neighbours.
    for (double dz : {-1.0, 1.0}) {
      const auto c = fit_smith_circle(renormalize(t, tuned.z0_star + dz), band);
      CHECK(std::abs(c.center) >= std::abs(tuned.circle.center) - 1e-9);
    }
  }
  SECTION("invalid search range") {
    TuneOptions bad;
    bad.z0_min = 10.0;
    bad.z0_max = 5.0;
    CHECK_THROWS_AS(tune_source_impedance(device_a_trace(), {9e9, 9.6e9}, bad), Error);
  }
}
