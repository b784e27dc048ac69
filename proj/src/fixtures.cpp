#include "resokit/fixtures.hpp"

#include "resokit/error.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace resokit {

const std::vector<DeviceRecord>& published_devices() {
  static const std::vector<DeviceRecord> devices = {
      {"A", 400e-9, 1.75, 0.7, 9.05e9, 0.15, 213, 32},
      {"B", 360e-9, 1.94, 0.5, 10.25e9, 0.11, 172, 19},
      {"C", 324e-9, 2.16, 0.5, 10.89e9, 0.13, 126, 16},
      {"D", 296e-9, 2.36, 0.5, 11.77e9, 0.09, 111, 10},
      {"E", 240e-9, 2.92, 0.5, 13.37e9, 0.07, 58, 4},
      {"F", 400e-9, 1.75, 0.5, 9.34e9, 0.16, 99, 16},
  };
  return devices;
}

DeviceFixture make_device_fixture(const DeviceRecord& record, const FixtureSpec& spec) {
  constexpr double kPi2Over8 = std::numbers::pi * std::numbers::pi / 8.0;
  constexpr int kMaxSteps = 60;
  constexpr double kTolerance = 1e-4;

  DeviceFixture fx;
  fx.record = record;
  fx.grid = linear_grid(spec.span_lo * record.f_s, spec.span_hi * record.f_s, spec.points);

  // Loss pulls the admittance extrema apart and shifts them, so the nominal
  // values are corrected until the extracted ones hit the record.
  double f_s = record.f_s;
  double ratio = record.keff2 / kPi2Over8;
  double q_m = record.q_max;
  for (int step = 0; step < kMaxSteps; ++step) {
    fx.params = params_from_resonance(f_s, ratio, q_m, spec.c_0, spec.r_s, spec.r_0);
    fx.report = full_extraction(synthesize_s11(fx.params, fx.grid, spec.z0));
    const double e_f = fx.report.f_s / record.f_s;
    const double e_k = fx.report.keff2 / record.keff2;
    const double e_q = fx.report.q_max / record.q_max;
    if (std::abs(e_f - 1.0) <= kTolerance * 0.01 && std::abs(e_k - 1.0) <= kTolerance &&
        std::abs(e_q - 1.0) <= kTolerance) {
      fx.report.device = record.name;
      fx.report.lambda_m = record.lambda_m;
      return fx;
    }
    f_s /= e_f;
    ratio /= e_k;
    q_m /= e_q;
  }
  throw Error(ErrorKind::DomainError,
              fmt::format("could not tune device {} to Q_max {}", record.name, record.q_max));
}

}  // namespace resokit
