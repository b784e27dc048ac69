#pragma once

// Synthetic stand-ins for the six fabricated resonators: published per-device
// numbers plus mBVD element sets whose extracted metrics reproduce them.

#include "resokit/extract.hpp"
#include "resokit/mbvd.hpp"

#include <string>
#include <vector>

namespace resokit {

/// One published row of the device summary.
struct DeviceRecord {
  std::string name;
  double lambda_m = 0.0;
  double h_ln_over_lambda = 0.0;
  double duty = 0.5;
  double f_s = 0.0;   ///< [Hz]
  double keff2 = 0.0; ///< fraction
  double q_max = 0.0;
  double fom = 0.0;
};

/// Devices A-F in published order.
const std::vector<DeviceRecord>& published_devices();

struct FixtureSpec {
  double c_0 = 100e-15;
  double r_s = 0.2;
  double r_0 = 1.0;
  std::size_t points = 4001;
  /// Sweep span as multiples of f_s.
  double span_lo = 0.85;
  double span_hi = 1.25;
  double z0 = 50.0;
};

struct DeviceFixture {
  DeviceRecord record;
  MbvdParams params;
  std::vector<double> grid;
  /// Pipeline result on the synthesized trace.
  ExtractionReport report;
};

/// Element values tuned so that full_extraction of the synthesized trace
/// returns the record's f_s (1e-6 relative), k_eff2 and Q_max (1e-4 relative).
DeviceFixture make_device_fixture(const DeviceRecord& record, const FixtureSpec& spec = {});

}  // namespace resokit
