#pragma once

#include <complex>
#include <numbers>
#include <span>

namespace resokit {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Closed frequency interval in Hz.
struct FrequencyBand {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double f) const { return f >= lo && f <= hi; }
};

/// Throws InvalidArgument unless lo < hi and both are finite.
void validate_band(const FrequencyBand& band);

/// Throws unless the grid has >= 2 finite, positive, strictly increasing entries.
void validate_frequency_grid(std::span<const double> frequencies);

}  // namespace resokit
