#pragma once

// One-port Touchstone v1 (.s1p) reader and writer.

#include "resokit/types.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace resokit {

enum class FrequencyUnit { Hz, kHz, MHz, GHz };
enum class ValueFormat { RI, MA, DB };

double unit_scale(FrequencyUnit unit);
std::string_view to_string(FrequencyUnit unit);
std::string_view to_string(ValueFormat format);
/// Case-insensitive; nullopt for anything else.
std::optional<FrequencyUnit> parse_frequency_unit(std::string_view token);
std::optional<ValueFormat> parse_value_format(std::string_view token);

/// Option-line contents. Only S parameters are supported.
struct TouchstoneFormat {
  FrequencyUnit frequency_unit = FrequencyUnit::GHz;
  ValueFormat value_format = ValueFormat::MA;
  double reference_resistance = 50.0;

  bool operator==(const TouchstoneFormat&) const = default;
};

/// Measured (or synthesized) one-port reflection trace.
///
/// Invariants, checked on construction: at least two samples, frequencies
/// strictly increasing and positive, one S11 value per frequency, z0 > 0.
class OnePortTrace {
public:
  OnePortTrace(std::vector<double> frequencies_hz, std::vector<Complex> s11, double z0);

  std::span<const double> frequencies() const { return frequencies_; }
  std::span<const Complex> s11() const { return s11_; }
  double z0() const { return z0_; }
  std::size_t size() const { return frequencies_.size(); }

private:
  std::vector<double> frequencies_;
  std::vector<Complex> s11_;
  double z0_;
};

struct TouchstoneFile {
  OnePortTrace trace;
  TouchstoneFormat format;
  /// '!' comment lines without the leading '!', in file order.
  std::vector<std::string> comments;
};

TouchstoneFile parse_touchstone(std::string_view text);

/// Emits comments, the option line and one data row per sample, LF line endings.
/// format.reference_resistance must equal trace.z0().
std::string write_touchstone(const OnePortTrace& trace, const TouchstoneFormat& format,
                             std::span<const std::string> comments = {});

TouchstoneFile read_touchstone_file(const std::filesystem::path& path);
void write_touchstone_file(const std::filesystem::path& path, const OnePortTrace& trace,
                           const TouchstoneFormat& format,
                           std::span<const std::string> comments = {});

}  // namespace resokit
