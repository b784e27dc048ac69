#include "resokit/error.hpp"
#include "resokit/types.hpp"

#include <cmath>
#include <fmt/format.h>

namespace resokit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedOptionLine: return "malformed option line";
    case ErrorKind::UnsupportedFile: return "unsupported file";
    case ErrorKind::NonMonotonicFrequency: return "non-monotonic frequency";
    case ErrorKind::WrongColumnCount: return "wrong column count";
    case ErrorKind::EmptyData: return "empty data";
    case ErrorKind::SingularReflection: return "singular reflection";
    case ErrorKind::TooFewPoints: return "too few points";
    case ErrorKind::DegenerateLocus: return "degenerate locus";
    case ErrorKind::ResonanceNotBracketed: return "resonance not bracketed";
    case ErrorKind::DomainError: return "domain error";
    case ErrorKind::EmptyBand: return "empty band";
    case ErrorKind::NegativeStaticCapacitance: return "negative static capacitance";
    case ErrorKind::NonFiniteResidual: return "non-finite residual";
    case ErrorKind::OutOfTableRange: return "out of table range";
    case ErrorKind::TargetOutOfRange: return "target out of range";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::SchemaError: return "schema error";
    case ErrorKind::IoError: return "I/O error";
  }
  return "unknown error";
}

void validate_band(const FrequencyBand& band) {
  if (!std::isfinite(band.lo) || !std::isfinite(band.hi) || !(band.lo < band.hi)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("invalid band [{}, {}]: need lo < hi", band.lo, band.hi));
  }
}

void validate_frequency_grid(std::span<const double> frequencies) {
  if (frequencies.size() < 2) {
    throw Error(ErrorKind::EmptyData,
                fmt::format("frequency grid needs at least 2 samples, got {}", frequencies.size()));
  }
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double f = frequencies[i];
    if (!std::isfinite(f) || f <= 0.0) {
      throw Error(ErrorKind::NonMonotonicFrequency,
                  fmt::format("frequency #{} = {} Hz is not a positive finite value", i, f));
    }
    if (i > 0 && !(f > frequencies[i - 1])) {
      throw Error(ErrorKind::NonMonotonicFrequency,
                  fmt::format("frequency #{} = {} Hz does not exceed previous {} Hz", i, f,
                              frequencies[i - 1]));
    }
  }
}

}  // namespace resokit
