#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resokit {

enum class ErrorKind {
  // touchstone
  MalformedOptionLine,
  UnsupportedFile,
  NonMonotonicFrequency,
  WrongColumnCount,
  EmptyData,
  // network
  SingularReflection,
  TooFewPoints,
  DegenerateLocus,
  // extract
  ResonanceNotBracketed,
  DomainError,
  EmptyBand,
  // fit
  NegativeStaticCapacitance,
  NonFiniteResidual,
  // design
  OutOfTableRange,
  TargetOutOfRange,
  // shared
  InvalidArgument,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace resokit
