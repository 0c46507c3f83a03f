#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpvsoil {

enum class ErrorKind {
  // input errors (exit status 1)
  FileNotFound,
  ParseError,
  InvalidArgument,
  InvalidSpectrum,
  UnitMismatch,
  BandCoverage,
  MissingReferenceSpectrum,
  ReferenceCurrentMismatch,
  IncompleteReplicates,
  NoWeeksFound,
  EmptyScenario,
  LengthMismatch,
  // computation errors (exit status 2)
  GridOutOfSupport,
  BandOutOfSupport,
  NoOverlap,
  ControlBelowFloor,
  NoEligibleJunction,
  UnknownJunction,
  ZeroCleanCurrent,
  ZeroDenominator,
  ZeroCurrent,
  NoIrradianceRecords,
  NoSpectralRecords,
  NoClearDay,
  ZeroMeasured,
  ZeroVariance,
  TooFewPoints,
  DegenerateX,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds caused by bad inputs rather than by the numerics.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace cpvsoil
