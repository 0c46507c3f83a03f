#include "cpvsoil/error.hpp"

namespace cpvsoil {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::UnitMismatch: return "UnitMismatch";
    case ErrorKind::BandCoverage: return "BandCoverage";
    case ErrorKind::MissingReferenceSpectrum: return "MissingReferenceSpectrum";
    case ErrorKind::ReferenceCurrentMismatch: return "ReferenceCurrentMismatch";
    case ErrorKind::IncompleteReplicates: return "IncompleteReplicates";
    case ErrorKind::NoWeeksFound: return "NoWeeksFound";
    case ErrorKind::EmptyScenario: return "EmptyScenario";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::GridOutOfSupport: return "GridOutOfSupport";
    case ErrorKind::BandOutOfSupport: return "BandOutOfSupport";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::ControlBelowFloor: return "ControlBelowFloor";
    case ErrorKind::NoEligibleJunction: return "NoEligibleJunction";
    case ErrorKind::UnknownJunction: return "UnknownJunction";
    case ErrorKind::ZeroCleanCurrent: return "ZeroCleanCurrent";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::ZeroCurrent: return "ZeroCurrent";
    case ErrorKind::NoIrradianceRecords: return "NoIrradianceRecords";
    case ErrorKind::NoSpectralRecords: return "NoSpectralRecords";
    case ErrorKind::NoClearDay: return "NoClearDay";
    case ErrorKind::ZeroMeasured: return "ZeroMeasured";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateX: return "DegenerateX";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSpectrum:
    case ErrorKind::UnitMismatch:
    case ErrorKind::BandCoverage:
    case ErrorKind::MissingReferenceSpectrum:
    case ErrorKind::ReferenceCurrentMismatch:
    case ErrorKind::IncompleteReplicates:
    case ErrorKind::NoWeeksFound:
    case ErrorKind::EmptyScenario:
    case ErrorKind::LengthMismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace cpvsoil
