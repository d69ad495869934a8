#pragma once

#include <stdexcept>
#include <string>

namespace ratchet {

enum class ErrorCode {
  InvalidSystem,
  InvalidDrive,
  InvalidSweep,
  InvalidParams,
  IndexOutOfRange,
  DomainError,
  NoCrossingInBandwidth,
  StepTooCoarse,
  NoInteriorMaximum,
  FitDiverged,
  InsufficientSamples,
  DegenerateX,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::InvalidDrive: return "InvalidDrive";
    case ErrorCode::InvalidSweep: return "InvalidSweep";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoCrossingInBandwidth: return "NoCrossingInBandwidth";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::NoInteriorMaximum: return "NoInteriorMaximum";
    case ErrorCode::FitDiverged: return "FitDiverged";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace ratchet
