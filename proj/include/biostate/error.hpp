#pragma once

#include <stdexcept>
#include <string>

namespace biostate {

/// Failure categories surfaced by the library. The CLI maps these to exit
/// codes (validation -> 2, I/O -> 3, numerical -> 4).
enum class Errc {
  MalformedCsv,
  DuplicateSubject,
  DuplicateColumn,
  EmptyPanel,
  NonFiniteValue,
  ZeroVariance,
  ShapeMismatch,
  StaleReport,
  StaleModel,
  KOutOfRange,
  ROutOfRange,
  SingleCluster,
  TooFewObservations,
  SpecInvalid,
  BadArgument,
  IoFailure,
  NumericalFailure,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::DuplicateSubject: return "DuplicateSubject";
    case Errc::DuplicateColumn: return "DuplicateColumn";
    case Errc::EmptyPanel: return "EmptyPanel";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::StaleReport: return "StaleReport";
    case Errc::StaleModel: return "StaleModel";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::ROutOfRange: return "ROutOfRange";
    case Errc::SingleCluster: return "SingleCluster";
    case Errc::TooFewObservations: return "TooFewObservations";
    case Errc::SpecInvalid: return "SpecInvalid";
    case Errc::BadArgument: return "BadArgument";
    case Errc::IoFailure: return "IoFailure";
    case Errc::NumericalFailure: return "NumericalFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, Errc code, const std::string& message) {
  if (!ok) raise(code, message);
}

}  // namespace biostate
