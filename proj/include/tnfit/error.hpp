#ifndef TNFIT_ERROR_HPP
#define TNFIT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tnfit {

enum class Errc {
  InvalidArgument,
  InvalidInterval,
  NonFiniteInput,
  ToleranceNotReached,
  OutOfSupport,
  PowerLawLimit,
  InvalidSigma,
  OverflowBounds,
  EmptySample,
  NonFiniteValue,
  DegenerateSample,
  PreconditionViolation,
  StepOverflow,
  EtaExhausted,
  FileNotFound,
  ParseError,
  EmptyDataset,
  NonPositiveData,
  BoundsDoNotBracketData,
  WriteFailure,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidInterval: return "InvalidInterval";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::ToleranceNotReached: return "ToleranceNotReached";
    case Errc::OutOfSupport: return "OutOfSupport";
    case Errc::PowerLawLimit: return "PowerLawLimit";
    case Errc::InvalidSigma: return "InvalidSigma";
    case Errc::OverflowBounds: return "OverflowBounds";
    case Errc::EmptySample: return "EmptySample";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::DegenerateSample: return "DegenerateSample";
    case Errc::PreconditionViolation: return "PreconditionViolation";
    case Errc::StepOverflow: return "StepOverflow";
    case Errc::EtaExhausted: return "EtaExhausted";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::NonPositiveData: return "NonPositiveData";
    case Errc::BoundsDoNotBracketData: return "BoundsDoNotBracketData";
    case Errc::WriteFailure: return "WriteFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when (mu, sigma) is requested for psi <= 0. beta stays well defined
/// and is carried along so callers can still report it.
class PowerLawLimitError : public Error {
 public:
  explicit PowerLawLimitError(double beta)
      : Error(Errc::PowerLawLimit,
              "psi <= 0: mu and sigma diverge, only beta = alpha + 1 is defined"),
        beta_(beta) {}

  double beta() const noexcept { return beta_; }

 private:
  double beta_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& text)
      : Error(Errc::ParseError,
              "line " + std::to_string(line) + ": cannot parse '" + text + "'"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tnfit

#endif  // TNFIT_ERROR_HPP
