#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plandial {

enum class ErrorCode {
  ParseError,
  ValidationError,
  IoError,
  StepOutOfRange,
  EmptyLog,
  UnknownIntentLabel,
  NoUtterancesForIntent,
  EmptyTemplateSet,
  UnhandledIntent,
  NoQAForStep,
  NoFunFact,
  UnknownResource,
  UnknownEntity,
  PortTimeout,
  SynthesisStalled,
  UnknownResponseToken,
  DegenerateExpectedAgreement,
  MissingFixture,
  EmptyVerdictSet,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::StepOutOfRange: return "StepOutOfRange";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::UnknownIntentLabel: return "UnknownIntentLabel";
    case ErrorCode::NoUtterancesForIntent: return "NoUtterancesForIntent";
    case ErrorCode::EmptyTemplateSet: return "EmptyTemplateSet";
    case ErrorCode::UnhandledIntent: return "UnhandledIntent";
    case ErrorCode::NoQAForStep: return "NoQAForStep";
    case ErrorCode::NoFunFact: return "NoFunFact";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::PortTimeout: return "PortTimeout";
    case ErrorCode::SynthesisStalled: return "SynthesisStalled";
    case ErrorCode::UnknownResponseToken: return "UnknownResponseToken";
    case ErrorCode::DegenerateExpectedAgreement: return "DegenerateExpectedAgreement";
    case ErrorCode::MissingFixture: return "MissingFixture";
    case ErrorCode::EmptyVerdictSet: return "EmptyVerdictSet";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace plandial
