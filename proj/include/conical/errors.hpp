#pragma once

#include <stdexcept>
#include <string>

namespace conical {

enum class ErrorKind {
  InvalidPoint,
  PreconditionViolated,
  SideConditionViolated,
  EmptyResult,
  NotGenerallyConvergent,
  DegenerateCoefficient,
  ScaleTooFine,
  DepthTooLarge,
  NoWitness,
  RankDataInconsistent,
  ConstructionStuck,
  ConfigInvalid,
};

inline const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::SideConditionViolated: return "SideConditionViolated";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::NotGenerallyConvergent: return "NotGenerallyConvergent";
    case ErrorKind::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorKind::ScaleTooFine: return "ScaleTooFine";
    case ErrorKind::DepthTooLarge: return "DepthTooLarge";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::RankDataInconsistent: return "RankDataInconsistent";
    case ErrorKind::ConstructionStuck: return "ConstructionStuck";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace conical
