#pragma once

#include <stdexcept>
#include <string>

namespace rotopt {

enum class ErrorKind {
  NonFinite,
  DimensionMismatch,
  DimensionTooLarge,
  NotInParityPolytope,
  NotMajorized,
  NotInterior,
  SingularBlock,
  TooManyVectors,
  RankDeficient,
  Infeasible,
  InvalidArgument,
  Parse,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::NotInParityPolytope: return "NotInParityPolytope";
    case ErrorKind::NotMajorized: return "NotMajorized";
    case ErrorKind::NotInterior: return "NotInterior";
    case ErrorKind::SingularBlock: return "SingularBlock";
    case ErrorKind::TooManyVectors: return "TooManyVectors";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rotopt
