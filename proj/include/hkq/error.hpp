#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hkq {

enum class ErrorCode {
  SpecInvalid,
  ZeroQuaternion,
  IsotropyViolation,
  ZeroRadius,
  StringLocus,
  DomainBoundary,
  OddDimension,
  SingularTheta,
  ShapeMismatch,
  ProblemTooLarge,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::ZeroQuaternion: return "ZeroQuaternion";
    case ErrorCode::IsotropyViolation: return "IsotropyViolation";
    case ErrorCode::ZeroRadius: return "ZeroRadius";
    case ErrorCode::StringLocus: return "StringLocus";
    case ErrorCode::DomainBoundary: return "DomainBoundary";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::SingularTheta: return "SingularTheta";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
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

}  // namespace hkq
