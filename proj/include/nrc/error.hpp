#pragma once

#include <stdexcept>
#include <string>

namespace nrc {

enum class ErrorKind {
  InvalidInput,
  PoleOnAxis,
  OutOfModel,
  InternalConsistency,
  UnachievableAmplitude,
  Divergence,
  Window,
  WrongBranch,
};

const char* to_string(ErrorKind kind) noexcept;

/// Numerical or contract failure raised by the nrc library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when the closed-loop state stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : Error(ErrorKind::Divergence, what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::PoleOnAxis: return "pole on imaginary axis";
    case ErrorKind::OutOfModel: return "outside model validity";
    case ErrorKind::InternalConsistency: return "internal consistency";
    case ErrorKind::UnachievableAmplitude: return "unachievable amplitude";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Window: return "insufficient window";
    case ErrorKind::WrongBranch: return "wrong branch";
  }
  return "error";
}

}  // namespace nrc
