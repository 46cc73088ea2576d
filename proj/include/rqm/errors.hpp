#pragma once

#include <stdexcept>
#include <string>

namespace rqm {

enum class ErrorCode {
  InvalidSpec,
  Dimension,
  InvalidState,
  NotAMorphism,
  NotCompletelyPositive,
  NotUnital,
  UnsupportedShape,
  CapExceeded,
  OutOfRange,
  NotStochastic,
  NumericalFailure,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library. `check_id` is a stable identifier of
/// the identity or invariant that was violated (empty when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string check_id = {})
      : std::runtime_error(message), code_(code), check_id_(std::move(check_id)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& check_id() const noexcept { return check_id_; }

 private:
  ErrorCode code_;
  std::string check_id_;
};

}  // namespace rqm
