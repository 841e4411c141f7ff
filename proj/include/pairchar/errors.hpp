#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pairchar {

enum class ErrorCode {
  InvalidParameter,
  DivergentMetric,
  IndeterminateRatio,
  NoExtremum,
  CutoffTooSmall,
  InvalidMode,
  DegenerateCounts,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library; carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define PAIRCHAR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message)                         \
        : Error(ErrorCode::Name, message) {}                          \
  };

PAIRCHAR_DEFINE_ERROR(InvalidParameter)
PAIRCHAR_DEFINE_ERROR(DivergentMetric)
PAIRCHAR_DEFINE_ERROR(IndeterminateRatio)
PAIRCHAR_DEFINE_ERROR(NoExtremum)
PAIRCHAR_DEFINE_ERROR(CutoffTooSmall)
PAIRCHAR_DEFINE_ERROR(InvalidMode)
PAIRCHAR_DEFINE_ERROR(DegenerateCounts)

#undef PAIRCHAR_DEFINE_ERROR

}  // namespace pairchar
