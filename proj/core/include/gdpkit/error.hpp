#pragma once

#include <stdexcept>
#include <string>

namespace gdpkit {

enum class Errc {
  kMissingVariable,
  kNonfinite,
  kInvalidArgument,
  kBoundOrder,
  kDuplicateName,
  kUndeclared,
  kUnmappedIndicator,
  kNonlinear,
  kMissingBigM,
  kValidation,
  kUnboundedVariable,
  kIo,
  kParse,
};

const char* to_string(Errc code);

/// Single exception type for the library; `code()` distinguishes the cause.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace gdpkit
