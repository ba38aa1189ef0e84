// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rationale {

/// Every failure raised by the library carries one of these codes. The API
/// layer maps each code to exactly one transport status.
enum class ErrorCode {
  kInput,          // request text cannot be processed (e.g. zero tokens)
  kArgument,       // invalid parameter value
  kValidation,     // malformed document or schema violation
  kState,          // operation not valid in the current state
  kNotFound,
  kConflict,       // uniqueness violation
  kRegistration,   // checkpoint or dataset artifact missing/corrupt
  kUnauthenticated,
  kPermission,
  kInternal,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

#define RATIONALE_DEFINE_ERROR(Name, Code)                          \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message, std::string detail = {}) \
        : Error(Code, message, std::move(detail)) {}                \
  };

RATIONALE_DEFINE_ERROR(InputError, ErrorCode::kInput)
RATIONALE_DEFINE_ERROR(ArgumentError, ErrorCode::kArgument)
RATIONALE_DEFINE_ERROR(ValidationError, ErrorCode::kValidation)
RATIONALE_DEFINE_ERROR(StateError, ErrorCode::kState)
RATIONALE_DEFINE_ERROR(NotFoundError, ErrorCode::kNotFound)
RATIONALE_DEFINE_ERROR(ConflictError, ErrorCode::kConflict)
RATIONALE_DEFINE_ERROR(RegistrationError, ErrorCode::kRegistration)
RATIONALE_DEFINE_ERROR(AuthenticationError, ErrorCode::kUnauthenticated)
RATIONALE_DEFINE_ERROR(PermissionError, ErrorCode::kPermission)

#undef RATIONALE_DEFINE_ERROR

}  // namespace rationale
