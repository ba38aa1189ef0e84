// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/common/error.hpp"

namespace rationale {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput: return "input_error";
    case ErrorCode::kArgument: return "argument_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kState: return "state_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kRegistration: return "registration_error";
    case ErrorCode::kUnauthenticated: return "unauthenticated";
    case ErrorCode::kPermission: return "permission_denied";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace rationale
