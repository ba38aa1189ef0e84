// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace rationale::admin {

enum class Role { kDeveloper, kAnnotator, kUnauthorized };

enum class Action {
  kViewPredictionsExplanations,
  kSmartSampleSelection,
  kSubmitFeedback,
  kActiveConfiguration,
  kUploadModelsDatasets,
  kCreateUsers,
};

inline constexpr std::array<Role, 3> kAllRoles{Role::kDeveloper, Role::kAnnotator, Role::kUnauthorized};
inline constexpr std::array<Action, 6> kAllActions{
    Action::kViewPredictionsExplanations, Action::kSmartSampleSelection, Action::kSubmitFeedback,
    Action::kActiveConfiguration,         Action::kUploadModelsDatasets, Action::kCreateUsers};

std::string_view role_name(Role role);
/// Throws ValidationError on an unknown name.
Role parse_role(std::string_view name);
std::string_view action_name(Action action);
/// Throws ValidationError on an unknown name.
Action parse_action(std::string_view name);

bool authorize(Role role, Action action);
bool authorize(Role role, std::string_view action);

/// Who is making a call. The anonymous principal has no user id.
struct Principal {
  std::optional<std::string> user_id;
  Role role = Role::kUnauthorized;
  bool api_access = false;

  static Principal anonymous() { return {}; }
  bool authenticated() const { return user_id.has_value(); }
};

/// Throws PermissionError when the principal's role does not allow `action`.
void require(const Principal& principal, Action action);

/// Throws AuthenticationError for the anonymous principal.
void require_authenticated(const Principal& principal);

}  // namespace rationale::admin
