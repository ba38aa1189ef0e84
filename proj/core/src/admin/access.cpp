// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/admin/access.hpp"

#include "rationale/common/error.hpp"

namespace rationale::admin {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kDeveloper: return "developer";
    case Role::kAnnotator: return "annotator";
    case Role::kUnauthorized: return "unauthorized";
  }
  return "unauthorized";
}

Role parse_role(std::string_view name) {
  for (Role r : kAllRoles) {
    if (role_name(r) == name) return r;
  }
  throw ValidationError("unknown role '" + std::string(name) + "'", "field=role");
}

std::string_view action_name(Action action) {
  switch (action) {
    case Action::kViewPredictionsExplanations: return "view_predictions_explanations";
    case Action::kSmartSampleSelection: return "smart_sample_selection";
    case Action::kSubmitFeedback: return "submit_feedback";
    case Action::kActiveConfiguration: return "active_configuration";
    case Action::kUploadModelsDatasets: return "upload_models_datasets";
    case Action::kCreateUsers: return "create_users";
  }
  return "";
}

Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  throw ValidationError("unknown action '" + std::string(name) + "'", "field=action");
}

bool authorize(Role role, Action action) {
  switch (role) {
    case Role::kDeveloper:
      return true;
    case Role::kAnnotator:
      return action == Action::kViewPredictionsExplanations || action == Action::kSmartSampleSelection ||
             action == Action::kSubmitFeedback;
    case Role::kUnauthorized:
      return action == Action::kViewPredictionsExplanations;
  }
  return false;
}

bool authorize(Role role, std::string_view action) { return authorize(role, parse_action(action)); }

void require(const Principal& principal, Action action) {
  if (!authorize(principal.role, action)) {
    throw PermissionError("role '" + std::string(role_name(principal.role)) + "' may not perform '" +
                              std::string(action_name(action)) + "'",
                          "action=" + std::string(action_name(action)));
  }
}

void require_authenticated(const Principal& principal) {
  if (!principal.authenticated()) throw AuthenticationError("authentication required");
}

}  // namespace rationale::admin
