// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rationale/admin/access.hpp"
#include "rationale/api/platform.hpp"
#include "rationale/common/error.hpp"

namespace rationale::api {

inline constexpr std::string_view kApiPrefix = "/api/v1";
inline constexpr std::string_view kRouteDescriptionPath = "/api/v1/routes";

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  /// Raw Authorization header value.
  std::string authorization;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

enum class Auth {
  kAction,    // anyone whose role allows `action` (the anonymous tier included)
  kIdentity,  // any authenticated account
  kPublic,
};

struct RouteSpec {
  std::string method;
  std::string path;  // relative to the prefix; `{name}` segments are parameters
  std::string group;
  Auth auth = Auth::kPublic;
  std::optional<admin::Action> action;
  std::string summary;
  nlohmann::json request;   // field -> description
  nlohmann::json response;  // payload description
};

/// Every route the service answers, in documentation order.
const std::vector<RouteSpec>& route_table();

/// Machine-readable description of all routes, served at kRouteDescriptionPath.
nlohmann::json route_description();

/// One transport status per error code.
int http_status(ErrorCode code);

/// Transport-independent request dispatcher: authenticates, authorizes,
/// delegates and wraps the outcome in the response envelope.
class Router {
 public:
  explicit Router(Platform& platform);
  ApiResponse handle(const ApiRequest& request);

 private:
  std::string next_request_id();

  Platform& platform_;
  std::atomic<std::uint64_t> counter_{0};
  std::string instance_;
};

}  // namespace rationale::api
