// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "rationale/api/routes.hpp"

namespace rationale::api {

/// HTTP front end forwarding every request under the API prefix to a Router.
class Server {
 public:
  explicit Server(Platform& platform);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  int port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rationale::api
