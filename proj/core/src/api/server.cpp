// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/api/server.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "rationale/common/error.hpp"

namespace rationale::api {

struct Server::Impl {
  explicit Impl(Platform& platform) : router(platform) {}

  Router router;
  httplib::Server http;
  std::thread thread;
  std::atomic<int> bound_port{0};

  void install() {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest request;
      request.method = req.method;
      request.path = req.path;
      for (const auto& [key, value] : req.params) request.query.emplace(key, value);
      request.body = req.body;
      request.authorization = req.get_header_value("Authorization");
      const ApiResponse response = router.handle(request);
      res.status = response.status;
      res.set_content(response.body, response.content_type);
    };
    const std::string pattern = ".*";
    http.Get(pattern, forward);
    http.Post(pattern, forward);
    http.Put(pattern, forward);
    http.Patch(pattern, forward);
    http.Delete(pattern, forward);
    http.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });
  }

  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) {
      throw StateError("cannot bind " + host + ":" + std::to_string(port), "listen=" + host);
    }
    bound_port = bound;
    return bound;
  }
};

Server::Server(Platform& platform) : impl_(std::make_unique<Impl>(platform)) { impl_->install(); }

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  const int bound = impl_->bind(host, port);
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::listen(const std::string& host, int port) {
  const int bound = impl_->bind(host, port);
  spdlog::info("listening on {}:{}", host, bound);
  impl_->http.listen_after_bind();
}

int Server::port() const { return impl_->bound_port; }

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rationale::api
