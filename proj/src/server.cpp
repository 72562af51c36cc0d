/*
 * Copyright 2026 The copyforge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "copyforge/server.hpp"

#include <thread>

#include <fmt/core.h>
#include <httplib.h>

namespace copyforge {

struct OracleServer::State {
  std::size_t dim;
  Oracle::Backend backend;
  httplib::Server server;
  std::string host;
  int port = -1;
  std::thread thread;
};

OracleServer::OracleServer(std::size_t dim, Oracle::Backend backend)
    : state_(std::make_unique<State>()) {
  state_->dim = dim;
  state_->backend = std::move(backend);
  State* s = state_.get();
  s->server.Post("/predict", [s](const httplib::Request& req, httplib::Response& res) {
    try {
      const PointSet points = DecodePoints(req.body, s->dim);
      res.set_content(EncodeLabels(s->backend(points)), "text/plain");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  });
}

OracleServer::~OracleServer() { stop(); }

int OracleServer::bind(const std::string& host, int port) {
  state_->host = host;
  if (port == 0) {
    state_->port = state_->server.bind_to_any_port(host);
  } else {
    state_->port = state_->server.bind_to_port(host, port) ? port : -1;
  }
  if (state_->port < 0) {
    throw Error(ErrorCode::kTransport, fmt::format("cannot bind {}:{}", host, port));
  }
  return state_->port;
}

void OracleServer::serve() {
  if (state_->port < 0) bind();
  state_->server.listen_after_bind();
}

void OracleServer::start() {
  if (state_->port < 0) bind();
  state_->thread = std::thread([this] { state_->server.listen_after_bind(); });
  state_->server.wait_until_ready();
}

void OracleServer::stop() {
  if (!state_) return;
  state_->server.stop();
  if (state_->thread.joinable()) state_->thread.join();
}

std::string OracleServer::url() const { return fmt::format("http://{}:{}", state_->host, state_->port); }

}  // namespace copyforge
