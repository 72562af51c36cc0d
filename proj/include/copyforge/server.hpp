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

#ifndef COPYFORGE_SERVER_HPP_
#define COPYFORGE_SERVER_HPP_

#include <memory>
#include <string>

#include "copyforge/oracle.hpp"

namespace copyforge {

// Serves POST /predict for a labelling function, speaking the same text
// protocol RemotePredict expects. Malformed requests get HTTP 400.
class OracleServer {
 public:
  OracleServer(std::size_t dim, Oracle::Backend backend);
  ~OracleServer();
  OracleServer(const OracleServer&) = delete;
  OracleServer& operator=(const OracleServer&) = delete;

  // Binds to `port`, or to a free port when 0. Returns the bound port.
  int bind(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks until stop().
  void serve();
  // Runs serve() on a background thread.
  void start();
  void stop();
  std::string url() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace copyforge

#endif  // COPYFORGE_SERVER_HPP_
