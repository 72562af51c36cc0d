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

// Serves a saved model as a remote oracle: POST /predict.

#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "copyforge/models.hpp"
#include "copyforge/server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Serve a copyforge model file over the oracle protocol."};
  std::string model_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  app.add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port, 0 for any free port");
  CLI11_PARSE(app, argc, argv);

  try {
    auto model = std::make_shared<const copyforge::CopyModel>(copyforge::LoadModel(model_path));
    copyforge::OracleServer server(model->input_dim(),
                                   [model](const copyforge::PointSet& p) { return model->predict(p); });
    server.bind(host, port);
    std::cout << server.url() << std::endl;
    server.serve();
  } catch (const std::exception& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  }
  return 0;
}
