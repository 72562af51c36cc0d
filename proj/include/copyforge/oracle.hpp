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

// The membership query interface: a deterministic hard-label classifier
// that can only be asked for labels of points.

#ifndef COPYFORGE_ORACLE_HPP_
#define COPYFORGE_ORACLE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "copyforge/core.hpp"
#include "copyforge/models.hpp"

namespace copyforge {

struct RemoteEndpoint {
  // Base URL, e.g. "http://127.0.0.1:8080" or "http://host/models/a".
  // Requests go to <url>/predict.
  std::string url;
  int timeout_ms = 10000;
  std::size_t batch_size = 1024;
};

// Wire format: one point per line, features as decimal floats separated by
// commas. Response: one integer label per line, same order.
std::string EncodePoints(const PointSet& points);
PointSet DecodePoints(std::string_view body, std::size_t dim);
std::string EncodeLabels(std::span<const Label> labels);
std::vector<Label> DecodeLabels(std::string_view body);

// POST one batch to <url>/predict. Throws kTransport on connection failure
// or timeout, kRemoteStatus on a non-200 reply and kMalformedResponse when
// the body does not parse or has the wrong number of labels.
std::vector<Label> RemotePredict(const RemoteEndpoint& endpoint, const PointSet& batch);

class Oracle {
 public:
  using Backend = std::function<std::vector<Label>(const PointSet&)>;

  Oracle(std::size_t dim, int k, Backend backend, bool cache = false);
  ~Oracle();
  Oracle(Oracle&&) noexcept;
  Oracle& operator=(Oracle&&) noexcept;

  static Oracle FromModel(std::shared_ptr<const CopyModel> model, bool cache = false);
  static Oracle FromRemote(RemoteEndpoint endpoint, std::size_t dim, int k,
                           bool cache = false);

  // One label per point, in order. Safe to call concurrently.
  std::vector<Label> query(const PointSet& points);

  std::size_t dim() const;
  int num_classes() const;
  bool caching() const;
  // Points forwarded to the backend so far (cache hits excluded).
  std::uint64_t query_count() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace copyforge

#endif  // COPYFORGE_ORACLE_HPP_
