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

#include "copyforge/oracle.hpp"

#include <atomic>
#include <cstring>
#include <mutex>
#include <unordered_map>

#include <fmt/core.h>
#include <httplib.h>

#include "copyforge/text.hpp"

namespace copyforge {
namespace {

std::string CacheKey(std::span<const double> point) {
  std::string key(point.size() * sizeof(double), '\0');
  std::memcpy(key.data(), point.data(), key.size());
  return key;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

ParsedUrl SplitUrl(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("endpoint url '{}' lacks a scheme", url));
  }
  const std::size_t slash = url.find('/', scheme + 3);
  ParsedUrl out;
  out.origin = url.substr(0, slash);
  out.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

std::string EncodePoints(const PointSet& points) {
  std::string body;
  for (std::size_t i = 0; i < points.size(); ++i) {
    body += JoinReals(points[i]);
    body += '\n';
  }
  return body;
}

PointSet DecodePoints(std::string_view body, std::size_t dim) {
  PointSet points(dim);
  std::vector<double> row;
  std::size_t line_no = 0;
  while (!body.empty()) {
    const std::size_t nl = body.find('\n');
    const std::string_view line = Trim(body.substr(0, nl));
    body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    row.clear();
    for (const auto& field : SplitCsvLine(line)) {
      const auto v = TryParseDouble(field);
      if (!v) throw Error(ErrorCode::kParse, fmt::format("line {}: bad number '{}'", line_no, field));
      row.push_back(*v);
    }
    if (row.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("line {}: expected {} features, got {}", line_no, dim, row.size()));
    }
    points.push_back(row);
  }
  return points;
}

std::string EncodeLabels(std::span<const Label> labels) {
  std::string body;
  for (Label t : labels) {
    body += std::to_string(t);
    body += '\n';
  }
  return body;
}

std::vector<Label> DecodeLabels(std::string_view body) {
  std::vector<Label> labels;
  while (!body.empty()) {
    const std::size_t nl = body.find('\n');
    const std::string_view line = Trim(body.substr(0, nl));
    body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);
    if (line.empty()) continue;
    const auto v = TryParseInteger(line);
    if (!v) {
      throw Error(ErrorCode::kMalformedResponse, fmt::format("label '{}' is not an integer", line));
    }
    labels.push_back(static_cast<Label>(*v));
  }
  return labels;
}

std::vector<Label> RemotePredict(const RemoteEndpoint& endpoint, const PointSet& batch) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  if (endpoint.batch_size < 1 || batch.size() > endpoint.batch_size) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("batch of {} exceeds batch_size {}", batch.size(), endpoint.batch_size));
  }
  if (endpoint.timeout_ms <= 0) throw Error(ErrorCode::kInvalidArgument, "timeout_ms must be positive");

  const ParsedUrl url = SplitUrl(endpoint.url);
  httplib::Client client(url.origin);
  const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto result = client.Post(url.path + "/predict", EncodePoints(batch), "text/plain");
  if (!result) {
    throw Error(ErrorCode::kTransport,
                fmt::format("request to {} failed: {}", endpoint.url, httplib::to_string(result.error())));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kRemoteStatus,
                fmt::format("{} answered with status {}", endpoint.url, result->status));
  }
  auto labels = DecodeLabels(result->body);
  if (labels.size() != batch.size()) {
    throw Error(ErrorCode::kMalformedResponse,
                fmt::format("{} returned {} labels for {} points", endpoint.url, labels.size(),
                            batch.size()));
  }
  return labels;
}

struct Oracle::State {
  std::size_t dim;
  int k;
  Backend backend;
  bool cache;
  std::atomic<std::uint64_t> query_count{0};
  std::mutex mutex;
  std::unordered_map<std::string, Label> memo;
};

Oracle::Oracle(std::size_t dim, int k, Backend backend, bool cache)
    : state_(std::make_unique<State>()) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "oracle dimension must be positive");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "oracle class count must be positive");
  state_->dim = dim;
  state_->k = k;
  state_->backend = std::move(backend);
  state_->cache = cache;
}

Oracle::~Oracle() = default;
Oracle::Oracle(Oracle&&) noexcept = default;
Oracle& Oracle::operator=(Oracle&&) noexcept = default;

Oracle Oracle::FromModel(std::shared_ptr<const CopyModel> model, bool cache) {
  const std::size_t dim = model->input_dim();
  const int k = model->num_classes();
  return Oracle(
      dim, k, [model = std::move(model)](const PointSet& points) { return model->predict(points); },
      cache);
}

Oracle Oracle::FromRemote(RemoteEndpoint endpoint, std::size_t dim, int k, bool cache) {
  if (endpoint.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  return Oracle(
      dim, k,
      [endpoint = std::move(endpoint)](const PointSet& points) {
        std::vector<Label> labels;
        labels.reserve(points.size());
        std::vector<std::size_t> rows;
        for (std::size_t start = 0; start < points.size(); start += endpoint.batch_size) {
          const std::size_t stop = std::min(points.size(), start + endpoint.batch_size);
          rows.resize(stop - start);
          for (std::size_t i = start; i < stop; ++i) rows[i - start] = i;
          const auto part = RemotePredict(endpoint, points.select(rows));
          labels.insert(labels.end(), part.begin(), part.end());
        }
        return labels;
      },
      cache);
}

std::vector<Label> Oracle::query(const PointSet& points) {
  State& s = *state_;
  if (points.empty()) return {};
  CheckDimension(points, s.dim, "oracle query");

  auto call_backend = [&](const PointSet& batch) {
    auto labels = s.backend(batch);
    if (labels.size() != batch.size()) {
      throw Error(ErrorCode::kMalformedResponse,
                  fmt::format("oracle returned {} labels for {} points", labels.size(), batch.size()));
    }
    for (Label t : labels) {
      if (t < 0 || t >= s.k) {
        throw Error(ErrorCode::kMalformedResponse,
                    fmt::format("oracle label {} outside [0, {})", t, s.k));
      }
    }
    s.query_count += batch.size();
    return labels;
  };

  if (!s.cache) return call_backend(points);

  // Held across the backend call so concurrent callers never forward the
  // same point twice.
  std::lock_guard lock(s.mutex);
  std::vector<std::string> keys(points.size());
  std::unordered_map<std::string_view, std::size_t> pending;
  std::vector<std::size_t> miss_rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    keys[i] = CacheKey(points[i]);
    if (s.memo.contains(keys[i])) continue;
    if (pending.emplace(keys[i], miss_rows.size()).second) miss_rows.push_back(i);
  }
  if (!miss_rows.empty()) {
    const auto fresh = call_backend(points.select(miss_rows));
    for (std::size_t m = 0; m < miss_rows.size(); ++m) s.memo.emplace(keys[miss_rows[m]], fresh[m]);
  }
  std::vector<Label> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = s.memo.at(keys[i]);
  return out;
}

std::size_t Oracle::dim() const { return state_->dim; }
int Oracle::num_classes() const { return state_->k; }
bool Oracle::caching() const { return state_->cache; }
std::uint64_t Oracle::query_count() const { return state_->query_count.load(); }

}  // namespace copyforge
