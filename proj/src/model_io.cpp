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

// Model file layout:
//
//   copyforge-model 1
//   family <tree|forest|logistic|rbf>
//   input_dim <n>
//   excluded <count> <index>...
//   training_error <none|real>
//   provenance <free text to end of line>
//   <family body, whitespace separated>
//   end

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "copyforge/models.hpp"
#include "copyforge/text.hpp"

namespace copyforge {
namespace {

constexpr std::string_view kMagic = "copyforge-model";
constexpr int kVersion = 1;

class TokenReader {
 public:
  explicit TokenReader(std::string text) : text_(std::move(text)) {}

  std::string_view next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw Error(ErrorCode::kParse, "unexpected end of model file");
    return std::string_view(text_).substr(start, pos_ - start);
  }

  void expect(std::string_view keyword) {
    const auto token = next();
    if (token != keyword) {
      throw Error(ErrorCode::kParse,
                  fmt::format("model file: expected '{}', found '{}'", keyword, token));
    }
  }

  double real() { return ParseDouble(next()); }

  long long integer() {
    const auto token = next();
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorCode::kParse, fmt::format("model file: bad integer '{}'", token));
    }
    return v;
  }

  std::uint64_t unsigned_integer() {
    const auto token = next();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorCode::kParse, fmt::format("model file: bad integer '{}'", token));
    }
    return v;
  }

  std::size_t count() {
    const long long v = integer();
    if (v < 0) throw Error(ErrorCode::kParse, "model file: negative count");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> reals(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = real();
    return v;
  }

  // Rest of the current line, without the leading separator.
  std::string line() {
    if (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string::npos ? text_.size() : end;
    std::string out = text_.substr(pos_, stop - pos_);
    pos_ = stop;
    return out;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

void WriteReals(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i == 0 ? "" : " ") << FormatDouble(values[i]);
  }
  out << '\n';
}

void WriteTree(std::ostream& out, const TreeModel& tree) {
  out << "tree " << tree.dim() << ' ' << tree.num_classes() << ' '
      << tree.max_depth().value_or(-1) << " nodes " << tree.nodes().size() << '\n';
  for (const auto& node : tree.nodes()) {
    out << node.feature << ' ' << FormatDouble(node.threshold) << ' ' << node.left << ' '
        << node.right << ' ' << node.label << '\n';
  }
}

TreeModel ReadTree(TokenReader& in) {
  in.expect("tree");
  const std::size_t dim = in.count();
  const auto k = static_cast<int>(in.integer());
  const long long depth = in.integer();
  in.expect("nodes");
  std::vector<TreeNode> nodes(in.count());
  for (auto& node : nodes) {
    node.feature = static_cast<int>(in.integer());
    node.threshold = in.real();
    node.left = static_cast<int>(in.integer());
    node.right = static_cast<int>(in.integer());
    node.label = static_cast<Label>(in.integer());
  }
  return TreeModel(dim, k, depth < 0 ? std::nullopt : std::optional<int>(static_cast<int>(depth)),
                   std::move(nodes));
}

void WriteBody(std::ostream& out, const TreeModel& tree) { WriteTree(out, tree); }

void WriteBody(std::ostream& out, const ForestModel& forest) {
  out << "forest " << forest.dim() << ' ' << forest.num_classes() << ' '
      << FormatDouble(forest.feature_fraction()) << ' ' << (forest.bootstrap() ? 1 : 0)
      << " trees " << forest.trees().size() << '\n';
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    out << "seed " << forest.tree_seeds()[t].value << '\n';
    WriteTree(out, forest.trees()[t]);
  }
}

void WriteBody(std::ostream& out, const LogisticModel& model) {
  out << "logistic " << model.dim() << ' ' << model.num_classes() << ' '
      << FormatDouble(model.options().learning_rate) << ' ' << model.options().epochs << '\n';
  out << "weights ";
  WriteReals(out, model.weights());
  out << "bias ";
  WriteReals(out, model.bias());
}

void WriteBody(std::ostream& out, const KernelModel& model) {
  out << "rbf " << model.dim() << ' ' << model.num_classes() << ' '
      << FormatDouble(model.gamma()) << " support " << model.support().size() << '\n';
  for (std::size_t s = 0; s < model.support().size(); ++s) WriteReals(out, model.support()[s]);
  out << "coefficients ";
  WriteReals(out, model.coefficients());
  out << "bias ";
  WriteReals(out, model.bias());
}

Hypothesis ReadBody(TokenReader& in, Family family) {
  switch (family) {
    case Family::kTree: return ReadTree(in);
    case Family::kForest: {
      in.expect("forest");
      const std::size_t dim = in.count();
      const auto k = static_cast<int>(in.integer());
      const double fraction = in.real();
      const bool bootstrap = in.integer() != 0;
      in.expect("trees");
      const std::size_t count = in.count();
      std::vector<RngSeed> seeds;
      std::vector<TreeModel> trees;
      for (std::size_t t = 0; t < count; ++t) {
        in.expect("seed");
        seeds.push_back({in.unsigned_integer()});
        trees.push_back(ReadTree(in));
      }
      return ForestModel(dim, k, fraction, bootstrap, std::move(seeds), std::move(trees));
    }
    case Family::kLogistic: {
      in.expect("logistic");
      const std::size_t dim = in.count();
      const auto k = static_cast<int>(in.integer());
      LogisticOptions options;
      options.learning_rate = in.real();
      options.epochs = static_cast<int>(in.integer());
      in.expect("weights");
      auto weights = in.reals(static_cast<std::size_t>(k) * dim);
      in.expect("bias");
      auto bias = in.reals(static_cast<std::size_t>(k));
      return LogisticModel(dim, k, std::move(weights), std::move(bias), options);
    }
    case Family::kRbf: {
      in.expect("rbf");
      const std::size_t dim = in.count();
      const auto k = static_cast<int>(in.integer());
      const double gamma = in.real();
      in.expect("support");
      const std::size_t s_count = in.count();
      PointSet support(dim, in.reals(s_count * dim));
      if (s_count == 0) support = PointSet(dim);
      const std::size_t machines = k == 2 ? 1 : static_cast<std::size_t>(k);
      in.expect("coefficients");
      auto coefficients = in.reals(machines * s_count);
      in.expect("bias");
      auto bias = in.reals(machines);
      return KernelModel(dim, k, gamma, std::move(support), std::move(coefficients),
                         std::move(bias));
    }
  }
  throw Error(ErrorCode::kParse, "unknown model family");
}

}  // namespace

void WriteModel(std::ostream& out, const CopyModel& model) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "family " << FamilyName(model.family()) << '\n';
  out << "input_dim " << model.input_dim() << '\n';
  out << "excluded " << model.excluded_features().size();
  for (std::size_t j : model.excluded_features()) out << ' ' << j;
  out << '\n';
  out << "training_error "
      << (model.training_error ? FormatDouble(*model.training_error) : std::string("none"))
      << '\n';
  std::string provenance = model.provenance;
  for (char& c : provenance) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  out << "provenance " << provenance << '\n';
  std::visit([&](const auto& m) { WriteBody(out, m); }, model.model());
  out << "end\n";
}

CopyModel ReadModel(std::istream& in) {
  TokenReader reader(std::string(std::istreambuf_iterator<char>(in), {}));
  reader.expect(kMagic);
  if (reader.integer() != kVersion) throw Error(ErrorCode::kParse, "unsupported model file version");
  reader.expect("family");
  const Family family = ParseFamily(reader.next());
  reader.expect("input_dim");
  const std::size_t input_dim = reader.count();
  reader.expect("excluded");
  std::vector<std::size_t> excluded(reader.count());
  for (auto& j : excluded) j = reader.count();
  reader.expect("training_error");
  std::optional<double> training_error;
  if (const auto token = reader.next(); token != "none") training_error = ParseDouble(token);
  reader.expect("provenance");
  std::string provenance = reader.line();

  CopyModel model(ReadBody(reader, family), input_dim, std::move(excluded));
  model.training_error = training_error;
  model.provenance = std::move(provenance);
  reader.expect("end");
  return model;
}

void SaveModel(const CopyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write model file '{}'", path));
  WriteModel(out, model);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing model file '{}'", path));
}

CopyModel LoadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open model file '{}'", path));
  return ReadModel(in);
}

}  // namespace copyforge
