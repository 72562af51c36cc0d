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

// Classifier families used both as copies and as stand-in originals:
// CART trees, bagged forests, multinomial logistic regression and an RBF
// kernel machine. All of them predict hard labels only.

#ifndef COPYFORGE_MODELS_HPP_
#define COPYFORGE_MODELS_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "copyforge/core.hpp"

namespace copyforge {

// ---------------------------------------------------------------------------
// Decision tree

struct TreeNode {
  // feature < 0 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Label label = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeOptions {
  std::optional<int> max_depth;
  // Features examined per split; all of them when unset.
  std::optional<std::size_t> max_features;
  RngSeed seed;
};

class TreeModel {
 public:
  TreeModel() = default;
  TreeModel(std::size_t dim, int k, std::optional<int> max_depth,
            std::vector<TreeNode> nodes);

  // Points with x[feature] <= threshold descend left.
  Label predict_one(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  int num_classes() const { return k_; }
  std::optional<int> max_depth() const { return max_depth_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  int depth() const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;

 private:
  std::size_t dim_ = 0;
  int k_ = 0;
  std::optional<int> max_depth_;
  std::vector<TreeNode> nodes_;
};

// Greedy CART on Gini impurity. Thresholds are midpoints between adjacent
// distinct values; equal impurity decreases go to the lowest feature index,
// then the lowest threshold. Without a depth cap the tree is grown until
// every leaf is pure or holds only identical points.
TreeModel TrainTree(const PointSet& points, std::span<const Label> labels,
                    int k, const TreeOptions& options = {});
TreeModel TrainTree(const Dataset& data, std::optional<int> max_depth = {});

// ---------------------------------------------------------------------------
// Random forest

struct ForestOptions {
  int trees = 25;
  // Fraction of features examined per split; sqrt(d)/d when unset.
  std::optional<double> feature_fraction;
  bool bootstrap = true;
  std::optional<int> max_depth;
  // Worker threads for member trees; 0 picks hardware concurrency.
  unsigned threads = 0;
};

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(std::size_t dim, int k, double feature_fraction, bool bootstrap,
              std::vector<RngSeed> tree_seeds, std::vector<TreeModel> trees);

  // Plurality vote, ties to the lowest class index.
  Label predict_one(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  int num_classes() const { return k_; }
  double feature_fraction() const { return feature_fraction_; }
  bool bootstrap() const { return bootstrap_; }
  const std::vector<RngSeed>& tree_seeds() const { return tree_seeds_; }
  const std::vector<TreeModel>& trees() const { return trees_; }

  friend bool operator==(const ForestModel&, const ForestModel&) = default;

 private:
  std::size_t dim_ = 0;
  int k_ = 0;
  double feature_fraction_ = 1.0;
  bool bootstrap_ = true;
  std::vector<RngSeed> tree_seeds_;
  std::vector<TreeModel> trees_;
};

ForestModel TrainForest(const Dataset& data, const ForestOptions& options,
                        RngSeed seed);

// ---------------------------------------------------------------------------
// Multinomial logistic regression

struct LogisticOptions {
  double learning_rate = 0.5;
  int epochs = 300;
};

class LogisticModel {
 public:
  LogisticModel() = default;
  // weights is k x d row-major.
  LogisticModel(std::size_t dim, int k, std::vector<double> weights,
                std::vector<double> bias, LogisticOptions options = {});

  std::vector<double> scores(std::span<const double> x) const;
  // argmax of the affine scores, ties to the lowest class index.
  Label predict_one(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  int num_classes() const { return k_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  const LogisticOptions& options() const { return options_; }
  // Mean cross-entropy before each epoch's update.
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> h) { loss_history_ = std::move(h); }

  friend bool operator==(const LogisticModel& a, const LogisticModel& b) {
    return a.dim_ == b.dim_ && a.k_ == b.k_ && a.weights_ == b.weights_ &&
           a.bias_ == b.bias_;
  }

 private:
  std::size_t dim_ = 0;
  int k_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  LogisticOptions options_;
  std::vector<double> loss_history_;
};

// Full-batch gradient descent on softmax cross-entropy. Throws kDivergence
// naming the epoch when the loss stops being finite.
LogisticModel TrainLogistic(const Dataset& data, const LogisticOptions& options,
                            RngSeed seed);

// ---------------------------------------------------------------------------
// RBF kernel machine

struct KernelOptions {
  double gamma = 1.0;
  // Pegasos lambda. Small values approach an unregularized fit.
  double regularization = 1e-5;
  int epochs = 5;
  // Adds a constant to the kernel so the expansion carries an offset.
  bool fit_bias = false;
};

class KernelModel {
 public:
  KernelModel() = default;
  // One machine for k == 2 (positive score means class 1), otherwise one
  // machine per class. coefficients is machines x support row-major.
  KernelModel(std::size_t dim, int k, double gamma, PointSet support,
              std::vector<double> coefficients, std::vector<double> bias);

  double kernel(std::span<const double> a, std::span<const double> b) const;
  std::vector<double> decision(std::span<const double> x) const;
  Label predict_one(std::span<const double> x) const;

  std::size_t dim() const { return dim_; }
  int num_classes() const { return k_; }
  std::size_t machines() const { return bias_.size(); }
  double gamma() const { return gamma_; }
  const PointSet& support() const { return support_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<double>& bias() const { return bias_; }

  // Training diagnostics; not persisted.
  double training_error = 0.0;
  std::size_t low_margin_count = 0;

  friend bool operator==(const KernelModel& a, const KernelModel& b) {
    return a.dim_ == b.dim_ && a.k_ == b.k_ && a.gamma_ == b.gamma_ &&
           a.support_ == b.support_ && a.coefficients_ == b.coefficients_ &&
           a.bias_ == b.bias_;
  }

 private:
  std::size_t dim_ = 0;
  int k_ = 0;
  double gamma_ = 1.0;
  PointSet support_;
  std::vector<double> coefficients_;
  std::vector<double> bias_;
};

// Kernelized Pegasos (stochastic subgradient on the hinge loss), one-vs-rest
// for more than two classes.
KernelModel TrainRbf(const Dataset& data, const KernelOptions& options,
                     RngSeed seed);

// ---------------------------------------------------------------------------
// Family-erased model

enum class Family { kTree, kForest, kLogistic, kRbf };

std::string_view FamilyName(Family family);
// Accepts "tree"/"decision_tree", "forest"/"random_forest",
// "logistic"/"logistic_regression", "rbf"/"rbf_svm".
Family ParseFamily(std::string_view name);

struct HypothesisSpec {
  Family family = Family::kTree;
  TreeOptions tree;
  ForestOptions forest;
  LogisticOptions logistic;
  KernelOptions kernel;
};

using Hypothesis = std::variant<TreeModel, ForestModel, LogisticModel, KernelModel>;

Hypothesis TrainHypothesis(const HypothesisSpec& spec, const Dataset& data,
                           RngSeed seed);

// A trained classifier plus what it was trained on. Input points always
// have the full oracle dimension; excluded features are dropped before the
// wrapped model sees them.
class CopyModel {
 public:
  CopyModel() = default;
  CopyModel(Hypothesis model, std::size_t input_dim,
            std::vector<std::size_t> excluded_features = {});

  std::vector<Label> predict(const PointSet& points) const;
  Label predict_one(std::span<const double> x) const;

  Family family() const;
  const Hypothesis& model() const { return model_; }
  std::size_t input_dim() const { return input_dim_; }
  int num_classes() const;
  const std::vector<std::size_t>& excluded_features() const { return excluded_; }

  // Fraction of the training points the model disagrees with.
  std::optional<double> training_error;
  // Free-form origin description, e.g. the sampler and seed.
  std::string provenance;

  friend bool operator==(const CopyModel& a, const CopyModel& b) {
    return a.model_ == b.model_ && a.input_dim_ == b.input_dim_ &&
           a.excluded_ == b.excluded_;
  }

 private:
  Hypothesis model_;
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> excluded_;
  std::vector<std::size_t> kept_;
};

std::vector<Label> Predict(const CopyModel& model, const PointSet& points);

// Versioned text format; doubles use shortest round-trip decimal text so a
// write/read cycle reproduces every parameter bit for bit.
void WriteModel(std::ostream& out, const CopyModel& model);
CopyModel ReadModel(std::istream& in);
void SaveModel(const CopyModel& model, const std::string& path);
CopyModel LoadModel(const std::string& path);

}  // namespace copyforge

#endif  // COPYFORGE_MODELS_HPP_
