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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include <doctest.h>

#include "copyforge/config.hpp"
#include "copyforge/copying.hpp"
#include "copyforge/data.hpp"

using namespace copyforge;

namespace {

Oracle ThresholdOracle(std::size_t dim, double t) {
  return Oracle(dim, 2, [t](const PointSet& p) {
    std::vector<Label> out;
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back(p.at(i, 0) > t ? 1 : 0);
    return out;
  });
}

HypothesisSpec Spec(Family f) {
  HypothesisSpec s;
  s.family = f;
  return s;
}

SyntheticSet MoonsSynthetic(std::size_t n) {
  const Dataset d = MakeMoons(n, 0.1, {1});
  SyntheticSet s;
  s.points = d.points;
  s.labels = d.labels;
  s.k = 2;
  return s;
}

}  // namespace

TEST_CASE("tree copy of a threshold oracle has zero synthetic error") {
  Oracle o = ThresholdOracle(2, 0.0);
  CopyConfig c;
  c.hypothesis = Spec(Family::kTree);
  c.sampler = SamplingDistribution::Uniform(Domain({{-1, 1}, {-1, 1}}));
  c.n_samples = 1000;
  c.balanced = false;
  c.seed = {1};
  const CopyResult r = SinglePassCopy(o, c);
  CHECK(r.synthetic.size() == 1000);
  CHECK(r.r_emp_synthetic == 0.0);
  CHECK_FALSE(r.fidelity.has_value());
}

TEST_CASE("full-depth tree memorizes any oracle-labelled set") {
  auto original = std::make_shared<CopyModel>(
      TrainRbf(MakeMoons(300, 0.3, {2}), {5.0, 1e-5, 5, false}, {1}), 2);
  Oracle o = Oracle::FromModel(original);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CopyConfig c;
    c.hypothesis = Spec(Family::kTree);
    c.sampler = SamplingDistribution::StandardNormal(2);
    c.n_samples = 3000;
    c.seed = {seed};
    CHECK(SinglePassCopy(o, c).r_emp_synthetic == 0.0);
  }
}

TEST_CASE("tree copy of an rbf moons original tracks its accuracy") {
  const Dataset moons = MakeMoons(2000, 0.1, {3});
  const auto [train, test] = StratifiedSplit(moons, 0.2, {4});
  auto original = std::make_shared<CopyModel>(TrainRbf(train, {1.0, 1e-5, 5, false}, {5}), 2);
  const double acc_original = CopyAccuracy(*original, test);
  Oracle o = Oracle::FromModel(original);

  CopyConfig c;
  c.hypothesis = Spec(Family::kTree);
  c.sampler = SamplingDistribution::Uniform(Domain({{-3.5, 3.5}, {-3.5, 3.5}}));
  c.n_samples = 100000;
  c.seed = {6};
  EvaluationData eval{acc_original, &test, &train};
  const CopyResult r = SinglePassCopy(o, c, &eval);
  REQUIRE(r.fidelity.has_value());
  CHECK(acc_original > 0.9);
  CHECK(std::abs(*r.fidelity->acc_copy - acc_original) <= 0.05);
  CHECK(*r.fidelity->r_emp_original < 0.05);
  CHECK(r.fidelity->acc_copy_estimated ==
        doctest::Approx(acc_original * (1.0 - *r.fidelity->r_emp_original)).epsilon(1e-12));
  CHECK(r.volume.fractions[0] == doctest::Approx(0.5));
}

TEST_CASE("excluding the only informative feature leaves the majority rate") {
  // label = x_0 > 0.3 on the unit square; class 1 covers 70%.
  Oracle o = ThresholdOracle(2, 0.3);
  Dataset test;
  test.points = Sample(SamplingDistribution::Uniform(Domain({{0, 1}, {0, 1}})), 5000, {7});
  test.k = 2;
  test.labels = o.query(test.points);
  CopyConfig c;
  // A hypothesis that can fall back on the class prior; with no signal a
  // full-depth tree reproduces label noise instead.
  c.hypothesis = Spec(Family::kLogistic);
  c.sampler = SamplingDistribution::Uniform(Domain({{0, 1}, {0, 1}}));
  c.n_samples = 5000;
  c.balanced = false;
  c.seed = {8};
  c.excluded_features = {0};
  EvaluationData eval{1.0, &test, nullptr};
  const CopyResult r = SinglePassCopy(o, c, &eval);
  CHECK(r.model.input_dim() == 2);
  CHECK(*r.fidelity->acc_copy == doctest::Approx(0.7).epsilon(0.03 / 0.7));
}

TEST_CASE("single-pass copy is bit-reproducible") {
  auto original = std::make_shared<CopyModel>(TrainTree(MakeMoons(200, 0.2, {9})), 2);
  for (Family f : {Family::kTree, Family::kForest, Family::kLogistic, Family::kRbf}) {
    CopyConfig c;
    c.hypothesis = Spec(f);
    c.sampler = SamplingDistribution::StandardNormal(2);
    c.n_samples = 800;
    c.seed = {10};
    Oracle a = Oracle::FromModel(original);
    Oracle b = Oracle::FromModel(original);
    const CopyResult ra = SinglePassCopy(a, c);
    const CopyResult rb = SinglePassCopy(b, c);
    CHECK(ra.model == rb.model);
    CHECK(ra.synthetic.points == rb.synthetic.points);
    CHECK(ra.synthetic.labels == rb.synthetic.labels);
    CHECK(ra.r_emp_synthetic == rb.r_emp_synthetic);
  }
}

TEST_CASE("copy preconditions") {
  Oracle o = ThresholdOracle(2, 0.0);
  CopyConfig c;
  c.hypothesis = Spec(Family::kTree);
  c.sampler = SamplingDistribution::StandardNormal(3);
  CHECK_THROWS_AS(SinglePassCopy(o, c), Error);
  c.sampler = SamplingDistribution::StandardNormal(2);
  c.n_samples = 0;
  CHECK_THROWS_AS(SinglePassCopy(o, c), Error);
  c.n_samples = 10;
  c.excluded_features = {2};
  CHECK_THROWS_AS(SinglePassCopy(o, c), Error);
  Oracle one_class(2, 2, [](const PointSet& p) { return std::vector<Label>(p.size(), 0); });
  c.excluded_features = {};
  c.max_draws = 1000;
  try {
    SinglePassCopy(one_class, c);
    FAIL("expected quota error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kQuotaUnreachable);
  }
}

TEST_CASE("sweep with a single grid value returns it") {
  CapacityConfig cap;
  cap.grid = {2.0};
  const SweepResult r = CapacitySweep(MoonsSynthetic(400), cap, Spec(Family::kRbf), {1});
  CHECK(r.selected_capacity == 2.0);
  CHECK(r.selected_index == 0);
  CHECK(r.trace.size() == 1);
  CHECK(r.trace[0].feasible);
  CHECK(r.reference_error == r.trace[0].validation_error);
}

TEST_CASE("slack tolerance selects the smallest capacity") {
  CapacityConfig cap;
  cap.grid = LogSpacedGrid(100.0, 0.01, 9);
  cap.epsilon = 1.0;
  const SweepResult r = CapacitySweep(MoonsSynthetic(400), cap, Spec(Family::kRbf), {1});
  CHECK(r.selected_capacity == cap.grid.back());
  CHECK(r.trace.size() == cap.grid.size());
  CHECK(r.model.family() == Family::kRbf);
  CHECK(std::get<KernelModel>(r.model.model()).gamma() == cap.grid.back());
}

TEST_CASE("sweep selection is feasible and the next trace entry is not") {
  CapacityConfig cap;
  cap.grid = {12, 10, 8, 6, 5, 4, 3, 2, 1};
  cap.epsilon = 0.02;
  const SyntheticSet s = MoonsSynthetic(1000);
  const SweepResult r = CapacitySweep(s, cap, Spec(Family::kTree), {2});
  const auto& chosen = r.trace[r.selected_index];
  CHECK(chosen.feasible);
  CHECK(std::abs(chosen.validation_error - r.reference_error) < cap.epsilon);
  CHECK(r.selected_capacity == chosen.capacity);
  if (r.selected_index + 1 < r.trace.size()) {
    CHECK_FALSE(r.trace[r.selected_index + 1].feasible);
    CHECK(r.trace.size() == r.selected_index + 2);
  } else {
    CHECK(r.trace.size() == cap.grid.size());
  }
  CHECK(r.selected_capacity < 12);
  CHECK(r.trace.back().capacity > 1);
  CHECK(std::get<TreeModel>(r.model.model()).depth() <= static_cast<int>(r.selected_capacity));
  const SweepResult again = CapacitySweep(s, cap, Spec(Family::kTree), {2});
  CHECK(again.model == r.model);
  CHECK(again.selected_capacity == r.selected_capacity);
}

TEST_CASE("sweep configuration errors") {
  CapacityConfig cap;
  CHECK_THROWS_AS(cap.validate(), Error);
  cap.grid = {1.0, 2.0};
  CHECK_THROWS_AS(cap.validate(), Error);
  cap.grid = {2.0, 1.0};
  cap.epsilon = 0.0;
  CHECK_THROWS_AS(cap.validate(), Error);
  cap.epsilon = 1e-4;
  CHECK_NOTHROW(cap.validate());
  CHECK_THROWS_AS(WithCapacity(Spec(Family::kLogistic), 1.0), Error);
  CHECK_THROWS_AS(WithCapacity(Spec(Family::kTree), 2.5), Error);
  CHECK(WithCapacity(Spec(Family::kForest), 3.0).forest.max_depth == 3);
  // A non-divergence failure at a grid point is not skipped.
  cap.grid = {1.0, -1.0};
  CHECK_THROWS_AS(CapacitySweep(MoonsSynthetic(100), cap, Spec(Family::kRbf), {1}), Error);
}

TEST_CASE("mask_features") {
  SyntheticSet s;
  s.points = Sample(SamplingDistribution::StandardNormal(3), 50, {11});
  s.labels.assign(50, 0);
  for (std::size_t i = 0; i < 50; i += 3) s.labels[i] = 1;
  s.k = 2;

  const std::vector<std::size_t> drop_middle = {1};
  const SyntheticSet m = MaskFeatures(s, drop_middle);
  CHECK(m.dim() == 2);
  CHECK(m.size() == 50);
  CHECK(m.labels == s.labels);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(m.points.at(i, 0) == s.points.at(i, 0));
    CHECK(m.points.at(i, 1) == s.points.at(i, 2));
  }
  const SyntheticSet same = MaskFeatures(s, {});
  CHECK(same.points == s.points);
  const std::vector<std::size_t> all = {0, 1, 2};
  const std::vector<std::size_t> dup = {1, 1};
  const std::vector<std::size_t> out_of_range = {3};
  CHECK_THROWS_AS(MaskFeatures(s, all), Error);
  CHECK_THROWS_AS(MaskFeatures(s, dup), Error);
  CHECK_THROWS_AS(MaskFeatures(s, out_of_range), Error);

  std::vector<std::size_t> perm(50);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), MakeRng({12}));
  SyntheticSet permuted = s;
  permuted.points = s.points.select(perm);
  const std::vector<std::size_t> drop_two = {0, 2};
  CHECK(MaskFeatures(permuted, drop_two).points == MaskFeatures(s, drop_two).points.select(perm));
}
