// Copyright 2026 The GlyphForge Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "glyphforge/error.hpp"
#include "glyphforge/trainer.hpp"
#include "test_support.hpp"

namespace glyphforge {
namespace {

using testing::SmallDataset;
using testing::TempDir;

std::vector<const SamplePair*> Pointers(const std::vector<SamplePair>& samples) {
  std::vector<const SamplePair*> out;
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

std::vector<StyleWeights> WeightsFor(const std::vector<const SamplePair*>& batch, int phase, int k) {
  std::vector<StyleWeights> out;
  for (const SamplePair* s : batch) out.push_back(PhaseWeights(phase, s->style_id, k));
  return out;
}

TrainConfig Phase(int phase, int steps, double lr = 2e-3) {
  TrainConfig c;
  c.phase = phase;
  c.steps = steps;
  c.batch_size = 4;
  c.learning_rate = lr;
  c.eval_every = 0;
  return c;
}

TEST(TrainConfigTest, Validation) {
  EXPECT_NO_THROW(Phase(1, 1).Validate());
  for (TrainConfig bad : {Phase(1, 0), Phase(3, 5), Phase(1, 5, 0.0), Phase(2, 5, -1.0)}) {
    EXPECT_THROW(bad.Validate(), Error);
  }
  TrainConfig batch = Phase(1, 5);
  batch.batch_size = 0;
  EXPECT_THROW(batch.Validate(), Error);
  TrainConfig loss = Phase(1, 5);
  loss.loss = "mse";
  EXPECT_THROW(loss.Validate(), Error);
}

TEST(PhaseWeightsTest, ZerosThenOneHot) {
  EXPECT_EQ(PhaseWeights(1, 2, 4).values(), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(PhaseWeights(2, 2, 4).values(), (std::vector<double>{0, 0, 1, 0}));
  EXPECT_THROW(PhaseWeights(2, 4, 4), Error);
}

TEST(TrainStepTest, ExactTargetsGiveZeroLossAndNoUpdate) {
  const Dataset ds = SmallDataset(2, "builtin:top2", 16);
  std::vector<SamplePair> samples = ds.samples;
  const ModelConfig model = testing::SmallModel(16, 2);
  Parameters params = InitModel(model);
  auto batch = Pointers(samples);
  const auto weights = WeightsFor(batch, 2, 2);
  const Tensor<float> out = Forward(params, StackSources<float>(batch), std::span<const StyleWeights>(weights));
  for (std::size_t n = 0; n < samples.size(); ++n) {
    std::copy(out.plane(static_cast<int>(n), 0), out.plane(static_cast<int>(n), 0) + out.plane_size(),
              samples[n].target.pixels.begin());
  }
  const Parameters before = params;
  AdamOptimizer adam(params.values().size());
  const float loss = TrainStep(params, adam, batch, weights, Phase(2, 1), 1e-3);
  EXPECT_EQ(loss, 0.0f);
  EXPECT_TRUE(params == before);
}

TEST(TrainStepTest, ZeroTargetsLossIsMeanOutput) {
  const Dataset ds = SmallDataset(2, "builtin:top2", 16);
  std::vector<SamplePair> samples = ds.samples;
  for (auto& s : samples) std::fill(s.target.pixels.begin(), s.target.pixels.end(), 0.0f);
  Parameters params = InitModel(testing::SmallModel(16, 2));
  auto batch = Pointers(samples);
  const auto weights = WeightsFor(batch, 1, 2);
  const Tensor<float> out = Forward(params, StackSources<float>(batch), std::span<const StyleWeights>(weights));
  double mean = 0.0;
  for (float v : out.values()) mean += v;
  mean /= static_cast<double>(out.size());
  AdamOptimizer adam(params.values().size());
  const float loss = TrainStep(params, adam, batch, weights, Phase(1, 1), 1e-3);
  EXPECT_GT(loss, 0.0f);
  EXPECT_NEAR(loss, mean, 1e-5);
}

TEST(TrainStepTest, LossChangeMatchesFirstOrderPrediction) {
  const Dataset ds = SmallDataset(2, "builtin:top2", 16);
  const ModelConfig model = testing::SmallModel(16, 2);
  Parameters params = InitModel(model);
  auto batch = Pointers(ds.samples);
  const auto weights = WeightsFor(batch, 2, 2);
  const std::span<const StyleWeights> w(weights);
  const Tensor<double> x = StackSources<double>(batch);
  const Tensor<double> y = StackTargets<double>(batch);

  std::vector<double> grad;
  const auto before = params.Cast<double>();
  const double loss0 = LossAndGradient<double>(before, x, w, y, &grad);
  AdamOptimizer adam(params.values().size());
  TrainStep(params, adam, batch, weights, Phase(2, 1), 1e-5);
  const auto after = params.Cast<double>();
  const double loss1 = LossAndGradient<double>(after, x, w, y, nullptr);

  double predicted = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) predicted += grad[i] * (after.values()[i] - before.values()[i]);
  EXPECT_LT(predicted, 0.0);
  EXPECT_LT(loss1, loss0);
  EXPECT_NEAR(loss1 - loss0, predicted, 0.1 * std::abs(predicted));
}

TEST(TrainStepTest, PhaseOneRejectsStyleVectors) {
  const Dataset ds = SmallDataset(2, "builtin:top2", 16);
  Parameters params = InitModel(testing::SmallModel(16, 2));
  auto batch = Pointers(ds.samples);
  AdamOptimizer adam(params.values().size());
  try {
    TrainStep(params, adam, batch, WeightsFor(batch, 2, 2), Phase(1, 1), 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
  }
}

TEST(TrainStepTest, OverflowIsNumericalDivergenceAndParamsSurvive) {
  const Dataset ds = SmallDataset(2, "builtin:top2", 16);
  Parameters params = InitModel(testing::SmallModel(16, 2));
  auto batch = Pointers(ds.samples);
  const auto weights = WeightsFor(batch, 2, 2);
  AdamOptimizer adam(params.values().size());
  const Parameters before = params;
  try {
    TrainStep(params, adam, batch, weights, Phase(2, 1), 1e39);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericalDivergence);
  }
  EXPECT_TRUE(params == before);
}

TEST(EvaluateTest, PerfectStubScoresZero) {
  const Dataset ds = SmallDataset(2);
  const EvalTable t = Evaluate([](const SamplePair& s) { return s.target.pixels; }, ds.samples);
  EXPECT_EQ(t.overall, 0.0);
  ASSERT_EQ(t.per_style.size(), 2u);
  for (const auto& [style, mae] : t.per_style) EXPECT_EQ(mae, 0.0);
  EXPECT_EQ(t.samples, ds.samples.size());
}

TEST(EvaluateTest, ConstantStubMatchesDirectRecomputation) {
  const Dataset ds = SmallDataset(2);
  const EvalTable t = Evaluate(
      [](const SamplePair& s) { return std::vector<float>(s.target.pixels.size(), 0.5f); }, ds.samples);
  // Oracle: mean |0.5 - target| straight from the dataset, per style then overall.
  std::map<int, std::pair<double, int>> acc;
  double total = 0.0;
  for (const SamplePair& s : ds.samples) {
    double e = 0.0;
    for (float p : s.target.pixels) e += std::abs(0.5 - p);
    e /= static_cast<double>(s.target.pixels.size());
    acc[s.style_id].first += e;
    acc[s.style_id].second += 1;
    total += e;
  }
  EXPECT_NEAR(t.overall, total / static_cast<double>(ds.samples.size()), 1e-12);
  for (const auto& [style, sum] : acc) EXPECT_NEAR(t.per_style.at(style), sum.first / sum.second, 1e-12);
  EXPECT_GT(t.overall, 0.3);
}

TEST(EvaluateTest, EmptyAndMismatch) {
  const Dataset ds = SmallDataset(2);
  try {
    Evaluate([](const SamplePair& s) { return s.target.pixels; }, std::span<const SamplePair>());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetEmpty);
  }
  Checkpoint wrong;
  wrong.params = InitModel(testing::SmallModel(64, 2));
  try {
    Evaluate(wrong, ds.samples);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(FitTest, BitIdenticalAcrossRuns) {
  const Dataset ds = SmallDataset(2);
  const DatasetSplit split = SplitDataset(ds, 0.0, 1);
  const ModelConfig model = testing::SmallModel(32, 2);
  FitResult a = Fit(split, model, Phase(1, 6), Phase(2, 6));
  FitResult b = Fit(split, model, Phase(1, 6), Phase(2, 6));
  EXPECT_TRUE(a.checkpoint.params == b.checkpoint.params);
  EXPECT_EQ(SerializeCheckpoint(a.checkpoint), SerializeCheckpoint(b.checkpoint));
  ASSERT_EQ(a.report.losses.size(), 12u);
  for (std::size_t i = 0; i < a.report.losses.size(); ++i) {
    EXPECT_EQ(a.report.losses[i].loss, b.report.losses[i].loss);
    EXPECT_TRUE(std::isfinite(a.report.losses[i].loss));
  }
  EXPECT_EQ(a.checkpoint.phase, 2);
  EXPECT_EQ(a.checkpoint.step, 6);
  EXPECT_EQ(a.report.eval_split, "train");
}

TEST(FitTest, SeedChangesBatchOrder) {
  const Dataset ds = SmallDataset(2);
  const DatasetSplit split = SplitDataset(ds, 0.0, 1);
  TrainConfig other = Phase(1, 6);
  other.seed = 99;
  const FitResult a = Fit(split, testing::SmallModel(32, 2), Phase(1, 6), Phase(2, 1));
  const FitResult b = Fit(split, testing::SmallModel(32, 2), other, Phase(2, 1));
  EXPECT_FALSE(a.checkpoint.params == b.checkpoint.params);
}

TEST(FitTest, PhaseTwoOnlyStartsFromInit) {
  const Dataset ds = SmallDataset(2);
  const DatasetSplit split = SplitDataset(ds, 0.0, 1);
  TrainConfig skip = Phase(1, 0);
  const FitResult r = Fit(split, testing::SmallModel(32, 2), skip, Phase(2, 5));
  ASSERT_EQ(r.report.losses.size(), 5u);
  for (const auto& l : r.report.losses) EXPECT_EQ(l.phase, 2);
  EXPECT_EQ(r.checkpoint.phase, 2);
}

TEST(FitTest, CheckpointsAndMetricsOnDisk) {
  TempDir dir;
  BuildOptions options;
  options.size = 32;
  const Dataset ds = BuildDataset(testing::SourceFont(), testing::TargetFonts(2), LoadCharset("builtin:top8"),
                                  options);
  const DatasetSplit split = SplitDataset(ds, 0.25, 3);
  ASSERT_FALSE(split.val.empty());
  TrainConfig p1 = Phase(1, 4);
  p1.checkpoint_every = 2;
  p1.eval_every = 2;
  TrainConfig p2 = Phase(2, 3);
  FitOptions fo;
  fo.out_dir = dir.path();
  const FitResult r = Fit(split, testing::SmallModel(32, 2), p1, p2, fo);
  for (const char* name : {"ckpt_phase1_step2", "ckpt_phase1_step4", "ckpt_phase2_step3", "metrics.tsv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / name)) << name;
  }
  EXPECT_EQ(r.report.final_checkpoint, dir / "ckpt_phase2_step3");
  EXPECT_EQ(r.report.eval_split, "val");
  // Phase 1 and phase 2 share one architecture.
  const Checkpoint p1_ckpt = LoadCheckpoint(dir / "ckpt_phase1_step4");
  EXPECT_EQ(p1_ckpt.params.values().size(), r.checkpoint.params.values().size());
  EXPECT_EQ(LoadCheckpoint(dir / "ckpt_phase2_step3").content_hash, r.checkpoint.content_hash);

  std::ifstream metrics(dir / "metrics.tsv");
  std::string line;
  int steps = 0, evals = 0;
  while (std::getline(metrics, line)) {
    std::istringstream fields(line);
    std::string a, b, c, extra;
    ASSERT_TRUE(fields >> a >> b >> c) << line;
    EXPECT_FALSE(fields >> extra) << line;
    if (a == "eval") {
      ++evals;
      EXPECT_TRUE(b == "0" || b == "1");
    } else {
      ++steps;
      EXPECT_TRUE(b == "1" || b == "2");
    }
  }
  EXPECT_EQ(steps, 7);
  EXPECT_EQ(evals, 2 * 2 + 2);  // two phase-1 evals and the final table
}

TEST(FitTest, DivergenceKeepsLastGoodCheckpoint) {
  TempDir dir;
  const Dataset ds = SmallDataset(2);
  const DatasetSplit split = SplitDataset(ds, 0.0, 1);
  FitOptions fo;
  fo.out_dir = dir.path();
  try {
    Fit(split, testing::SmallModel(32, 2), Phase(1, 20, 1e12), Phase(2, 5, 1e12), fo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericalDivergence);
  }
  int found = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    if (entry.path().filename().string().starts_with("ckpt_")) {
      ++found;
      const Checkpoint c = LoadCheckpoint(entry.path());
      for (float v : c.params.values()) ASSERT_TRUE(std::isfinite(v));
    }
  }
  EXPECT_GE(found, 1);
}

TEST(FitTest, EmptyTrainIsDatasetEmpty) {
  DatasetSplit split;
  try {
    Fit(split, testing::SmallModel(32, 2), Phase(1, 1), Phase(2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetEmpty);
  }
}

ModelConfig TinyGradConfig() {
  ModelConfig c;
  c.input_size = 8;
  c.depth = 2;
  c.base_channels = 4;
  c.style_count = 2;
  return c;
}

TEST(GradientCheckTest, TinyConfigPasses) {
  const GradientCheckReport r = GradientCheck(TinyGradConfig(), 3, 1, 1e-4);
  EXPECT_LT(r.max_relative_error, 1e-3);
  EXPECT_TRUE(r.zero_step_reproduces_loss);
  EXPECT_EQ(r.parameters_checked, 3u * 1369u);
  EXPECT_EQ(r.per_array.size(), InitModel(TinyGradConfig()).layout().arrays().size());
}

TEST(GradientCheckTest, NegatedKernelGradientFails) {
  const GradientCheckReport r =
      GradientCheck(TinyGradConfig(), 3, 1, 1e-4, [](const ParameterLayout& layout, std::vector<double>& g) {
        const ParamSpec& s = layout.arrays()[0];
        for (std::size_t i = s.offset; i < s.offset + s.count; ++i) g[i] = -g[i];
      });
  EXPECT_GT(r.max_relative_error, 0.1);
  EXPECT_EQ(r.worst_array, "enc0.weight");
}

}  // namespace
}  // namespace glyphforge
