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

#pragma once

// Two-phase training: phase 1 fits source->target pairs with an all-zero
// style vector, phase 2 resumes the same parameters with one-hot style
// vectors. Loss is mean absolute pixel error; updates use Adam.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/checkpoint.hpp"
#include "glyphforge/glyph_corpus.hpp"
#include "glyphforge/style_unet.hpp"

namespace glyphforge {

inline constexpr double kDivergenceLoss = 1e3;

struct TrainConfig {
  int phase = 1;
  int steps = 100;
  int batch_size = 16;
  double learning_rate = 2e-4;
  double lr_decay = 0.5;     // applied after `decay_patience` evals without improvement
  int decay_patience = 3;
  int eval_every = 100;      // validation cadence in steps; 0 disables
  std::uint64_t seed = 7;
  int checkpoint_every = 0;  // 0: only at the end of the phase
  std::string loss = "mae";
  double beta1 = 0.5;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Throws Error(kConfigInvalid).
  void Validate() const;
};

// Adam moment estimates, one slot per parameter.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  explicit AdamOptimizer(std::size_t parameter_count)
      : first_(parameter_count, 0.0f), second_(parameter_count, 0.0f) {}

  void Apply(std::span<float> params, std::span<const float> gradient, const TrainConfig& config,
             double learning_rate);
  std::int64_t steps() const { return steps_; }

 private:
  std::vector<float> first_;
  std::vector<float> second_;
  std::int64_t steps_ = 0;
};

// Conditioning used for a sample in a phase: zeros in phase 1, one-hot of
// the sample's target style in phase 2.
StyleWeights PhaseWeights(int phase, int style_id, int style_count);

template <typename T>
Tensor<T> StackSources(std::span<const SamplePair* const> batch);
template <typename T>
Tensor<T> StackTargets(std::span<const SamplePair* const> batch);

// One optimizer update. Throws Error(kNumericalDivergence) when the loss
// exceeds kDivergenceLoss or the loss, gradient, or updated parameters are
// non-finite; params are left untouched in that case.
float TrainStep(Parameters& params, AdamOptimizer& optimizer,
                std::span<const SamplePair* const> batch, std::span<const StyleWeights> weights,
                const TrainConfig& config, double learning_rate);

struct StepLoss {
  int phase = 0;
  std::int64_t step = 0;
  double loss = 0.0;
};

struct EvalTable {
  std::map<int, double> per_style;  // style_id -> mean absolute error
  double overall = 0.0;
  std::size_t samples = 0;
};

struct TrainReport {
  std::vector<StepLoss> losses;
  EvalTable final_eval;
  std::string eval_split;  // "val", or "train" when the split has no val set
  double wall_seconds = 0.0;
  std::filesystem::path final_checkpoint;
};

struct FitOptions {
  std::filesystem::path out_dir;   // checkpoints + metrics.tsv; empty keeps everything in memory
  std::ostream* metrics = nullptr; // extra sink for metrics lines
  std::function<void(const StepLoss&)> on_step;
};

struct FitResult {
  Checkpoint checkpoint;
  TrainReport report;
};

FitResult Fit(const DatasetSplit& split, const ModelConfig& model, const TrainConfig& phase1,
              const TrainConfig& phase2, const FitOptions& options = {});

// Evaluation-mode forward over every sample, weights per the checkpoint's
// phase.
EvalTable Evaluate(const Checkpoint& checkpoint, std::span<const SamplePair> samples);

// Same metric for an arbitrary predictor (used with stubs in tests).
using Predictor = std::function<std::vector<float>(const SamplePair&)>;
EvalTable Evaluate(const Predictor& predictor, std::span<const SamplePair> samples);

struct GradientCheckReport {
  double max_relative_error = 0.0;
  std::string worst_array;
  std::size_t worst_index = 0;
  std::map<std::string, double> per_array;  // max relative error per named array
  std::size_t parameters_checked = 0;
  int trials = 0;
  double step = 1e-4;
  bool zero_step_reproduces_loss = false;
};

// Optional test hook applied to every analytic gradient before comparison.
using GradientMutation = std::function<void(const ParameterLayout&, std::vector<double>&)>;

// Central differences in double precision against the analytic gradient for
// `trials` random (input, target, weights) draws. Relative error is
// |ga - gfd| / max(1e-8, |ga| + |gfd|).
GradientCheckReport GradientCheck(const ModelConfig& config, int trials, std::uint64_t seed = 1,
                                  double step = 1e-4, const GradientMutation& mutation = {});

}  // namespace glyphforge
