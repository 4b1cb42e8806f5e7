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

#include "glyphforge/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "glyphforge/error.hpp"

namespace glyphforge {
namespace {

bool AllFinite(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
}

class BatchSampler {
 public:
  BatchSampler(std::size_t count, std::uint64_t seed) : order_(count), rng_(seed) { Reshuffle(); }

  std::vector<std::size_t> Next(int batch_size) {
    std::vector<std::size_t> batch;
    while (static_cast<int>(batch.size()) < batch_size) {
      if (cursor_ == order_.size()) Reshuffle();
      batch.push_back(order_[cursor_++]);
    }
    return batch;
  }

 private:
  void Reshuffle() {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng_() % i]);
    cursor_ = 0;
  }

  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t cursor_ = 0;
};

void CheckDatasetAgainstModel(std::span<const SamplePair> samples, const ModelConfig& model) {
  for (const SamplePair& s : samples) {
    if (s.source.size != model.input_size || s.target.size != model.input_size) {
      throw Error(ErrorCode::kShapeMismatch,
                  "dataset bitmaps are " + std::to_string(s.source.size) + "px but the model expects " +
                      std::to_string(model.input_size) + "px");
    }
    if (s.style_id < 0 || s.style_id >= model.style_count) {
      throw Error(ErrorCode::kConfigInvalid, "sample style " + std::to_string(s.style_id) +
                                                 " is outside the model's K=" +
                                                 std::to_string(model.style_count));
    }
  }
}

void WriteMetric(std::ofstream* file, std::ostream* extra, const std::string& line) {
  if (file && *file) *file << line << '\n' << std::flush;
  if (extra) *extra << line << '\n';
}

}  // namespace

void TrainConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); };
  if (phase != 1 && phase != 2) fail("phase must be 1 or 2");
  if (steps <= 0) fail("steps must be > 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail("lr_decay must be in (0, 1]");
  if (decay_patience < 1) fail("decay_patience must be >= 1");
  if (eval_every < 0 || checkpoint_every < 0) fail("eval_every/checkpoint_every must be >= 0");
  if (loss != "mae") fail("unsupported loss '" + loss + "'");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("Adam betas must be in [0,1)");
}

void AdamOptimizer::Apply(std::span<float> params, std::span<const float> gradient,
                          const TrainConfig& config, double learning_rate) {
  if (first_.size() != params.size()) {
    first_.assign(params.size(), 0.0f);
    second_.assign(params.size(), 0.0f);
  }
  ++steps_;
  const float b1 = static_cast<float>(config.beta1);
  const float b2 = static_cast<float>(config.beta2);
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(steps_));
  const float step = static_cast<float>(learning_rate * std::sqrt(bias2) / bias1);
  const float eps = static_cast<float>(config.adam_epsilon * std::sqrt(bias2));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const float g = gradient[i];
    first_[i] = b1 * first_[i] + (1.0f - b1) * g;
    second_[i] = b2 * second_[i] + (1.0f - b2) * g * g;
    params[i] -= step * first_[i] / (std::sqrt(second_[i]) + eps);
  }
}

StyleWeights PhaseWeights(int phase, int style_id, int style_count) {
  std::vector<double> w(static_cast<std::size_t>(style_count), 0.0);
  if (phase == 2) {
    if (style_id < 0 || style_id >= style_count) {
      throw Error(ErrorCode::kStyleUnknown, "style id " + std::to_string(style_id) + " out of range");
    }
    w[static_cast<std::size_t>(style_id)] = 1.0;
  }
  return StyleWeights(std::move(w));
}

template <typename T>
Tensor<T> StackSources(std::span<const SamplePair* const> batch) {
  const int size = batch.empty() ? 0 : batch[0]->source.size;
  Tensor<T> out(static_cast<int>(batch.size()), 1, size, size);
  for (std::size_t n = 0; n < batch.size(); ++n) {
    std::copy(batch[n]->source.pixels.begin(), batch[n]->source.pixels.end(), out.plane(static_cast<int>(n), 0));
  }
  return out;
}

template <typename T>
Tensor<T> StackTargets(std::span<const SamplePair* const> batch) {
  const int size = batch.empty() ? 0 : batch[0]->target.size;
  Tensor<T> out(static_cast<int>(batch.size()), 1, size, size);
  for (std::size_t n = 0; n < batch.size(); ++n) {
    std::copy(batch[n]->target.pixels.begin(), batch[n]->target.pixels.end(), out.plane(static_cast<int>(n), 0));
  }
  return out;
}

template Tensor<float> StackSources<float>(std::span<const SamplePair* const>);
template Tensor<double> StackSources<double>(std::span<const SamplePair* const>);
template Tensor<float> StackTargets<float>(std::span<const SamplePair* const>);
template Tensor<double> StackTargets<double>(std::span<const SamplePair* const>);

float TrainStep(Parameters& params, AdamOptimizer& optimizer,
                std::span<const SamplePair* const> batch, std::span<const StyleWeights> weights,
                const TrainConfig& config, double learning_rate) {
  if (batch.empty()) throw Error(ErrorCode::kDatasetEmpty, "empty training batch");
  if (weights.size() != batch.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one style vector per batch sample is required");
  }
  for (const StyleWeights& w : weights) {
    const bool zero = std::all_of(w.values().begin(), w.values().end(), [](double v) { return v == 0.0; });
    if (config.phase == 1 && !zero) {
      throw Error(ErrorCode::kConfigInvalid, "phase 1 trains with all-zero style vectors");
    }
  }
  const Tensor<float> sources = StackSources<float>(batch);
  const Tensor<float> targets = StackTargets<float>(batch);
  std::vector<float> gradient;
  const float loss = LossAndGradient<float>(params, sources, weights, targets, &gradient);
  if (!std::isfinite(loss) || loss > kDivergenceLoss || !AllFinite(gradient)) {
    throw Error(ErrorCode::kNumericalDivergence, "numerical divergence (loss " + std::to_string(loss) + ")");
  }
  std::vector<float> backup(params.values().begin(), params.values().end());
  optimizer.Apply(params.values(), gradient, config, learning_rate);
  if (!AllFinite(params.values())) {
    std::copy(backup.begin(), backup.end(), params.values().begin());
    throw Error(ErrorCode::kNumericalDivergence, "numerical divergence (non-finite parameters)");
  }
  return loss;
}

EvalTable Evaluate(const Predictor& predictor, std::span<const SamplePair> samples) {
  if (samples.empty()) throw Error(ErrorCode::kDatasetEmpty, "evaluation split is empty");
  std::map<int, std::pair<double, std::size_t>> acc;
  double total = 0.0;
  for (const SamplePair& s : samples) {
    const std::vector<float> out = predictor(s);
    if (out.size() != s.target.pixels.size()) {
      throw Error(ErrorCode::kShapeMismatch, "prediction size does not match target");
    }
    double err = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) err += std::abs(static_cast<double>(out[i]) - s.target.pixels[i]);
    err /= static_cast<double>(out.size());
    auto& slot = acc[s.style_id];
    slot.first += err;
    slot.second += 1;
    total += err;
  }
  EvalTable table;
  for (const auto& [style, sum] : acc) table.per_style[style] = sum.first / static_cast<double>(sum.second);
  table.samples = samples.size();
  table.overall = total / static_cast<double>(samples.size());
  return table;
}

EvalTable Evaluate(const Checkpoint& checkpoint, std::span<const SamplePair> samples) {
  if (samples.empty()) throw Error(ErrorCode::kDatasetEmpty, "evaluation split is empty");
  CheckDatasetAgainstModel(samples, checkpoint.config());
  const int k = checkpoint.config().style_count;
  const int phase = checkpoint.phase == 1 ? 1 : 2;
  return Evaluate(
      [&](const SamplePair& s) {
        const SamplePair* one[] = {&s};
        const Tensor<float> out = Forward<float>(checkpoint.params, StackSources<float>(one),
                                                 PhaseWeights(phase, s.style_id, k));
        return std::vector<float>(out.values().begin(), out.values().end());
      },
      samples);
}

FitResult Fit(const DatasetSplit& split, const ModelConfig& model, const TrainConfig& phase1,
              const TrainConfig& phase2, const FitOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  model.Validate();
  if (split.train.empty()) throw Error(ErrorCode::kDatasetEmpty, "training split is empty");
  CheckDatasetAgainstModel(split.train, model);
  if (!split.val.empty()) CheckDatasetAgainstModel(split.val, model);
  if (phase1.steps > 0) phase1.Validate();
  if (phase2.steps > 0) phase2.Validate();
  if (phase1.phase != 1 || phase2.phase != 2) {
    throw Error(ErrorCode::kConfigInvalid, "phase configs must be tagged 1 and 2");
  }

  std::ofstream metrics_file;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
    metrics_file.open(options.out_dir / "metrics.tsv", std::ios::trunc);
  }

  FitResult result;
  Checkpoint& ckpt = result.checkpoint;
  ckpt.params = InitModel(model);
  ckpt.phase = 1;
  ckpt.step = 0;

  auto save = [&](Checkpoint& c) {
    if (options.out_dir.empty()) return;
    const auto path = options.out_dir / CheckpointFileName(c.phase, c.step);
    SaveCheckpoint(path, c);
    result.report.final_checkpoint = path;
  };

  std::vector<const SamplePair*> train_ptrs;
  for (const SamplePair& s : split.train) train_ptrs.push_back(&s);

  for (const TrainConfig* cfg : {&phase1, &phase2}) {
    if (cfg->steps == 0) continue;
    // Architecture is identical across phases; only the conditioning changes.
    ckpt.phase = cfg->phase;
    ckpt.step = 0;
    AdamOptimizer optimizer(ckpt.params.values().size());
    BatchSampler sampler(train_ptrs.size(), cfg->seed);
    double lr = cfg->learning_rate;
    double best_val = std::numeric_limits<double>::infinity();
    int stale_evals = 0;

    for (int step = 1; step <= cfg->steps; ++step) {
      std::vector<const SamplePair*> batch;
      std::vector<StyleWeights> weights;
      for (std::size_t idx : sampler.Next(cfg->batch_size)) {
        batch.push_back(train_ptrs[idx]);
        weights.push_back(PhaseWeights(cfg->phase, train_ptrs[idx]->style_id, model.style_count));
      }
      float loss;
      try {
        loss = TrainStep(ckpt.params, optimizer, batch, weights, *cfg, lr);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kNumericalDivergence) save(ckpt);
        throw;
      }
      ckpt.step = step;
      const StepLoss entry{cfg->phase, step, loss};
      result.report.losses.push_back(entry);
      WriteMetric(&metrics_file, options.metrics,
                  std::to_string(step) + '\t' + std::to_string(cfg->phase) + '\t' + std::to_string(loss));
      if (options.on_step) options.on_step(entry);

      if (cfg->eval_every > 0 && step % cfg->eval_every == 0 && !split.val.empty()) {
        const EvalTable table = Evaluate(ckpt, split.val);
        for (const auto& [style, mae] : table.per_style) {
          WriteMetric(&metrics_file, options.metrics,
                      "eval\t" + std::to_string(style) + '\t' + std::to_string(mae));
        }
        if (table.overall < best_val) {
          best_val = table.overall;
          stale_evals = 0;
        } else if (++stale_evals >= cfg->decay_patience) {
          lr *= cfg->lr_decay;
          stale_evals = 0;
        }
      }
      if (cfg->checkpoint_every > 0 && step % cfg->checkpoint_every == 0 && step < cfg->steps) save(ckpt);
    }
    save(ckpt);
  }

  const bool use_val = !split.val.empty();
  result.report.eval_split = use_val ? "val" : "train";
  result.report.final_eval = Evaluate(ckpt, use_val ? split.val : split.train);
  for (const auto& [style, mae] : result.report.final_eval.per_style) {
    WriteMetric(&metrics_file, options.metrics, "eval\t" + std::to_string(style) + '\t' + std::to_string(mae));
  }
  if (ckpt.content_hash.empty()) (void)SerializeCheckpoint(ckpt);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

GradientCheckReport GradientCheck(const ModelConfig& config, int trials, std::uint64_t seed,
                                  double step, const GradientMutation& mutation) {
  config.Validate();
  GradientCheckReport report;
  report.trials = trials;
  report.step = step;
  report.zero_step_reproduces_loss = true;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int batch = 2;

  for (int trial = 0; trial < trials; ++trial) {
    ModelConfig trial_config = config;
    trial_config.seed = config.seed + static_cast<std::uint64_t>(trial);
    BasicParameters<double> params = InitModel(trial_config).Cast<double>();
    // Move scales, shifts and biases off their initial values.
    for (double& v : params.values()) v += 0.2 * (unit(rng) - 0.5);

    Tensor<double> input(batch, 1, config.input_size, config.input_size);
    Tensor<double> target(batch, 1, config.input_size, config.input_size);
    for (double& v : input.values()) v = unit(rng);
    for (double& v : target.values()) v = unit(rng);
    std::vector<StyleWeights> weights;
    for (int n = 0; n < batch; ++n) {
      std::vector<double> w(static_cast<std::size_t>(config.style_count));
      for (double& v : w) v = 2.0 * unit(rng) - 0.5;
      weights.emplace_back(std::move(w));
    }

    std::vector<double> analytic;
    const double loss = LossAndGradient<double>(params, input, weights, target, &analytic);
    if (mutation) mutation(params.layout(), analytic);

    const ParameterLayout& layout = params.layout();
    for (const ParamSpec& spec : layout.arrays()) {
      double& worst_in_array = report.per_array[spec.name];
      for (std::size_t i = spec.offset; i < spec.offset + spec.count; ++i) {
        const double original = params.values()[i];
        params.values()[i] = original + 0.0;
        if (LossAndGradient<double>(params, input, weights, target, nullptr) != loss) {
          report.zero_step_reproduces_loss = false;
        }
        params.values()[i] = original + step;
        const double plus = LossAndGradient<double>(params, input, weights, target, nullptr);
        params.values()[i] = original - step;
        const double minus = LossAndGradient<double>(params, input, weights, target, nullptr);
        params.values()[i] = original;
        const double numeric = (plus - minus) / (2.0 * step);
        const double rel = std::abs(analytic[i] - numeric) /
                           std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
        worst_in_array = std::max(worst_in_array, rel);
        if (rel > report.max_relative_error) {
          report.max_relative_error = rel;
          report.worst_array = spec.name;
          report.worst_index = i - spec.offset;
        }
        ++report.parameters_checked;
      }
    }
  }
  return report;
}

}  // namespace glyphforge
