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

#include <cstdio>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/trainer.hpp"

namespace glyphforge::cli {
namespace {

struct TrainArgs {
  std::string dataset;
  int size = 0;  // 0: take from the dataset
  int depth = 4;
  int base = 32;
  int cap = 512;
  int k = 0;     // 0: take from the dataset
  int phase1_steps = 500;
  int phase2_steps = 1500;
  int batch = 16;
  double lr = 2e-4;
  double lr_decay = 0.5;
  int decay_patience = 3;
  int eval_every = 100;
  int checkpoint_every = 0;
  int log_every = 100;
  double val_fraction = 0.1;
  std::uint64_t seed = 7;
  std::string out;
};

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string split = "all";
  double val_fraction = 0.1;
  std::uint64_t seed = 7;
};

std::vector<SamplePair> SelectSplit(const Dataset& dataset, const std::string& which, double val_fraction,
                                    std::uint64_t seed) {
  if (which == "all") return dataset.samples;
  DatasetSplit split = SplitDataset(dataset, val_fraction, seed);
  return which == "train" ? std::move(split.train) : std::move(split.val);
}

void PrintTable(const EvalTable& table, const StyleCatalog& catalog) {
  for (const auto& [style, mae] : table.per_style) {
    std::printf("eval style=%d name=%s mae=%.6f\n", style, catalog.at(style).name.c_str(), mae);
  }
}

int RunTrain(const TrainArgs& args) {
  const Dataset dataset = LoadDataset(args.dataset);
  const StyleCatalog catalog = dataset.Catalog();
  ModelConfig model;
  model.input_size = dataset.manifest.size;
  if (args.size != 0 && args.size != model.input_size) {
    throw Error(ErrorCode::kShapeMismatch, "--size " + std::to_string(args.size) + " but dataset bitmaps are " +
                                               std::to_string(model.input_size));
  }
  model.depth = args.depth;
  model.base_channels = args.base;
  model.channel_cap = args.cap;
  model.style_count = catalog.size();
  if (args.k != 0 && args.k != model.style_count) {
    throw Error(ErrorCode::kStyleDimMismatch, "--k " + std::to_string(args.k) + " but dataset has " +
                                                  std::to_string(model.style_count) + " styles");
  }
  model.seed = args.seed;

  TrainConfig phase1;
  phase1.phase = 1;
  phase1.steps = args.phase1_steps;
  phase1.batch_size = args.batch;
  phase1.learning_rate = args.lr;
  phase1.lr_decay = args.lr_decay;
  phase1.decay_patience = args.decay_patience;
  phase1.eval_every = args.eval_every;
  phase1.checkpoint_every = args.checkpoint_every;
  phase1.seed = args.seed;
  TrainConfig phase2 = phase1;
  phase2.phase = 2;
  phase2.steps = args.phase2_steps;

  const DatasetSplit split = SplitDataset(dataset, args.val_fraction, args.seed);
  std::printf("train=%zu val=%zu params=%zu\n", split.train.size(), split.val.size(), ParameterCount(model));
  std::fflush(stdout);

  FitOptions options;
  options.out_dir = args.out;
  options.on_step = [&](const StepLoss& s) {
    if (args.log_every > 0 && (s.step % args.log_every == 0)) {
      std::printf("phase=%d step=%lld loss=%.6f\n", s.phase, static_cast<long long>(s.step), s.loss);
      std::fflush(stdout);
    }
  };
  const FitResult result = Fit(split, model, phase1, phase2, options);
  PrintTable(result.report.final_eval, catalog);
  std::printf("final_mae=%.6f split=%s\n", result.report.final_eval.overall, result.report.eval_split.c_str());
  std::printf("checkpoint=%s\n", result.report.final_checkpoint.string().c_str());
  std::printf("checkpoint_hash=%s wall_seconds=%.1f\n", result.checkpoint.content_hash.c_str(),
              result.report.wall_seconds);
  return kExitOk;
}

int RunEval(const EvalArgs& args) {
  const Checkpoint checkpoint = LoadCheckpoint(args.checkpoint);
  const Dataset dataset = LoadDataset(args.dataset);
  const std::vector<SamplePair> samples = SelectSplit(dataset, args.split, args.val_fraction, args.seed);
  const EvalTable table = Evaluate(checkpoint, samples);
  PrintTable(table, dataset.Catalog());
  std::printf("overall_mae=%.6f samples=%zu split=%s\n", table.overall, table.samples, args.split.c_str());
  return kExitOk;
}

}  // namespace

void RegisterTrain(Registry& registry) {
  CLI::App* cmd = registry.app.add_subcommand("train", "Two-phase training on a dataset file");
  auto a = std::make_shared<TrainArgs>();
  cmd->add_option("--dataset", a->dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--size", a->size, "Expected bitmap side (checked against the dataset)")->check(PowerOfTwo());
  cmd->add_option("--depth", a->depth, "Encoder stages")->check(CLI::Range(1, 10))->capture_default_str();
  cmd->add_option("--base", a->base, "Channels of the first stage")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--cap", a->cap, "Channel cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--k", a->k, "Expected style count (checked against the dataset)")->check(CLI::PositiveNumber);
  cmd->add_option("--phase1-steps", a->phase1_steps, "Unconditioned steps")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--phase2-steps", a->phase2_steps, "One-hot steps")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--batch", a->batch, "Batch size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr", a->lr, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr-decay", a->lr_decay, "Plateau decay factor")->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--decay-patience", a->decay_patience, "Evaluations without improvement before decay")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--eval-every", a->eval_every, "Validation cadence in steps (0: off)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--checkpoint-every", a->checkpoint_every, "Checkpoint cadence in steps (0: phase ends only)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--log-every", a->log_every, "Progress line cadence (0: quiet)")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--val-fraction", a->val_fraction, "Codepoints held out for validation")
      ->check(CLI::Range(0.0, 0.9))->capture_default_str();
  cmd->add_option("--seed", a->seed, "Initialization, batch order and split seed")->capture_default_str();
  cmd->add_option("--out", a->out, "Output directory")->required();
  registry.actions.emplace_back(cmd, [a] {
    if (a->phase1_steps == 0 && a->phase2_steps == 0) {
      throw CLI::ValidationError("--phase1-steps/--phase2-steps", "at least one phase needs steps");
    }
    return RunTrain(*a);
  });
}

void RegisterEval(Registry& registry) {
  CLI::App* eval = registry.app.add_subcommand("eval", "Per-style mean absolute error of a checkpoint");
  auto e = std::make_shared<EvalArgs>();
  eval->add_option("--checkpoint", e->checkpoint, "Checkpoint file")->required();
  eval->add_option("--dataset", e->dataset, "Dataset file")->required();
  eval->add_option("--split", e->split, "Samples to score")->check(CLI::IsMember({"all", "train", "val"}))
      ->capture_default_str();
  eval->add_option("--val-fraction", e->val_fraction, "Split fraction (as used for training)")
      ->check(CLI::Range(0.0, 0.9))->capture_default_str();
  eval->add_option("--seed", e->seed, "Split seed (as used for training)")->capture_default_str();
  registry.actions.emplace_back(eval, [e] { return RunEval(*e); });
}

}  // namespace glyphforge::cli
