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
#include <memory>

#include "commands.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/trainer.hpp"

namespace glyphforge::cli {
namespace {

struct GradcheckArgs {
  int size = 8;
  int depth = 2;
  int base = 4;
  int cap = 512;
  int k = 2;
  int trials = 3;
  double step = 1e-4;
  double threshold = 1e-3;
  std::uint64_t seed = 1;
  bool per_array = false;
};

int RunGradcheck(const GradcheckArgs& args) {
  ModelConfig config;
  config.input_size = args.size;
  config.depth = args.depth;
  config.base_channels = args.base;
  config.channel_cap = args.cap;
  config.style_count = args.k;
  config.seed = args.seed;
  const GradientCheckReport report = GradientCheck(config, args.trials, args.seed, args.step);
  if (args.per_array) {
    for (const auto& [name, err] : report.per_array) std::printf("array=%s max_relative_error=%.3e\n", name.c_str(), err);
  }
  std::printf("checked=%zu trials=%d step=%g\n", report.parameters_checked, report.trials, report.step);
  std::printf("worst=%s[%zu] zero_step_reproduces_loss=%s\n", report.worst_array.c_str(), report.worst_index,
              report.zero_step_reproduces_loss ? "yes" : "no");
  std::printf("max_relative_error=%.3e\n", report.max_relative_error);
  if (!(report.max_relative_error < args.threshold)) {
    throw Error(ErrorCode::kNumericalDivergence,
                "gradient check failed: max relative error above " + std::to_string(args.threshold));
  }
  return kExitOk;
}

}  // namespace

void RegisterGradcheck(Registry& registry) {
  CLI::App* cmd = registry.app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  auto a = std::make_shared<GradcheckArgs>();
  cmd->add_option("--size", a->size, "Input side")->check(PowerOfTwo())->capture_default_str();
  cmd->add_option("--depth", a->depth, "Encoder stages")->check(CLI::Range(1, 10))->capture_default_str();
  cmd->add_option("--base", a->base, "Channels of the first stage")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--cap", a->cap, "Channel cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--k", a->k, "Style count")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--trials", a->trials, "Random draws")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--step", a->step, "Central-difference step")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--threshold", a->threshold, "Fail above this error")->capture_default_str();
  cmd->add_option("--seed", a->seed, "Draw and initialization seed")->capture_default_str();
  cmd->add_flag("--per-array", a->per_array, "Print the worst error per parameter array");
  registry.actions.emplace_back(cmd, [a] { return RunGradcheck(*a); });
}

}  // namespace glyphforge::cli
