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

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <memory>
#include <thread>

#include "commands.hpp"
#include "glyphforge/font_service.hpp"

namespace glyphforge::cli {
namespace {

std::atomic<bool> g_stop{false};

extern "C" void OnSignal(int) { g_stop.store(true); }

struct ServeArgs {
  ServiceConfig config;
  std::uint64_t seed = 0;
};

int RunServe(const ServeArgs& args) {
  FontService service(args.config);
  // Bind first so early requests see 503 rather than a refused connection.
  const int port = service.Start();
  std::printf("listening host=%s port=%d\n", args.config.host.c_str(), port);
  std::fflush(stdout);
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  service.Load();
  std::printf("ready\n");
  std::fflush(stdout);
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.Stop();
  std::printf("stopped\n");
  return kExitOk;
}

}  // namespace

void RegisterServe(Registry& registry) {
  CLI::App* cmd = registry.app.add_subcommand("serve", "HTTP inference service");
  auto a = std::make_shared<ServeArgs>();
  ServiceConfig& c = a->config;
  cmd->add_option("--checkpoint", c.checkpoint_path, "Checkpoint file")->required()->envname("GLYPHFORGE_CHECKPOINT");
  cmd->add_option("--catalog", c.catalog_path, "Style catalog file")->required()->envname("GLYPHFORGE_CATALOG");
  cmd->add_option("--host", c.host, "Bind address")->envname("GLYPHFORGE_HOST")->capture_default_str();
  cmd->add_option("--port", c.port, "Port (0: ephemeral)")->check(CLI::Range(0, 65535))->envname("GLYPHFORGE_PORT")
      ->capture_default_str();
  cmd->add_option("--max-chars", c.max_chars, "Characters per request")->check(CLI::PositiveNumber)
      ->envname("GLYPHFORGE_MAX_CHARS")->capture_default_str();
  cmd->add_option("--max-steps", c.max_steps, "Frames per interpolation")->check(CLI::Range(2, 100000))
      ->envname("GLYPHFORGE_MAX_STEPS")->capture_default_str();
  cmd->add_option("--seed", a->seed, "Accepted for uniformity; inference is deterministic");
  registry.actions.emplace_back(cmd, [a] { return RunServe(*a); });
}

}  // namespace glyphforge::cli
