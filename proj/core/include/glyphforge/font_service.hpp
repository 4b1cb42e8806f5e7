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

// HTTP inference service.
//
//   GET  /healthz      200 {status, checkpoint_hash, K, input_size}, or 503
//   GET  /styles       {K, styles: [{id, name}]}
//   POST /generate     {chars, weights}             -> {size, images, skipped}
//   POST /interpolate  {chars, from, to, steps}     -> {size, steps, weights, frames, skipped}
//
// Images are 8-bit grayscale PNG, base64 in the JSON document. With
// ?format=raw the reply is multipart/mixed: a JSON part without image data,
// then one image/png part per image. Errors are 400 (or 503 while loading)
// with {"error": {"code", "message"}}.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "glyphforge/glyph_corpus.hpp"
#include "glyphforge/style_mixer.hpp"

namespace glyphforge {

struct ServiceConfig {
  std::string checkpoint_path;
  std::string catalog_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  int max_chars = 64;
  int max_steps = 33;

  // Throws Error(kConfigInvalid).
  void Validate() const;
  // GLYPHFORGE_CHECKPOINT, _CATALOG, _HOST, _PORT, _MAX_CHARS, _MAX_STEPS.
  void ApplyEnvironment();
};

struct ServiceRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class FontService {
 public:
  explicit FontService(ServiceConfig config);
  ~FontService();
  FontService(const FontService&) = delete;
  FontService& operator=(const FontService&) = delete;

  // Reads checkpoint, catalog and the catalog's source font, then opens the
  // readiness gate. Throws on any failure; the service stays unready.
  void Load();
  // Same, from objects already in memory.
  void Load(std::shared_ptr<const Generator> generator, StyleCatalog catalog);
  bool ready() const;

  ServiceResponse Handle(const ServiceRequest& request) const;

  // Binds (port 0 picks an ephemeral port) and serves on a background
  // thread. Returns the bound port.
  int Start();
  void Stop();
  // Blocks until Stop() is called from another thread or a signal handler.
  void Wait();

 private:
  struct State;
  struct Server;
  ServiceConfig config_;
  std::unique_ptr<const State> owned_state_;
  std::atomic<const State*> state_{nullptr};
  std::unique_ptr<Server> server_;
};

}  // namespace glyphforge
