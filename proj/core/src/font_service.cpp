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

#include "glyphforge/font_service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "glyphforge/error.hpp"
#include "glyphforge/hash.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge {

using Json = nlohmann::ordered_json;

namespace {

// Validation failures that map to 400.
struct RequestError {
  std::string code;
  std::string message;
};

ServiceResponse JsonResponse(int status, const Json& doc) {
  return {status, "application/json", doc.dump()};
}

ServiceResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return JsonResponse(status, Json{{"error", {{"code", code}, {"message", message}}}});
}

int EnvInt(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0 || n > 1 << 30) {
    throw Error(ErrorCode::kConfigInvalid, std::string(name) + " is not a valid integer");
  }
  return static_cast<int>(n);
}

Json ParseBody(const std::string& body) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::out_of_range&) {
    // The parser's only out_of_range is a number that overflows a double.
    throw RequestError{"WeightsNonFinite", "body holds a number outside the finite double range"};
  } catch (const Json::exception&) {
    throw RequestError{"BadRequest", "body is not a JSON object"};
  }
  if (!doc.is_object()) throw RequestError{"BadRequest", "body is not a JSON object"};
  return doc;
}

std::vector<char32_t> ParseChars(const Json& doc, int limit) {
  const auto it = doc.find("chars");
  if (it == doc.end() || !it->is_string()) throw RequestError{"BadRequest", "'chars' must be a string"};
  std::vector<char32_t> chars;
  try {
    chars = DecodeUtf8(it->get_ref<const std::string&>());
  } catch (const Error&) {
    throw RequestError{"BadRequest", "'chars' is not valid UTF-8"};
  }
  if (chars.empty()) throw RequestError{"CharsEmpty", "'chars' is empty"};
  if (static_cast<int>(chars.size()) > limit) {
    throw RequestError{"CharsOverLimit", std::to_string(chars.size()) + " characters exceeds the limit of " +
                                             std::to_string(limit)};
  }
  return chars;
}

StyleWeights ParseWeights(const Json& doc, const char* field, int k) {
  const auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) {
    throw RequestError{"BadRequest", std::string("'") + field + "' must be an array of numbers"};
  }
  std::vector<double> v;
  for (const Json& x : *it) {
    if (!x.is_number()) throw RequestError{"BadRequest", std::string("'") + field + "' holds a non-number"};
    v.push_back(x.get<double>());
  }
  if (static_cast<int>(v.size()) != k) {
    throw RequestError{"StyleDimMismatch", std::string("'") + field + "' has " + std::to_string(v.size()) +
                                               " entries, expected " + std::to_string(k)};
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw RequestError{"WeightsNonFinite", std::string("'") + field + "' is not finite"};
  }
  return StyleWeights(std::move(v));
}

struct RenderedImage {
  char32_t codepoint;
  std::vector<std::uint8_t> png;
};

struct RenderResult {
  std::vector<std::vector<RenderedImage>> frames;  // [weights][char]
  Json skipped = Json::array();
};

// One source rasterization per character, then one forward per vector.
RenderResult RenderAll(const Generator& generator, const std::vector<char32_t>& chars,
                       const std::vector<StyleWeights>& weights) {
  RenderResult result;
  result.frames.resize(weights.size());
  for (char32_t cp : chars) {
    std::optional<GlyphBitmap> source;
    try {
      source = generator.Source(cp);
    } catch (const Error& e) {
      result.skipped.push_back(
          {{"char", EncodeUtf8(cp)}, {"codepoint", CodepointLabel(cp)},
           {"reason", std::string(ErrorCodeName(e.code()))}});
      continue;
    }
    for (std::size_t t = 0; t < weights.size(); ++t) {
      const auto ink = generator.Generate(*source, weights[t]);
      result.frames[t].push_back({cp, EncodePng(InkToImage(ink, generator.size()))});
    }
  }
  return result;
}

Json ImageEntry(const RenderedImage& image, bool raw) {
  Json e{{"char", EncodeUtf8(image.codepoint)}, {"codepoint", CodepointLabel(image.codepoint)}};
  if (!raw) e["png"] = Base64Encode(image.png);
  return e;
}

// multipart/mixed with a content-derived boundary, so equal payloads give
// equal bytes.
ServiceResponse Multipart(const Json& doc, const std::vector<const RenderedImage*>& images,
                          const std::vector<std::string>& names) {
  Sha256 h;
  const std::string head = doc.dump();
  h.Update(head);
  for (const RenderedImage* image : images) h.Update(std::span<const std::uint8_t>(image->png));
  const std::string boundary = "glyphforge-" + h.HexDigest().substr(0, 32);
  std::string body;
  body += "--" + boundary + "\r\nContent-Type: application/json\r\n\r\n" + head + "\r\n";
  for (std::size_t i = 0; i < images.size(); ++i) {
    body += "--" + boundary + "\r\nContent-Type: image/png\r\nContent-Disposition: attachment; filename=\"" +
            names[i] + "\"\r\n\r\n";
    body.append(reinterpret_cast<const char*>(images[i]->png.data()), images[i]->png.size());
    body += "\r\n";
  }
  body += "--" + boundary + "--\r\n";
  return {200, "multipart/mixed; boundary=" + boundary, std::move(body)};
}

bool WantsRaw(const ServiceRequest& request) {
  const auto it = request.query.find("format");
  if (it == request.query.end() || it->second == "json") return false;
  if (it->second == "raw") return true;
  throw RequestError{"BadRequest", "format must be 'json' or 'raw'"};
}

}  // namespace

struct FontService::State {
  std::shared_ptr<const Generator> generator;
  StyleCatalog catalog;
};

struct FontService::Server {
  httplib::Server http;
  std::thread thread;
};

void ServiceConfig::Validate() const {
  if (max_chars <= 0) throw Error(ErrorCode::kConfigInvalid, "max-chars must be positive");
  if (max_steps < 2) throw Error(ErrorCode::kConfigInvalid, "max-steps must be at least 2");
  if (port < 0 || port > 65535) throw Error(ErrorCode::kConfigInvalid, "port out of range");
}

void ServiceConfig::ApplyEnvironment() {
  if (const char* v = std::getenv("GLYPHFORGE_CHECKPOINT"); v && *v) checkpoint_path = v;
  if (const char* v = std::getenv("GLYPHFORGE_CATALOG"); v && *v) catalog_path = v;
  if (const char* v = std::getenv("GLYPHFORGE_HOST"); v && *v) host = v;
  port = EnvInt("GLYPHFORGE_PORT", port);
  max_chars = EnvInt("GLYPHFORGE_MAX_CHARS", max_chars);
  max_steps = EnvInt("GLYPHFORGE_MAX_STEPS", max_steps);
}

FontService::FontService(ServiceConfig config) : config_(std::move(config)) { config_.Validate(); }

FontService::~FontService() { Stop(); }

void FontService::Load() {
  const CatalogFile catalog = ReadCatalogFile(config_.catalog_path);
  Checkpoint checkpoint = LoadCheckpoint(config_.checkpoint_path);
  Font source = Font::FromFile(catalog.source_path);
  Load(std::make_shared<Generator>(std::move(checkpoint), std::move(source), catalog.margin_fraction),
       catalog.catalog);
}

void FontService::Load(std::shared_ptr<const Generator> generator, StyleCatalog catalog) {
  if (generator->config().style_count != catalog.size()) {
    throw Error(ErrorCode::kStyleDimMismatch,
                "checkpoint has K=" + std::to_string(generator->config().style_count) + " but catalog lists " +
                    std::to_string(catalog.size()) + " styles");
  }
  if (owned_state_) throw Error(ErrorCode::kConfigInvalid, "service already loaded");
  owned_state_ = std::make_unique<const State>(State{std::move(generator), std::move(catalog)});
  state_.store(owned_state_.get(), std::memory_order_release);
}

bool FontService::ready() const { return state_.load(std::memory_order_acquire) != nullptr; }

ServiceResponse FontService::Handle(const ServiceRequest& request) const {
  const State* state = state_.load(std::memory_order_acquire);
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";

  if (request.path == "/healthz" && get) {
    if (!state) return JsonResponse(503, Json{{"status", "loading"}});
    const Generator& g = *state->generator;
    return JsonResponse(200, Json{{"status", "ok"},
                                  {"checkpoint_hash", g.checkpoint().content_hash},
                                  {"K", g.config().style_count},
                                  {"input_size", g.config().input_size}});
  }
  const bool known = (request.path == "/styles" && get) ||
                     ((request.path == "/generate" || request.path == "/interpolate") && post);
  if (!known) return ErrorResponse(404, "NotFound", request.method + " " + request.path);
  if (!state) return ErrorResponse(503, "ServiceUnavailable", "model is still loading");

  const Generator& generator = *state->generator;
  const int k = state->catalog.size();
  try {
    if (request.path == "/styles") {
      Json styles = Json::array();
      for (const StyleEntry& s : state->catalog.entries()) styles.push_back({{"id", s.style_id}, {"name", s.name}});
      return JsonResponse(200, Json{{"K", k}, {"styles", std::move(styles)}});
    }

    const bool raw = WantsRaw(request);
    const Json doc = ParseBody(request.body);
    const std::vector<char32_t> chars = ParseChars(doc, config_.max_chars);

    if (request.path == "/generate") {
      const StyleWeights weights = ParseWeights(doc, "weights", k);
      const RenderResult r = RenderAll(generator, chars, {weights});
      Json images = Json::array();
      std::vector<const RenderedImage*> parts;
      std::vector<std::string> names;
      for (const RenderedImage& image : r.frames[0]) {
        images.push_back(ImageEntry(image, raw));
        parts.push_back(&image);
        names.push_back(CodepointLabel(image.codepoint) + ".png");
      }
      Json out{{"size", generator.size()}, {"images", std::move(images)}, {"skipped", r.skipped}};
      return raw ? Multipart(out, parts, names) : JsonResponse(200, out);
    }

    const StyleWeights from = ParseWeights(doc, "from", k);
    const StyleWeights to = ParseWeights(doc, "to", k);
    const auto steps_it = doc.find("steps");
    if (steps_it == doc.end() || !steps_it->is_number_integer()) {
      throw RequestError{"BadRequest", "'steps' must be an integer"};
    }
    const long long steps = steps_it->get<long long>();
    if (steps < 2 || steps > config_.max_steps) {
      throw RequestError{"StepsOutOfRange",
                         "steps must be in [2, " + std::to_string(config_.max_steps) + "]"};
    }
    const auto path = InterpolationPath(from, to, static_cast<int>(steps));
    const RenderResult r = RenderAll(generator, chars, path);
    Json weights = Json::array();
    for (const StyleWeights& w : path) weights.push_back(w.values());
    Json frames = Json::array();
    std::vector<const RenderedImage*> parts;
    std::vector<std::string> names;
    for (std::size_t t = 0; t < r.frames.size(); ++t) {
      Json frame = Json::array();
      for (const RenderedImage& image : r.frames[t]) {
        frame.push_back(ImageEntry(image, raw));
        parts.push_back(&image);
        names.push_back("frame" + std::to_string(t) + "_" + CodepointLabel(image.codepoint) + ".png");
      }
      frames.push_back(std::move(frame));
    }
    Json out{{"size", generator.size()},
             {"steps", steps},
             {"weights", std::move(weights)},
             {"frames", std::move(frames)},
             {"skipped", r.skipped}};
    return raw ? Multipart(out, parts, names) : JsonResponse(200, out);
  } catch (const RequestError& e) {
    return ErrorResponse(400, e.code, e.message);
  } catch (const Error& e) {
    return ErrorResponse(500, std::string(ErrorCodeName(e.code())), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "Internal", e.what());
  }
}

int FontService::Start() {
  if (server_) throw Error(ErrorCode::kConfigInvalid, "service already started");
  auto server = std::make_unique<Server>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ServiceRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    const ServiceResponse response = Handle(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type);
  };
  // Everything goes through Handle so unknown routes get the JSON error body.
  server->http.Get(".*", handler);
  server->http.Post(".*", handler);
  server->http.Put(".*", handler);
  server->http.Delete(".*", handler);
  server->http.Patch(".*", handler);
  int port = config_.port;
  if (port == 0) {
    port = server->http.bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorCode::kIoError, "cannot bind " + config_.host);
  } else if (!server->http.bind_to_port(std::string(config_.host), port)) {
    throw Error(ErrorCode::kIoError, "cannot bind " + config_.host + ":" + std::to_string(port));
  }
  httplib::Server* http = &server->http;
  server->thread = std::thread([http] { http->listen_after_bind(); });
  server->http.wait_until_ready();
  server_ = std::move(server);
  return port;
}

void FontService::Stop() {
  if (!server_) return;
  server_->http.stop();
  if (server_->thread.joinable()) server_->thread.join();
  server_.reset();
}

void FontService::Wait() {
  if (server_ && server_->thread.joinable()) server_->thread.join();
}

}  // namespace glyphforge
