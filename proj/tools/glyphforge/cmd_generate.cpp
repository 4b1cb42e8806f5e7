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
#include <optional>

#include "commands.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/text.hpp"

namespace glyphforge::cli {
namespace {

struct GenArgs {
  std::string checkpoint;
  std::string catalog;
  std::string chars;
  std::string mix;
  std::string style;
  std::string out;
  std::uint64_t seed = 0;
};

struct InterpolateArgs {
  std::string checkpoint;
  std::string catalog;
  std::string chars;
  std::string from;
  std::string to;
  int steps = 11;
  std::string out;
  std::uint64_t seed = 0;
};

struct SpecimenArgs {
  std::string checkpoint;
  std::string catalog;
  std::string chars;
  std::vector<std::string> mixes;
  std::string out;
  std::string report;
  std::uint64_t seed = 0;
};

std::vector<char32_t> DecodeChars(const std::string& text) {
  std::vector<char32_t> chars = DecodeUtf8(text);
  if (chars.empty()) throw CLI::ValidationError("--chars", "no characters given");
  return chars;
}

// Source glyph once per character; nullopt (and a stderr note) if it fails.
std::optional<GlyphBitmap> SourceOrSkip(const Generator& generator, char32_t cp) {
  try {
    return generator.Source(cp);
  } catch (const Error& e) {
    std::cerr << "skipped " << CodepointLabel(cp) << " " << ErrorCodeName(e.code()) << "\n";
    return std::nullopt;
  }
}

int RunGen(const GenArgs& args) {
  const CatalogFile catalog = ReadCatalogFile(args.catalog);
  const std::vector<char32_t> chars = DecodeChars(args.chars);
  const bool single_file = std::filesystem::path(args.out).extension() == ".png";
  if (single_file && chars.size() != 1) {
    throw CLI::ValidationError("--out", "a .png output takes exactly one character; pass a directory");
  }
  if (!args.mix.empty() && !args.style.empty()) {
    throw CLI::ValidationError("--mix/--style", "give one of --mix or --style");
  }
  const StyleWeights weights = !args.style.empty()
                                   ? OneHot(catalog.catalog.IdForName(args.style), catalog.catalog.size())
                                   : ParseStyleArg(args.mix, catalog.catalog);
  const Generator generator = LoadGenerator(args.checkpoint, catalog);
  if (!single_file) std::filesystem::create_directories(args.out);

  int written = 0;
  for (char32_t cp : chars) {
    const auto source = SourceOrSkip(generator, cp);
    if (!source) continue;
    const auto png = EncodePng(InkToImage(generator.Generate(*source, weights), generator.size()));
    const std::filesystem::path path =
        single_file ? std::filesystem::path(args.out)
                    : std::filesystem::path(args.out) / (CodepointLabel(cp) + ".png");
    WriteFile(path, png);
    std::printf("%s %s\n", CodepointLabel(cp).c_str(), path.string().c_str());
    ++written;
  }
  std::printf("weights=%s written=%d\n", FormatWeights(weights).c_str(), written);
  if (written == 0) throw Error(ErrorCode::kGlyphMissing, "no character could be rendered");
  return kExitOk;
}

int RunInterpolate(const InterpolateArgs& args) {
  const CatalogFile catalog = ReadCatalogFile(args.catalog);
  const std::vector<char32_t> chars = DecodeChars(args.chars);
  const StyleWeights from = ParseStyleArg(args.from, catalog.catalog);
  const StyleWeights to = ParseStyleArg(args.to, catalog.catalog);
  const std::vector<StyleWeights> path = InterpolationPath(from, to, args.steps);
  const Generator generator = LoadGenerator(args.checkpoint, catalog);
  std::filesystem::create_directories(args.out);

  int written = 0;
  for (char32_t cp : chars) {
    const auto source = SourceOrSkip(generator, cp);
    if (!source) continue;
    for (std::size_t t = 0; t < path.size(); ++t) {
      char name[64];
      std::snprintf(name, sizeof name, "frame%03zu_%s.png", t, CodepointLabel(cp).c_str());
      const auto png = EncodePng(InkToImage(generator.Generate(*source, path[t]), generator.size()));
      WriteFile(std::filesystem::path(args.out) / name, png);
      ++written;
    }
  }
  for (std::size_t t = 0; t < path.size(); ++t) {
    std::printf("frame=%zu weights=%s\n", t, FormatWeights(path[t]).c_str());
  }
  std::printf("written=%d\n", written);
  if (written == 0) throw Error(ErrorCode::kGlyphMissing, "no character could be rendered");
  return kExitOk;
}

int RunSpecimen(const SpecimenArgs& args) {
  const CatalogFile catalog = ReadCatalogFile(args.catalog);
  const std::vector<char32_t> chars = DecodeChars(args.chars);
  std::vector<StyleWeights> weights;
  if (args.mixes.empty()) {
    for (int i = 0; i < catalog.catalog.size(); ++i) weights.push_back(OneHot(i, catalog.catalog.size()));
  }
  for (const std::string& m : args.mixes) weights.push_back(ParseStyleArg(m, catalog.catalog));
  const Generator generator = LoadGenerator(args.checkpoint, catalog);

  const SpecimenSheet sheet = RenderSpecimen(generator, chars, LabelColumns(weights, catalog.catalog));
  WritePng(args.out, sheet.image);
  const std::string report_path = args.report.empty() ? args.out + ".report.tsv" : args.report;
  const std::string report = SpecimenReport(sheet);
  WriteFile(report_path, std::span(reinterpret_cast<const std::uint8_t*>(report.data()), report.size()));
  int failed = 0;
  for (const auto& row : sheet.cells) {
    for (const auto& cell : row) failed += cell.pixels ? 0 : 1;
  }
  std::printf("rows=%d cols=%d failed_cells=%d sheet=%s report=%s\n", sheet.rows(), sheet.cols(), failed,
              args.out.c_str(), report_path.c_str());
  return kExitOk;
}

void AddModelOptions(CLI::App* cmd, std::string& checkpoint, std::string& catalog) {
  cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->envname("GLYPHFORGE_CHECKPOINT");
  cmd->add_option("--catalog", catalog, "Style catalog written by `dataset build`")
      ->required()
      ->envname("GLYPHFORGE_CATALOG");
}

constexpr const char* kSeedHelp = "Accepted for uniformity; generation is deterministic";

}  // namespace

void RegisterGenerate(Registry& registry) {
  CLI::App* gen = registry.app.add_subcommand("gen", "Render characters with one style vector");
  auto g = std::make_shared<GenArgs>();
  AddModelOptions(gen, g->checkpoint, g->catalog);
  gen->add_option("--chars", g->chars, "Characters (UTF-8)")->required();
  gen->add_option("--mix", g->mix, "name=w,... or [w0,w1,...]; empty is the zero vector");
  gen->add_option("--style", g->style, "Shorthand for a one-hot of this catalog name");
  gen->add_option("--out", g->out, "PNG file (one character) or directory")->required();
  gen->add_option("--seed", g->seed, kSeedHelp);
  registry.actions.emplace_back(gen, [g] { return RunGen(*g); });

  CLI::App* interp = registry.app.add_subcommand("interpolate", "Render a linear path between two vectors");
  auto i = std::make_shared<InterpolateArgs>();
  AddModelOptions(interp, i->checkpoint, i->catalog);
  interp->add_option("--chars", i->chars, "Characters (UTF-8)")->required();
  interp->add_option("--from", i->from, "Start vector (mix spec or [..])")->required();
  interp->add_option("--to", i->to, "End vector (mix spec or [..])")->required();
  interp->add_option("--steps", i->steps, "Frames including both ends")->check(CLI::Range(2, 1000))
      ->capture_default_str();
  interp->add_option("--out", i->out, "Output directory")->required();
  interp->add_option("--seed", i->seed, kSeedHelp);
  registry.actions.emplace_back(interp, [i] { return RunInterpolate(*i); });

  CLI::App* spec = registry.app.add_subcommand("specimen", "Grid sheet of characters x style vectors");
  auto s = std::make_shared<SpecimenArgs>();
  AddModelOptions(spec, s->checkpoint, s->catalog);
  spec->add_option("--chars", s->chars, "Characters (UTF-8), one row each")->required();
  spec->add_option("--mix", s->mixes, "Column vector; repeat for more columns (default: every one-hot)")
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  spec->add_option("--out", s->out, "Sheet PNG")->required();
  spec->add_option("--report", s->report, "Report file (default: OUT.report.tsv)");
  spec->add_option("--seed", s->seed, kSeedHelp);
  registry.actions.emplace_back(spec, [s] { return RunSpecimen(*s); });
}

}  // namespace glyphforge::cli
