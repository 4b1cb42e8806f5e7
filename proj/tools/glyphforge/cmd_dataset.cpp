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

#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "glyphforge/error.hpp"

namespace glyphforge::cli {
namespace {

struct DatasetArgs {
  std::string source;
  std::vector<std::string> targets;
  std::string charset = "builtin:top32";
  int size = 64;
  double margin = kDefaultMarginFraction;
  std::string out;
  std::string catalog;
  std::string skip_report;
  std::uint64_t seed = 0;
  int workers = 1;
};

int RunDatasetBuild(const DatasetArgs& args) {
  const FontRef source = ParseFontArg(args.source);
  std::vector<FontRef> targets;
  for (const std::string& t : args.targets) targets.push_back(ParseFontArg(t));

  BuildOptions options;
  options.size = args.size;
  options.margin_fraction = args.margin;
  options.split_seed = args.seed;
  options.workers = args.workers;
  const Dataset dataset = BuildDataset(source, targets, LoadCharset(args.charset), options);
  SaveDataset(args.out, dataset);

  const std::string catalog_path = args.catalog.empty() ? args.out + ".catalog.tsv" : args.catalog;
  WriteCatalogFile(catalog_path,
                   CatalogFile{source.name, source.path, args.margin, dataset.Catalog()});
  const std::string skip_path = args.skip_report.empty() ? args.out + ".skips.tsv" : args.skip_report;
  std::ofstream skips(skip_path, std::ios::trunc);
  if (!skips) throw Error(ErrorCode::kIoError, "cannot write " + skip_path);
  WriteSkipReport(skips, dataset.skipped);

  std::cout << "samples=" << dataset.samples.size() << " skipped=" << dataset.skipped.size() << "\n"
            << "content_hash=" << dataset.manifest.content_hash << "\n";
  return kExitOk;
}

}  // namespace

void RegisterDataset(Registry& registry) {
  CLI::App* dataset = registry.app.add_subcommand("dataset", "Paired glyph datasets");
  dataset->require_subcommand(1);
  CLI::App* build = dataset->add_subcommand("build", "Rasterize source/target fonts into a dataset file");
  auto args = std::make_shared<DatasetArgs>();
  build->add_option("--source", args->source, "Source font, [name=]PATH")->required();
  build->add_option("--targets", args->targets, "Target fonts, [name=]PATH,...")->required()->delimiter(',');
  build->add_option("--charset", args->charset, "builtin:topN, U+XXXX..U+YYYY, or file:PATH")
      ->capture_default_str();
  build->add_option("--size", args->size, "Bitmap side in pixels")->check(PowerOfTwo())->capture_default_str();
  build->add_option("--margin", args->margin, "Blank border as a fraction of the side")
      ->check(CLI::Range(0.0, 0.45))
      ->capture_default_str();
  build->add_option("--out", args->out, "Dataset file")->required();
  build->add_option("--catalog", args->catalog, "Style catalog file (default: OUT.catalog.tsv)");
  build->add_option("--skip-report", args->skip_report, "Skip report (default: OUT.skips.tsv)");
  build->add_option("--seed", args->seed, "Split seed recorded in the manifest")->capture_default_str();
  build->add_option("--workers", args->workers, "Rasterization threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  registry.actions.emplace_back(build, [args] { return RunDatasetBuild(*args); });
}

}  // namespace glyphforge::cli
