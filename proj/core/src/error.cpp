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

#include "glyphforge/error.hpp"

namespace glyphforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCharsetEmpty: return "CharsetEmpty";
    case ErrorCode::kCharsetSpecInvalid: return "CharsetSpecInvalid";
    case ErrorCode::kFontNotFound: return "FontNotFound";
    case ErrorCode::kFontInvalid: return "FontInvalid";
    case ErrorCode::kGlyphMissing: return "GlyphMissing";
    case ErrorCode::kGlyphBlank: return "GlyphBlank";
    case ErrorCode::kDatasetEmpty: return "DatasetEmpty";
    case ErrorCode::kDatasetInvalid: return "DatasetInvalid";
    case ErrorCode::kSplitDegenerate: return "SplitDegenerate";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kStyleDimMismatch: return "StyleDimMismatch";
    case ErrorCode::kStyleUnknown: return "StyleUnknown";
    case ErrorCode::kCatalogInvalid: return "CatalogInvalid";
    case ErrorCode::kMixSpecInvalid: return "MixSpecInvalid";
    case ErrorCode::kCheckpointInvalid: return "CheckpointInvalid";
    case ErrorCode::kNumericalDivergence: return "NumericalDivergence";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace glyphforge
