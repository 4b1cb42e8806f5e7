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

#include <string>
#include <string_view>
#include <vector>

namespace glyphforge {

// Throws Error(kCharsetSpecInvalid) on malformed UTF-8.
std::vector<char32_t> DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t codepoint);

// "U+4E00" style label.
std::string CodepointLabel(char32_t codepoint);

std::vector<std::string> SplitString(std::string_view text, char delimiter);
std::string_view Trim(std::string_view text);

}  // namespace glyphforge
