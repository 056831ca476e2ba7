//------------------------------------------------------------------------------
//
//   Copyright 2026 The regunc Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "regunc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <span>

namespace regunc {

enum class ImageFormat
{
  kAuto,
  kPgm,
  kPng,
};

/// Reads an 8- or 16-bit grayscale PGM (P5) or PNG. Colour images, truncated
/// payloads and malformed headers raise ErrorKind::kIo.
Image LoadImage(std::filesystem::path const &path, ImageFormat format = ImageFormat::kAuto);

/// Decodes a PGM held in memory.
Image DecodePgm(std::span<std::uint8_t const> bytes);

/// Writes P5 at 8 bits when every intensity is an integer in [0, 255], at 16
/// bits when every intensity is an integer in [0, 65535], and fails otherwise.
void SavePgm(Image const &image, std::filesystem::path const &path);

/// Label maps are grayscale images whose pixel values are label identifiers.
/// An optional names table lives next to the image with a .json extension,
/// e.g. {"0": "background", "1": "tumor"}.
LabelMap LoadLabelMap(std::filesystem::path const &path);
void     SaveLabelMap(LabelMap const &labels, std::filesystem::path const &path);

std::filesystem::path NamesSidecarPath(std::filesystem::path const &label_path);

/// Non-interlaced 8-bit RGB PNG with fixed compression settings so that equal
/// pixels always give equal bytes. `text` entries are stored as tEXt chunks.
void SavePngRgb(std::filesystem::path const &path, int width, int height,
                std::span<std::uint8_t const>                         rgb,
                std::span<std::pair<std::string, std::string> const> text = {});

}  // namespace regunc
