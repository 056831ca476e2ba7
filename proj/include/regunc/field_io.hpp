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
#include "regunc/cpr.hpp"
#include "regunc/uncertainty.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace regunc::io {

// TDF1, all integers and reals little-endian:
//   "TDF1" | u32 width | u32 height | u32 K | K x (i32 dx, i32 dy)
//   | width*height*K f64 probabilities (row-major, zero for masked-out voxels)
//   | ceil(width*height / 8) mask bytes, voxel i at bit (i % 8) of byte i / 8.
std::vector<std::uint8_t> EncodeTdf(TransformDistField const &field);
TransformDistField        DecodeTdf(std::span<std::uint8_t const> bytes);
void                      SaveTdf(TransformDistField const &field, std::filesystem::path const &path);
TransformDistField        LoadTdf(std::filesystem::path const &path);

/// Human-readable description of a TDF1 header (dimensions, offsets, mask
/// count).
std::string TdfHeaderJson(TransformDistField const &field);

// GDF1: "GDF1" | u32 width | u32 height | width*height x (f64 mean dx, dy)
//   | width*height x (f64 cxx, cxy, cyy).
std::vector<std::uint8_t>      EncodeGdf(cpr::GaussianDisplacementField const &field);
cpr::GaussianDisplacementField DecodeGdf(std::span<std::uint8_t const> bytes);
void SaveGdf(cpr::GaussianDisplacementField const &field, std::filesystem::path const &path);
cpr::GaussianDisplacementField LoadGdf(std::filesystem::path const &path);

/// Row-major f64 grid (`<stem>.raw`) with a JSON header (`<stem>.json`)
/// naming the data file. No-data cells are NaN. Returns the header path.
std::filesystem::path SaveMap(uncertainty::UncertaintyMap const &map,
                              std::filesystem::path const &stem, std::string const &quantity);
uncertainty::UncertaintyMap LoadMap(std::filesystem::path const &header);

std::vector<std::uint8_t> ReadFile(std::filesystem::path const &path);
void WriteFile(std::filesystem::path const &path, std::span<std::uint8_t const> bytes);
void WriteText(std::filesystem::path const &path, std::string const &text);

}  // namespace regunc::io
