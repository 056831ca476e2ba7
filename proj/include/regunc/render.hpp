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

#include "regunc/uncertainty.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace regunc::render {

enum class Colormap
{
  kViridis,
  kGray,
};

using Rgb = std::array<std::uint8_t, 3>;

/// Colour reserved for no-data cells; neither ramp contains it.
inline constexpr Rgb kSentinel{255, 0, 255};

/// 256-entry ramp.
std::array<Rgb, 256> const &Ramp(Colormap cmap);

struct Scale
{
  bool   automatic = true;
  double min       = 0.0;
  double max       = 1.0;
};

/// Ramp index of `v` under [lo, hi]; a degenerate range maps to the midpoint.
int RampIndex(double v, double lo, double hi);

struct Rendered
{
  int                       width  = 0;
  int                       height = 0;
  std::vector<std::uint8_t> rgb;
  double                    lo = 0.0;  // resolved scale
  double                    hi = 0.0;
};

/// Map pixels on top, then a colour-bar strip with the scale limits printed
/// beneath it. Throws "nothing to render" for an all no-data map.
Rendered Render(uncertainty::UncertaintyMap const &map, Colormap cmap, Scale const &scale);

void SaveRender(Rendered const &img, Colormap cmap, std::filesystem::path const &path);

}  // namespace regunc::render
