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

#include "regunc/render.hpp"

#include "regunc/error.hpp"
#include "regunc/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace regunc::render {
namespace {

constexpr Rgb kBackground{255, 255, 255};
constexpr Rgb kInk{0, 0, 0};

std::array<Rgb, 256> BuildViridis()
{
  constexpr std::array<Rgb, 10> anchors{{{68, 1, 84},
                                         {72, 40, 120},
                                         {62, 73, 137},
                                         {49, 104, 142},
                                         {38, 130, 142},
                                         {31, 158, 137},
                                         {53, 183, 121},
                                         {110, 206, 88},
                                         {181, 222, 43},
                                         {253, 231, 37}}};
  std::array<Rgb, 256> ramp{};
  for (int i = 0; i < 256; ++i)
  {
    double const t    = i / 255.0 * (anchors.size() - 1);
    auto const   seg  = std::min<std::size_t>(static_cast<std::size_t>(t), anchors.size() - 2);
    double const frac = t - static_cast<double>(seg);
    for (int c = 0; c < 3; ++c)
    {
      double const v = (1.0 - frac) * anchors[seg][c] + frac * anchors[seg + 1][c];
      ramp[i][c]     = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return ramp;
}

std::array<Rgb, 256> BuildGray()
{
  std::array<Rgb, 256> ramp{};
  for (int i = 0; i < 256; ++i)
  {
    auto const v = static_cast<std::uint8_t>(i);
    ramp[i]      = {v, v, v};
  }
  return ramp;
}

// 3x5 glyphs, one row per entry, bit 2 = leftmost column.
struct Glyph
{
  char                   c;
  std::array<uint8_t, 5> rows;
};

constexpr std::array<Glyph, 15> kFont{{
    {'0', {7, 5, 5, 5, 7}}, {'1', {2, 6, 2, 2, 7}}, {'2', {7, 1, 7, 4, 7}},
    {'3', {7, 1, 7, 1, 7}}, {'4', {5, 5, 7, 1, 1}}, {'5', {7, 4, 7, 1, 7}},
    {'6', {7, 4, 7, 5, 7}}, {'7', {7, 1, 1, 1, 1}}, {'8', {7, 5, 7, 5, 7}},
    {'9', {7, 5, 7, 1, 7}}, {'.', {0, 0, 0, 0, 2}}, {'-', {0, 0, 7, 0, 0}},
    {'+', {0, 2, 7, 2, 0}}, {'e', {0, 7, 7, 4, 7}}, {' ', {0, 0, 0, 0, 0}},
}};

constexpr int kGlyphW  = 3;
constexpr int kGlyphH  = 5;
constexpr int kAdvance = 4;

std::string FormatLimit(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Canvas
{
public:
  Canvas(int w, int h)
    : w_(w)
    , h_(h)
    , rgb_(static_cast<std::size_t>(w) * h * 3)
  {
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        Put(x, y, kBackground);
      }
    }
  }

  void Put(int x, int y, Rgb const &c)
  {
    if (x < 0 || y < 0 || x >= w_ || y >= h_)
    {
      return;
    }
    std::size_t const i = (static_cast<std::size_t>(y) * w_ + x) * 3;
    rgb_[i]             = c[0];
    rgb_[i + 1]         = c[1];
    rgb_[i + 2]         = c[2];
  }

  void Text(int x, int y, std::string const &s)
  {
    for (char ch : s)
    {
      auto it = std::find_if(kFont.begin(), kFont.end(), [&](Glyph const &g) { return g.c == ch; });
      if (it != kFont.end())
      {
        for (int r = 0; r < kGlyphH; ++r)
        {
          for (int c = 0; c < kGlyphW; ++c)
          {
            if ((it->rows[r] >> (kGlyphW - 1 - c)) & 1)
            {
              Put(x + c, y + r, kInk);
            }
          }
        }
      }
      x += kAdvance;
    }
  }

  std::vector<std::uint8_t> Take()
  {
    return std::move(rgb_);
  }

private:
  int                       w_;
  int                       h_;
  std::vector<std::uint8_t> rgb_;
};

}  // namespace

std::array<Rgb, 256> const &Ramp(Colormap cmap)
{
  static auto const viridis = BuildViridis();
  static auto const gray    = BuildGray();
  return cmap == Colormap::kViridis ? viridis : gray;
}

int RampIndex(double v, double lo, double hi)
{
  if (!(hi > lo))
  {
    return 128;
  }
  double const t = (v - lo) / (hi - lo) * 255.0;
  return static_cast<int>(std::clamp(std::lround(t), 0L, 255L));
}

Rendered Render(uncertainty::UncertaintyMap const &map, Colormap cmap, Scale const &scale)
{
  if (map.width <= 0 || map.height <= 0 ||
      map.values.size() != static_cast<std::size_t>(map.width) * map.height)
  {
    Fail(ErrorKind::kInvalid, "map dimensions do not match its data");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : map.values)
  {
    if (std::isfinite(v))
    {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo))
  {
    Fail(ErrorKind::kNumeric, "nothing to render");
  }
  if (!scale.automatic)
  {
    if (!(scale.min < scale.max))
    {
      Fail(ErrorKind::kConfig, "fixed scale requires min < max");
    }
    lo = scale.min;
    hi = scale.max;
  }

  auto const &ramp     = Ramp(cmap);
  std::string const lo_text = FormatLimit(lo);
  std::string const hi_text = FormatLimit(hi);
  int const text_w = static_cast<int>(lo_text.size() + hi_text.size() + 1) * kAdvance;
  int const width  = std::max(map.width, text_w);
  int const bar_y  = map.height + 2;
  int const bar_h  = 6;
  int const text_y = bar_y + bar_h + 2;
  int const height = text_y + kGlyphH + 1;

  Canvas canvas(width, height);
  for (int y = 0; y < map.height; ++y)
  {
    for (int x = 0; x < map.width; ++x)
    {
      double const v = map.values[static_cast<std::size_t>(y) * map.width + x];
      canvas.Put(x, y, std::isnan(v) ? kSentinel : ramp[RampIndex(v, lo, hi)]);
    }
  }
  for (int x = 0; x < width; ++x)
  {
    int const idx = width == 1 ? 0 : static_cast<int>(std::lround(255.0 * x / (width - 1)));
    for (int y = bar_y; y < bar_y + bar_h; ++y)
    {
      canvas.Put(x, y, ramp[idx]);
    }
  }
  canvas.Text(0, text_y, lo_text);
  canvas.Text(width - static_cast<int>(hi_text.size()) * kAdvance + 1, text_y, hi_text);

  return {width, height, canvas.Take(), lo, hi};
}

void SaveRender(Rendered const &img, Colormap cmap, std::filesystem::path const &path)
{
  std::pair<std::string, std::string> const text[] = {
      {"Colormap", cmap == Colormap::kViridis ? "viridis" : "grayscale"},
      {"ScaleMin", FormatLimit(img.lo)},
      {"ScaleMax", FormatLimit(img.hi)},
  };
  SavePngRgb(path, img.width, img.height, img.rgb, text);
}

}  // namespace regunc::render
