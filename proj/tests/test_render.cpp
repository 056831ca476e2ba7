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

#include "regunc/error.hpp"
#include "regunc/field_io.hpp"
#include "regunc/render.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

namespace regunc::render {
namespace {

namespace fs = std::filesystem;

fs::path TempPath(std::string const &name)
{
  fs::path dir = fs::temp_directory_path() / "regunc_render";
  fs::create_directories(dir);
  return dir / name;
}

Rgb PixelAt(Rendered const &r, int x, int y)
{
  std::size_t const i = 3 * (static_cast<std::size_t>(y) * r.width + x);
  return {r.rgb[i], r.rgb[i + 1], r.rgb[i + 2]};
}

TEST(RampIndex, LinearAndClamped)
{
  EXPECT_EQ(RampIndex(0.0, 0.0, 1.0), 0);
  EXPECT_EQ(RampIndex(1.0, 0.0, 1.0), 255);
  EXPECT_EQ(RampIndex(0.5, 0.0, 1.0), 128);
  EXPECT_EQ(RampIndex(-3.0, 0.0, 1.0), 0);
  EXPECT_EQ(RampIndex(9.0, 0.0, 1.0), 255);
  EXPECT_EQ(RampIndex(5.0, 5.0, 5.0), 128);
}

TEST(Ramp, SentinelNotInRamps)
{
  for (auto cmap : {Colormap::kViridis, Colormap::kGray})
  {
    for (auto const &c : Ramp(cmap))
    {
      EXPECT_NE(c, kSentinel);
    }
  }
  EXPECT_EQ(Ramp(Colormap::kGray)[0], (Rgb{0, 0, 0}));
  EXPECT_EQ(Ramp(Colormap::kGray)[255], (Rgb{255, 255, 255}));
}

TEST(Render, ConstantMapMidRamp)
{
  uncertainty::UncertaintyMap m{3, 2, std::vector<double>(6, 0.0)};
  auto r = Render(m, Colormap::kViridis, {});
  for (int y = 0; y < 2; ++y)
  {
    for (int x = 0; x < 3; ++x)
    {
      EXPECT_EQ(PixelAt(r, x, y), Ramp(Colormap::kViridis)[128]);
    }
  }
}

TEST(Render, TwoValueEndpoints)
{
  uncertainty::UncertaintyMap m{2, 1, {0.0, std::log2(9.0)}};
  auto r = Render(m, Colormap::kViridis, {});
  EXPECT_EQ(PixelAt(r, 0, 0), Ramp(Colormap::kViridis)[0]);
  EXPECT_EQ(PixelAt(r, 1, 0), Ramp(Colormap::kViridis)[255]);
  EXPECT_EQ(r.lo, 0.0);
  EXPECT_EQ(r.hi, std::log2(9.0));
  EXPECT_GT(r.height, 1);
}

TEST(Render, NoDataSentinelAndFixedScale)
{
  uncertainty::UncertaintyMap m{3, 1, {std::nan(""), 1.0, 2.0}};
  Scale s{false, 0.0, 4.0};
  auto  r = Render(m, Colormap::kGray, s);
  EXPECT_EQ(PixelAt(r, 0, 0), kSentinel);
  EXPECT_EQ(PixelAt(r, 1, 0), Ramp(Colormap::kGray)[64]);
  EXPECT_EQ(PixelAt(r, 2, 0), Ramp(Colormap::kGray)[128]);
}

TEST(Render, Errors)
{
  uncertainty::UncertaintyMap empty{2, 1, {std::nan(""), std::nan("")}};
  try
  {
    Render(empty, Colormap::kGray, {});
    FAIL();
  }
  catch (Error const &e)
  {
    EXPECT_NE(std::string(e.what()).find("nothing to render"), std::string::npos);
  }
  uncertainty::UncertaintyMap m{1, 1, {1.0}};
  EXPECT_THROW(Render(m, Colormap::kGray, Scale{false, 2.0, 2.0}), Error);
}

TEST(SaveRender, DeterministicBytes)
{
  uncertainty::UncertaintyMap m{16, 16, {}};
  for (int i = 0; i < 256; ++i)
  {
    m.values.push_back(i % 7 == 0 ? std::nan("") : std::sin(i * 0.1));
  }
  auto r = Render(m, Colormap::kViridis, {});
  SaveRender(r, Colormap::kViridis, TempPath("a.png"));
  SaveRender(Render(m, Colormap::kViridis, {}), Colormap::kViridis, TempPath("b.png"));
  EXPECT_EQ(io::ReadFile(TempPath("a.png")), io::ReadFile(TempPath("b.png")));
}

}  // namespace
}  // namespace regunc::render
