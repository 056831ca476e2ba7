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

#include "fixtures.hpp"
#include "regunc/error.hpp"
#include "regunc/field_io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>

namespace regunc::io {
namespace {

namespace fs = std::filesystem;

fs::path TempPath(std::string const &name)
{
  fs::path dir = fs::temp_directory_path() / "regunc_field_io";
  fs::create_directories(dir);
  return dir / name;
}

fs::path DataPath(std::string const &name)
{
  return fs::path(REGUNC_TEST_DATA_DIR) / name;
}

void ExpectSameField(TransformDistField const &a, TransformDistField const &b)
{
  EXPECT_EQ(a.width(), b.width());
  EXPECT_EQ(a.height(), b.height());
  EXPECT_EQ(a.space(), b.space());
  EXPECT_TRUE(std::equal(a.raw_probs().begin(), a.raw_probs().end(), b.raw_probs().begin(),
                         b.raw_probs().end()));
  EXPECT_TRUE(std::equal(a.raw_mask().begin(), a.raw_mask().end(), b.raw_mask().begin(),
                         b.raw_mask().end()));
}

TEST(Tdf, Layout)
{
  auto bytes = EncodeTdf(testing::MismatchField());
  // magic + 3 u32 + 5 offsets + 9 voxels x 5 probs + 2 mask bytes
  EXPECT_EQ(bytes.size(), 4u + 12u + 5u * 8u + 45u * 8u + 2u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TDF1");
  EXPECT_EQ(bytes[4], 3);
  EXPECT_EQ(bytes[12], 5);
  // voxel 4 is the only one in-mask: bit 4 of the first mask byte
  EXPECT_EQ(bytes[bytes.size() - 2], 0x10);
  EXPECT_EQ(bytes[bytes.size() - 1], 0x00);
}

TEST(Tdf, RoundTrip)
{
  auto f = testing::FlatTumorField();
  SaveTdf(f, TempPath("rt.tdf"));
  ExpectSameField(f, LoadTdf(TempPath("rt.tdf")));
}

TEST(Tdf, ShippedFixturesMatchConstruction)
{
  ExpectSameField(LoadTdf(DataPath("mismatch.tdf")), testing::MismatchField());
  ExpectSameField(LoadTdf(DataPath("flat_tumor.tdf")), testing::FlatTumorField());
}

TEST(Tdf, RejectsCorruption)
{
  auto bytes = EncodeTdf(testing::MismatchField());
  auto bad   = bytes;
  bad[0]     = 'X';
  EXPECT_THROW(DecodeTdf(bad), Error);
  auto trunc = bytes;
  trunc.pop_back();
  EXPECT_THROW(DecodeTdf(trunc), Error);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(DecodeTdf(extra), Error);
  // break the unity sum of the in-mask voxel
  auto unsum = bytes;
  std::size_t const first_prob = 4 + 12 + 5 * 8 + 4 * 5 * 8;
  unsum[first_prob + 7] ^= 0x01;
  EXPECT_THROW(DecodeTdf(unsum), Error);
}

TEST(Tdf, HeaderJson)
{
  auto j = nlohmann::json::parse(TdfHeaderJson(testing::MismatchField()));
  EXPECT_EQ(j["format"], "TDF1");
  EXPECT_EQ(j["K"], 5);
  EXPECT_EQ(j["masked_count"], 1);
  EXPECT_EQ(j["offsets"][2], nlohmann::json::array({0, 0}));
}

TEST(Gdf, RoundTrip)
{
  cpr::GaussianDisplacementField f(3, 2);
  f.Set(1, 1, {0.5, -1.25}, {2, 0.25, 3});
  f.Set(2, 0, {7, 8}, {1, 0, 1});
  auto bytes = EncodeGdf(f);
  EXPECT_EQ(bytes.size(), 4u + 8u + 6u * 2u * 8u + 6u * 3u * 8u);
  SaveGdf(f, TempPath("rt.gdf"));
  auto g = LoadGdf(TempPath("rt.gdf"));
  EXPECT_EQ(g.mean(1, 1).y, -1.25);
  EXPECT_EQ(g.cov(1, 1).xy, 0.25);
  EXPECT_EQ(g.cov(2, 0).yy, 1.0);
  bytes.pop_back();
  EXPECT_THROW(DecodeGdf(bytes), Error);
}

TEST(RawMap, RoundTripWithNoData)
{
  uncertainty::UncertaintyMap m{2, 2, {0.5, std::nan(""), 1.5, 3.0}};
  auto header = SaveMap(m, TempPath("map"), "u_t_bits");
  EXPECT_EQ(header, TempPath("map.json"));
  EXPECT_EQ(fs::file_size(TempPath("map.raw")), 32u);
  auto j = nlohmann::json::parse(ReadFile(header));
  EXPECT_EQ(j["format"], "raw-float64-le");
  EXPECT_EQ(j["quantity"], "u_t_bits");
  EXPECT_EQ(j["data"], "map.raw");
  auto back = LoadMap(header);
  EXPECT_EQ(back.width, 2);
  EXPECT_EQ(back.values[0], 0.5);
  EXPECT_TRUE(std::isnan(back.values[1]));
  EXPECT_FALSE(back.HasData(1, 0));
}

TEST(RawMap, MissingFiles)
{
  try
  {
    LoadMap(TempPath("nope.json"));
    FAIL();
  }
  catch (Error const &e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace regunc::io
