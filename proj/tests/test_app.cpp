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

#include "regunc/app.hpp"
#include "regunc/error.hpp"
#include "regunc/field_io.hpp"
#include "regunc/image_io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace regunc::app {
namespace {

using nlohmann::json;

fs::path DataPath(std::string const &name)
{
  return fs::path(REGUNC_TEST_DATA_DIR) / name;
}

class AppTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("regunc_app_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path Path(std::string const &name) const
  {
    return dir_ / name;
  }

  fs::path WriteConfig(json const &doc, std::string const &name = "config.json") const
  {
    std::ofstream(Path(name)) << doc.dump(2);
    return Path(name);
  }

  static json Standard()
  {
    return {{"dpr",
             {{"patch_radius", 1},
              {"metric", "ssd"},
              {"temperature", 100.0},
              {"smoothing_weight", 0.0},
              {"smoothing_iterations", 0}}},
            {"space", {{"radius", 2}}},
            {"gp", {{"kernel_length", 6.0}, {"kernel_variance", 4.0}, {"noise_variance", 0.0}}},
            {"seeds", {{"synth", 42}, {"sample", 7}, {"mc", 1}}},
            {"synth", {{"grid_spacing", 16}, {"max_magnitude", 2}}},
            {"cpr", {{"n_samples", 500}, {"probes", {{3, 3}, {8, 8}}}}},
            {"mc", {{"n_trials", 400}, {"K", 9}, {"n_labels", 2}, {"concentration", {0.1, 10.0}}}}};
  }

  static std::string Slurp(fs::path const &p)
  {
    std::ifstream      in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static ErrorKind KindOf(std::function<void()> const &fn, std::string *msg = nullptr)
  {
    try
    {
      fn();
    }
    catch (Error const &e)
    {
      if (msg)
      {
        *msg = e.what();
      }
      return e.kind();
    }
    ADD_FAILURE() << "no error";
    return ErrorKind::kInvalid;
  }

  fs::path dir_;
};

TEST_F(AppTest, ParseConfigFull)
{
  auto c = ParseConfig(Standard());
  ASSERT_TRUE(c.dpr);
  EXPECT_EQ(c.dpr->temperature, 100.0);
  EXPECT_EQ(c.space_radius, 2);
  ASSERT_TRUE(c.mc);
  EXPECT_EQ(c.mc->k, 9u);
  EXPECT_EQ(c.mc->seed, 1u);
  ASSERT_TRUE(c.cpr);
  EXPECT_EQ(c.cpr->probes.size(), 2u);
  EXPECT_EQ(c.bin_width, 1.0);
}

TEST_F(AppTest, ParseConfigMissingKeyNamed)
{
  json doc = Standard();
  doc["dpr"].erase("temperature");
  std::string msg;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }, &msg), ErrorKind::kConfig);
  EXPECT_NE(msg.find("temperature"), std::string::npos);
}

TEST_F(AppTest, ParseConfigUnknownKeys)
{
  json doc = Standard();
  doc["extra"] = 1;
  std::string msg;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }, &msg), ErrorKind::kConfig);
  EXPECT_NE(msg.find("extra"), std::string::npos);
  doc = Standard();
  doc["dpr"]["tempreature"] = 3;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }, &msg), ErrorKind::kConfig);
  EXPECT_NE(msg.find("dpr.tempreature"), std::string::npos);
}

TEST_F(AppTest, ParseConfigBadValues)
{
  json doc = Standard();
  doc["dpr"]["metric"] = "mi";
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }), ErrorKind::kConfig);
  doc = Standard();
  doc["dpr"]["temperature"] = -1.0;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }), ErrorKind::kConfig);
  doc = Standard();
  doc["space"]["radius"] = "two";
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }), ErrorKind::kConfig);
  doc = Standard();
  doc["mc"]["n_labels"] = 1;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }), ErrorKind::kConfig);
  doc = Standard();
  doc["seeds"]["mc"] = -4;
  EXPECT_EQ(KindOf([&] { ParseConfig(doc); }), ErrorKind::kConfig);
}

TEST_F(AppTest, RegisterReportsMaskedCount)
{
  std::vector<double> d;
  for (int i = 0; i < 256; ++i)
  {
    d.push_back((i * 97) % 251);
  }
  SavePgm(Image(16, 16, d), Path("img.pgm"));
  json doc = Standard();
  doc["space"]["radius"] = 1;
  auto summary = RunRegister({Path("img.pgm"), Path("img.pgm"), WriteConfig(doc), Path("f.tdf"), 1});
  EXPECT_NE(summary.find("masked voxels = 144"), std::string::npos);
  auto header = json::parse(Slurp(Path("f.tdf.json")));
  EXPECT_EQ(header["masked_count"], 144);
  EXPECT_EQ(header["K"], 9);
  EXPECT_TRUE(fs::exists(Path("f.tdf.manifest.json")));
}

TEST_F(AppTest, RegisterErrors)
{
  SavePgm(Image(16, 16, 3.0), Path("a.pgm"));
  SavePgm(Image(17, 16, 3.0), Path("b.pgm"));
  auto cfg = WriteConfig(Standard());
  EXPECT_EQ(KindOf([&] { RunRegister({Path("a.pgm"), Path("b.pgm"), cfg, Path("f.tdf"), 1}); }),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { RunRegister({Path("a.pgm"), Path("zz.pgm"), cfg, Path("f.tdf"), 1}); }),
            ErrorKind::kIo);
  EXPECT_EQ(KindOf([&] { RunRegister({Path("a.pgm"), Path("a.pgm"), cfg, Path("no/f.tdf"), 1}); }),
            ErrorKind::kIo);
  json ncc = Standard();
  ncc["dpr"]["metric"] = "ncc";
  EXPECT_EQ(KindOf([&] {
              RunRegister({Path("a.pgm"), Path("a.pgm"), WriteConfig(ncc, "ncc.json"), Path("f.tdf"), 1});
            }),
            ErrorKind::kNumeric);
}

TEST_F(AppTest, UncertaintyOnMismatchFixture)
{
  RunUncertainty({DataPath("mismatch.tdf"), DataPath("mismatch_labels.pgm"), {}, {}, Path("u"), 1});
  std::string const csv = Slurp(Path("u_reports.csv"));
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "x,y,u_t_bits,u_l_bits,mode_label,ml_label,agree");
  EXPECT_EQ(row.rfind("1,1,", 0), 0u);
  EXPECT_NE(row.find(",50,200,false"), std::string::npos);
  EXPECT_FALSE(std::getline(in, extra));
  auto ul = io::LoadMap(Path("u_ul.json"));
  EXPECT_FALSE(ul.HasData(0, 0));
  EXPECT_TRUE(ul.HasData(1, 1));
}

TEST_F(AppTest, UncertaintyUniformLabelsZero)
{
  SaveLabelMap(LabelMap(3, 3, std::vector<LabelId>(9, 4)), Path("uniform.pgm"));
  RunUncertainty({DataPath("flat_tumor.tdf"), Path("uniform.pgm"), {}, {}, Path("u"), 1});
  auto ul = io::LoadMap(Path("u_ul.json"));
  EXPECT_EQ(ul.values[4], 0.0);
}

TEST_F(AppTest, IdentityEvalRoundTrip)
{
  auto cfgdoc = Standard();
  cfgdoc["synth"]["max_magnitude"] = 0;
  cfgdoc["synth"]["width"]         = 32;
  cfgdoc["synth"]["height"]        = 32;
  cfgdoc["dpr"]["temperature"]     = 0.01;
  auto cfg = WriteConfig(cfgdoc);
  RunPhantom({cfg, Path("ph")});
  RunSynth({Path("ph_image.pgm"), cfg, Path("sy")});
  EXPECT_EQ(Slurp(Path("ph_image.pgm")), Slurp(Path("sy_deformed.pgm")));
  RunRegister({Path("sy_deformed.pgm"), Path("ph_image.pgm"), cfg, Path("f.tdf"), 1});
  RunEval({Path("f.tdf"), Path("sy_gt.csv"), Path("ph_labels.pgm"), Path("ev"), 1});
  std::string const counts = Slurp(Path("ev_counts.csv"));
  auto const        field  = io::LoadTdf(Path("f.tdf"));
  EXPECT_NE(counts.find("both_correct," + std::to_string(field.MaskedCount()) + ",1"),
            std::string::npos)
      << counts;
}

TEST_F(AppTest, CprOutputs)
{
  std::ofstream(Path("lm.csv")) << "tx,ty,sx,sy\n3,3,3,3\n8,8,8,8\n";
  SaveLabelMap(LabelMap(12, 12, std::vector<LabelId>(144, 1)), Path("lab.pgm"));
  RunCpr({Path("lm.csv"), Path("lab.pgm"), {}, WriteConfig(Standard()), Path("c"), 1});
  std::string const circles = Slurp(Path("c_circles.csv"));
  std::istringstream in(circles);
  std::string        line;
  bool               found = false;
  while (std::getline(in, line))
  {
    if (line.rfind("3,3,", 0) != 0)
    {
      continue;
    }
    found = true;
    std::vector<std::string> cols;
    std::stringstream        ss(line);
    for (std::string col; std::getline(ss, col, ',');)
    {
      cols.push_back(col);
    }
    ASSERT_EQ(cols.size(), 12u);
    EXPECT_EQ(std::stod(cols[2]), 0.0);
    EXPECT_EQ(std::stod(cols[3]), 0.0);
    EXPECT_LE(std::stod(cols[6]), 1e-6);
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(fs::exists(Path("c.gdf")));
  EXPECT_TRUE(fs::exists(Path("c_labeldist.csv")));
  std::ofstream(Path("bad.csv")) << "1,2,3,x\n";
  EXPECT_EQ(KindOf([&] {
              RunCpr({Path("bad.csv"), Path("lab.pgm"), {}, WriteConfig(Standard()), Path("c"), 1});
            }),
            ErrorKind::kConfig);
}

TEST_F(AppTest, McDeterministicAndReplayable)
{
  auto cfg = WriteConfig(Standard());
  RunMc({cfg, Path("m1"), "dirichlet", {}, {}, 1});
  RunMc({cfg, Path("m2"), "dirichlet", {}, {}, 4});
  EXPECT_EQ(Slurp(Path("m1_trials.csv")), Slurp(Path("m2_trials.csv")));
  EXPECT_EQ(Slurp(Path("m1_summary.csv")), Slurp(Path("m2_summary.csv")));
  std::string const before = Slurp(Path("m1_trials.csv"));
  fs::remove(Path("m1_trials.csv"));
  fs::remove(cfg);
  Replay(Path("m1.manifest.json"), 2);
  EXPECT_EQ(Slurp(Path("m1_trials.csv")), before);
}

TEST_F(AppTest, ReplayRejectsForeignManifest)
{
  std::ofstream(Path("x.json")) << R"({"tool": "other"})";
  EXPECT_EQ(KindOf([&] { Replay(Path("x.json")); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([&] { Replay(Path("missing.json")); }), ErrorKind::kIo);
}

TEST_F(AppTest, GtCsvRoundTrip)
{
  harness::DisplacementGrid g{3, 2, {{0, 0}, {1, -1}, {2, 0}, {0, 1}, {-2, 2}, {0, 0}}};
  SaveGtCsv(g, Path("gt.csv"));
  auto back = LoadGtCsv(Path("gt.csv"));
  EXPECT_EQ(back.width, 3);
  EXPECT_EQ(back.height, 2);
  EXPECT_EQ(back.offsets, g.offsets);
  std::ofstream(Path("gt_bad.csv")) << "x,y,dx,dy\n0,0,1\n";
  EXPECT_THROW(LoadGtCsv(Path("gt_bad.csv")), Error);
}

std::uint64_t Fnv1a(std::string const &s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s)
  {
    h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

TEST_F(AppTest, StandardScenarioRenderGolden)
{
  auto cfg = WriteConfig(Standard());
  RunPhantom({cfg, Path("ph")});
  RunSynth({Path("ph_image.pgm"), cfg, Path("sy")});
  RunRegister({Path("sy_deformed.pgm"), Path("ph_image.pgm"), cfg, Path("f.tdf"), 2});
  RunUncertainty({Path("f.tdf"), Path("ph_labels.pgm"), {}, {}, Path("u"), 2});
  RunRender({Path("u_ut.json"), "viridis", "auto", Path("ut.png")});
  EXPECT_EQ(Fnv1a(Slurp(Path("ut.png"))), 0xc01e0f7911a15792ULL);
}

}  // namespace
}  // namespace regunc::app
