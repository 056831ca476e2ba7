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

#include "regunc/regunc.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::string DataPath(char const *name)
{
  return (fs::path(REGUNC_TEST_DATA_DIR) / name).string();
}

fs::path TempDir()
{
  fs::path dir = fs::temp_directory_path() / "regunc_capi";
  fs::create_directories(dir);
  return dir;
}

TEST(CApi, Version)
{
  EXPECT_STREQ(regunc_version(), "0.1.0");
}

TEST(CApi, NormalizeAndErrors)
{
  double raw[2] = {1, 3};
  double out[2];
  ASSERT_EQ(regunc_normalize(raw, 2, out), REGUNC_OK);
  EXPECT_EQ(out[0], 0.25);
  double zeros[2] = {0, 0};
  EXPECT_EQ(regunc_normalize(zeros, 2, out), REGUNC_ERR_NUMERIC);
  EXPECT_NE(std::string(regunc_last_error()).find("degenerate weights"), std::string::npos);
  EXPECT_EQ(regunc_normalize(nullptr, 2, out), REGUNC_ERR_USAGE);
}

TEST(CApi, EntropyModeAndReport)
{
  double p[5]       = {0.2, 0.2, 0.25, 0.2, 0.15};
  int64_t labels[5] = {200, 200, 50, 200, 200};
  double  h         = 0;
  ASSERT_EQ(regunc_entropy_bits(p, 5, &h), REGUNC_OK);
  EXPECT_NEAR(h, 2.303701696057348, 1e-12);
  size_t mode = 99;
  ASSERT_EQ(regunc_mode_index(p, 5, &mode), REGUNC_OK);
  EXPECT_EQ(mode, 2u);
  regunc_voxel_report r{};
  ASSERT_EQ(regunc_voxel_report_compute(p, labels, 5, &r), REGUNC_OK);
  EXPECT_EQ(r.mode_label, 50);
  EXPECT_EQ(r.ml_label, 200);
  EXPECT_EQ(r.agree, 0);
  EXPECT_NEAR(r.u_l_bits, 0.8112781244591328, 1e-12);
  int64_t support[5];
  double  mass[5];
  size_t  n = 0;
  ASSERT_EQ(regunc_pushforward(p, labels, 5, support, mass, &n), REGUNC_OK);
  ASSERT_EQ(n, 2u);
  EXPECT_EQ(support[0], 200);
  EXPECT_NEAR(mass[0], 0.75, 1e-15);
  double  intens[2] = {9.99, 10.0};
  int64_t bins[2];
  ASSERT_EQ(regunc_intensity_bins(intens, 2, 10.0, bins), REGUNC_OK);
  EXPECT_EQ(bins[0], 0);
  EXPECT_EQ(bins[1], 1);
}

TEST(CApi, ImagesAndRegistration)
{
  std::vector<double> data(16 * 16);
  for (size_t i = 0; i < data.size(); ++i)
  {
    data[i] = static_cast<double>((i * 97) % 251);
  }
  regunc_image *img = nullptr;
  ASSERT_EQ(regunc_image_create(16, 16, data.data(), &img), REGUNC_OK);
  EXPECT_EQ(regunc_image_width(img), 16);
  regunc_dpr_config cfg{1, REGUNC_METRIC_SSD, 100.0, 0.0, 0};
  double cost = -1;
  ASSERT_EQ(regunc_local_cost(img, img, 5, 5, 0, 0, &cfg, &cost), REGUNC_OK);
  EXPECT_EQ(cost, 0.0);
  EXPECT_EQ(regunc_local_cost(img, img, 0, 0, 0, 0, &cfg, &cost), REGUNC_ERR_USAGE);

  regunc_field *field = nullptr;
  ASSERT_EQ(regunc_register(img, img, 1, &cfg, 2, &field), REGUNC_OK);
  EXPECT_EQ(regunc_field_k(field), 9u);
  EXPECT_EQ(regunc_field_masked_count(field), 144u);
  int dx = 0, dy = 0;
  ASSERT_EQ(regunc_field_offset(field, 4, &dx, &dy), REGUNC_OK);
  EXPECT_EQ(dx, 0);
  EXPECT_EQ(dy, 0);
  double const *probs = nullptr;
  ASSERT_EQ(regunc_field_probs(field, 5, 5, &probs), REGUNC_OK);
  size_t mode = 0;
  regunc_mode_index(probs, 9, &mode);
  EXPECT_EQ(mode, 4u);
  EXPECT_EQ(regunc_field_probs(field, 0, 0, &probs), REGUNC_ERR_USAGE);

  std::string const path = (TempDir() / "f.tdf").string();
  ASSERT_EQ(regunc_field_save(field, path.c_str()), REGUNC_OK);
  regunc_field *back = nullptr;
  ASSERT_EQ(regunc_field_load(path.c_str(), &back), REGUNC_OK);
  EXPECT_EQ(regunc_field_masked_count(back), 144u);
  regunc_field_free(back);
  regunc_field_free(field);

  cfg.metric = REGUNC_METRIC_NCC;
  std::vector<double> flat(16 * 16, 5.0);
  regunc_image       *flat_img = nullptr;
  ASSERT_EQ(regunc_image_create(16, 16, flat.data(), &flat_img), REGUNC_OK);
  EXPECT_EQ(regunc_register(flat_img, flat_img, 1, &cfg, 1, &field), REGUNC_ERR_NUMERIC);
  cfg.temperature = 0;
  EXPECT_EQ(regunc_register(img, img, 1, &cfg, 1, &field), REGUNC_ERR_USAGE);
  regunc_image_free(flat_img);
  regunc_image_free(img);
  regunc_image_free(nullptr);
}

TEST(CApi, LoadErrors)
{
  regunc_image *img = nullptr;
  EXPECT_EQ(regunc_image_load("/nonexistent/x.pgm", &img), REGUNC_ERR_IO);
  regunc_field *f = nullptr;
  EXPECT_EQ(regunc_field_load("/nonexistent/x.tdf", &f), REGUNC_ERR_IO);
  EXPECT_EQ(img, nullptr);
}

TEST(CApi, Labels)
{
  regunc_labels *lab = nullptr;
  ASSERT_EQ(regunc_labels_load(DataPath("mismatch_labels.pgm").c_str(), &lab), REGUNC_OK);
  int64_t v = 0;
  ASSERT_EQ(regunc_displaced_label(lab, 1, 1, 0, -1, &v), REGUNC_OK);
  EXPECT_EQ(v, 200);
  EXPECT_EQ(regunc_displaced_label(lab, 2, 2, 1, 0, &v), REGUNC_ERR_USAGE);
  EXPECT_NE(std::string(regunc_last_error()).find("displacement leaves grid"), std::string::npos);
  regunc_labels_free(lab);
}

TEST(CApi, GaussianProcess)
{
  regunc_landmark  lm{0, 0, 1, 1};
  regunc_gp_config cfg{3.0, 4.0, 0.0};
  regunc_gdf      *gdf = nullptr;
  ASSERT_EQ(regunc_gp_fit(&lm, 1, 4, 4, &cfg, 1, &gdf), REGUNC_OK);
  double mean[2], cov[3];
  ASSERT_EQ(regunc_gdf_voxel(gdf, 3, 0, mean, cov), REGUNC_OK);
  EXPECT_NEAR(cov[0], 2.5284822353142307, 1e-12);
  double radius = 0;
  ASSERT_EQ(regunc_uncertainty_circle(gdf, 0, 0, &radius), REGUNC_OK);
  EXPECT_LE(radius, 1e-6);

  std::vector<int64_t> ids(16, 3);
  regunc_labels       *lab = nullptr;
  ASSERT_EQ(regunc_labels_create(4, 4, ids.data(), &lab), REGUNC_OK);
  int64_t support[4];
  double  probs[4];
  size_t  n = 0, clamped = 0;
  ASSERT_EQ(regunc_sample_label_dist(gdf, lab, 2, 2, 100, 1, support, probs, 4, &n, &clamped),
            REGUNC_OK);
  ASSERT_EQ(n, 1u);
  EXPECT_EQ(support[0], 3);
  EXPECT_EQ(regunc_gdf_voxel(gdf, 9, 9, mean, cov), REGUNC_ERR_USAGE);
  regunc_labels_free(lab);
  regunc_gdf_free(gdf);
  EXPECT_EQ(regunc_gp_fit(&lm, 0, 4, 4, &cfg, 1, &gdf), REGUNC_ERR_USAGE);
}

TEST(CApi, Experiments)
{
  regunc_eval_counts c{};
  ASSERT_EQ(regunc_standard_scenario(42, 2, &c), REGUNC_OK);
  EXPECT_EQ(c.both_correct + c.only_ml_correct + c.only_mode_correct + c.neither, c.n_voxels);
  EXPECT_GE(c.only_ml_correct, 1u);
  EXPECT_GE(c.only_mode_correct, 1u);
  regunc_mc_config mc{2000, 9, 2, 0.1, 10.0, 1};
  regunc_mc_result r{};
  ASSERT_EQ(regunc_montecarlo(&mc, 2, &r), REGUNC_OK);
  EXPECT_EQ(r.n_trials, 2000u);
  EXPECT_GT(r.frac_discordant, 0.0);
  mc.n_labels = 1;
  EXPECT_EQ(regunc_montecarlo(&mc, 1, &r), REGUNC_ERR_USAGE);
}

TEST(CApi, Commands)
{
  fs::path const            dir = TempDir();
  std::string const         prefix = (dir / "u").string();
  std::string const         field  = DataPath("mismatch.tdf");
  std::string const         labels = DataPath("mismatch_labels.pgm");
  regunc_uncertainty_args   args{field.c_str(), labels.c_str(), nullptr, nullptr, prefix.c_str(), 1};
  char                     *summary = nullptr;
  ASSERT_EQ(regunc_cmd_uncertainty(&args, &summary), REGUNC_OK) << regunc_last_error();
  ASSERT_NE(summary, nullptr);
  EXPECT_NE(std::string(summary).find("1 voxel reports"), std::string::npos);
  regunc_string_free(summary);

  std::string const manifest = prefix + ".manifest.json";
  ASSERT_EQ(regunc_cmd_replay(manifest.c_str(), 1, nullptr), REGUNC_OK);

  std::string const missing = (dir / "missing.tdf").string();
  args.field                = missing.c_str();
  EXPECT_EQ(regunc_cmd_uncertainty(&args, nullptr), REGUNC_ERR_IO);
  EXPECT_EQ(regunc_cmd_uncertainty(nullptr, nullptr), REGUNC_ERR_USAGE);
}

}  // namespace
