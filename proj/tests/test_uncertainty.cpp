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
#include "regunc/rng.hpp"
#include "regunc/uncertainty.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace regunc::uncertainty {
namespace {

std::vector<double> FlatNine()
{
  std::vector<double> p(9, 0.106875);
  p[4] = 0.145;
  return p;
}

TEST(ShannonEntropy, UniformFourIsTwoBits)
{
  std::vector<double> p(4, 0.25);
  EXPECT_EQ(ShannonEntropy(p), 2.0);
}

TEST(ShannonEntropy, DeltaIsZero)
{
  std::vector<double> p{1, 0, 0, 0};
  EXPECT_EQ(ShannonEntropy(p), 0.0);
  EXPECT_FALSE(std::signbit(ShannonEntropy(p)));
}

TEST(ShannonEntropy, DyadicSum)
{
  std::vector<double> p{0.5, 0.25, 0.125, 0.125};
  EXPECT_EQ(ShannonEntropy(p), 1.75);
}

TEST(ShannonEntropy, PeakedFourWay)
{
  std::vector<double> p{0.7, 0.1, 0.1, 0.1};
  EXPECT_NEAR(ShannonEntropy(p), 1.3567796494470397, 1e-15);
}

TEST(Pushforward, SingleLabelIsDelta)
{
  std::vector<double>  p{0.1, 0.6, 0.3};
  std::vector<LabelId> l{4, 4, 4};
  auto ld = Pushforward(p, l);
  ASSERT_EQ(ld.support.size(), 1u);
  EXPECT_EQ(ld.support[0], 4);
  EXPECT_NEAR(ld.probs[0], 1.0, 1e-15);
}

TEST(Pushforward, CountingMeasure)
{
  std::vector<double>  p(9, 1.0 / 9.0);
  std::vector<LabelId> l{1, 1, 1, 1, 1, 1, 1, 1, 2};
  auto ld = Pushforward(p, l);
  EXPECT_NEAR(ld.MassOf(1), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(ld.MassOf(2), 1.0 / 9.0, 1e-15);
}

TEST(Pushforward, DominantTumorMass)
{
  std::vector<double>  p(8, 0.115);
  p.push_back(0.08);
  std::vector<LabelId> l{1, 1, 1, 1, 1, 1, 1, 1, 2};
  auto ld = Pushforward(p, l);
  EXPECT_NEAR(ld.MassOf(1), 0.92, 1e-12);
  EXPECT_NEAR(ShannonEntropy(ld), 0.4021791902022728, 1e-12);
}

TEST(Pushforward, FirstAppearanceOrder)
{
  std::vector<double>  p{0.1, 0.2, 0.3, 0.4};
  std::vector<LabelId> l{7, 3, 7, 5};
  auto ld = Pushforward(p, l);
  EXPECT_EQ(ld.support, (std::vector<LabelId>{7, 3, 5}));
}

TEST(Pushforward, LengthMismatch)
{
  std::vector<double>  p{0.5, 0.5};
  std::vector<LabelId> l{1};
  EXPECT_THROW(Pushforward(p, l), Error);
}

TEST(MostLikelyLabel, DominantAndTies)
{
  EXPECT_EQ(MostLikelyLabel({{1, 2}, {0.92, 0.08}}), 1);
  EXPECT_EQ(MostLikelyLabel({{11, 12}, {0.5, 0.5}}), 11);
  EXPECT_EQ(MostLikelyLabel({{12, 11}, {0.5, 0.5}}), 12);
  EXPECT_EQ(MostLikelyLabel({{200, 50}, {0.8, 0.2}}), 200);
}

TEST(LabelOfMode, Cases)
{
  std::vector<LabelId> abc{10, 20, 30};
  std::vector<double>  delta{0, 1, 0};
  EXPECT_EQ(LabelOfMode(delta, abc), 20);
  std::vector<double> tie{1.0 / 3, 1.0 / 3, 1.0 / 3};
  EXPECT_EQ(LabelOfMode(tie, abc), 10);
  std::vector<double>  p{0.2, 0.2, 0.25, 0.2, 0.15};
  std::vector<LabelId> l{200, 200, 50, 200, 200};
  EXPECT_EQ(LabelOfMode(p, l), 50);
}

TEST(IntensityBins, Cases)
{
  std::vector<double> a{200, 50};
  EXPECT_EQ(IntensityBins(a, 10), (std::vector<LabelId>{20, 5}));
  std::vector<double> b{0, 3, 17};
  EXPECT_EQ(IntensityBins(b, 1), (std::vector<LabelId>{0, 3, 17}));
  std::vector<double> c{9.99, 10.0};
  EXPECT_EQ(IntensityBins(c, 10), (std::vector<LabelId>{0, 1}));
  EXPECT_THROW(IntensityBins(c, 0), Error);
}

TEST(VoxelReport, FlatTumorWitness)
{
  auto                 p = FlatNine();
  std::vector<LabelId> l{1, 1, 1, 1, 1, 1, 1, 1, 2};
  auto                 r = MakeVoxelReport(p, l, {1, 1});
  EXPECT_NEAR(r.u_t, 3.1621850452537843, 1e-12);
  EXPECT_NEAR(r.u_l, 0.4904174538925934, 1e-12);
  EXPECT_GE(r.u_t, 3.10);
  EXPECT_LE(r.u_t, 3.17);
  EXPECT_LE(r.u_l, 0.5);
  EXPECT_EQ(r.mode_label, 1);
  EXPECT_EQ(r.ml_label, 1);
  EXPECT_TRUE(r.agree);
}

TEST(VoxelReport, MismatchScenario)
{
  std::vector<double>  p{0.2, 0.2, 0.25, 0.2, 0.15};
  std::vector<LabelId> l{200, 200, 50, 200, 200};
  auto                 r = MakeVoxelReport(p, l, {1, 1});
  EXPECT_EQ(r.mode_label, 50);
  EXPECT_EQ(r.ml_label, 200);
  EXPECT_FALSE(r.agree);
  EXPECT_NEAR(r.label_dist.MassOf(200), 0.75, 1e-15);
  EXPECT_NEAR(r.u_t, 2.303701696057348, 1e-12);
  EXPECT_NEAR(r.u_l, 0.8112781244591328, 1e-12);
}

TEST(VoxelReport, DeltaAgrees)
{
  std::vector<double>  p{0, 0, 1};
  std::vector<LabelId> l{1, 2, 3};
  auto                 r = MakeVoxelReport(p, l, {0, 0});
  EXPECT_EQ(r.u_t, 0.0);
  EXPECT_EQ(r.u_l, 0.0);
  EXPECT_TRUE(r.agree);
}

TEST(FieldReports, ShippedFixtures)
{
  auto rep = ComputeFieldReports(testing::MismatchField(), testing::MismatchLabels());
  ASSERT_EQ(rep.reports.size(), 1u);
  EXPECT_FALSE(rep.reports[0].agree);
  EXPECT_TRUE(rep.u_t.HasData(1, 1));
  EXPECT_FALSE(rep.u_t.HasData(0, 0));
  EXPECT_TRUE(std::isnan(rep.u_l.values[0]));

  auto flat = ComputeFieldReports(testing::FlatTumorField(), testing::FlatTumorLabels());
  ASSERT_EQ(flat.reports.size(), 1u);
  EXPECT_NEAR(flat.reports[0].u_t, 3.1621850452537843, 1e-12);
  EXPECT_NEAR(flat.reports[0].u_l, 0.4904174538925934, 1e-12);
}

TEST(FieldReports, UniformLabelsZeroLabelEntropy)
{
  TransformDistField f(6, 6, DisplacementSpace::Square(1));
  for (int y = 1; y < 5; ++y)
  {
    for (int x = 1; x < 5; ++x)
    {
      std::vector<double> raw;
      for (int k = 0; k < 9; ++k)
      {
        raw.push_back(1.0 + ((x * 7 + y * 3 + k) % 5));
      }
      f.Set(x, y, Normalize(raw));
    }
  }
  auto rep = ComputeFieldReports(f, LabelMap(6, 6, std::vector<LabelId>(36, 3)));
  ASSERT_EQ(rep.reports.size(), 16u);
  for (auto const &r : rep.reports)
  {
    EXPECT_EQ(r.u_l, 0.0);
    EXPECT_GT(r.u_t, 0.0);
  }
}

TEST(FieldReports, RowMajorAndThreadIndependent)
{
  TransformDistField f(10, 8, DisplacementSpace::Square(1));
  CounterRng rng(3, 0);
  for (int y = 1; y < 7; ++y)
  {
    for (int x = 1; x < 9; ++x)
    {
      std::vector<double> raw;
      for (int k = 0; k < 9; ++k)
      {
        raw.push_back(rng.NextOpenUniform());
      }
      f.Set(x, y, Normalize(raw));
    }
  }
  std::vector<LabelId> ids;
  for (int i = 0; i < 80; ++i)
  {
    ids.push_back((i * 13) % 3);
  }
  LabelMap labels(10, 8, ids);
  auto a = ComputeFieldReports(f, labels, 1);
  auto b = ComputeFieldReports(f, labels, 4);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i)
  {
    EXPECT_EQ(a.reports[i].voxel, b.reports[i].voxel);
    EXPECT_EQ(a.reports[i].u_t, b.reports[i].u_t);
    EXPECT_EQ(a.reports[i].u_l, b.reports[i].u_l);
  }
  EXPECT_EQ(a.reports.front().voxel, (GridPoint{1, 1}));
  EXPECT_EQ(a.reports[1].voxel, (GridPoint{2, 1}));
}

TEST(FieldReports, LabelGridMustMatch)
{
  EXPECT_THROW(ComputeFieldReports(testing::MismatchField(), LabelMap(4, 4, std::vector<LabelId>(16))),
               Error);
}

TEST(IntensityReports, BinnedIntensitiesAsLabels)
{
  auto rep = ComputeIntensityReports(testing::MismatchField(),
                                     Image(3, 3, std::vector<double>{0, 200, 0, 200, 50, 200, 0, 200, 0}),
                                     10.0);
  ASSERT_EQ(rep.reports.size(), 1u);
  EXPECT_EQ(rep.reports[0].mode_label, 5);
  EXPECT_EQ(rep.reports[0].ml_label, 20);
}

TEST(CprSummary, IdenticalSamples)
{
  std::vector<cpr::Point> s(10, cpr::Point{1.5, -2});
  auto                    r = SummarizeSamples(s);
  EXPECT_EQ(r.variance[0], 0.0);
  EXPECT_EQ(r.iqr[1], 0.0);
  EXPECT_EQ(r.cov_frobenius, 0.0);
}

TEST(CprSummary, GaussianClosedForm)
{
  auto r = SummarizeGaussian({4, 0, 9});
  EXPECT_EQ(r.std_dev[0], 2.0);
  EXPECT_EQ(r.std_dev[1], 3.0);
  EXPECT_NEAR(r.cov_frobenius, std::sqrt(97.0), 1e-15);
  EXPECT_NEAR(r.iqr[0], 2.0 * kNormalIqr, 1e-15);
  EXPECT_NEAR(kNormalIqr, 1.3489795003921634, 1e-16);
}

TEST(CprSummary, StandardNormalIqr)
{
  std::vector<cpr::Point> s;
  CounterRng              rng(99, 0);
  for (int i = 0; i < 100000; ++i)
  {
    double const a = rng.NextNormal();
    double const b = rng.NextNormal();
    s.push_back({a, b});
  }
  auto r = SummarizeSamples(s);
  EXPECT_NEAR(r.iqr[0], 1.349, 0.03);
  EXPECT_NEAR(r.iqr[1], 1.349, 0.03);
  EXPECT_NEAR(r.variance[0], 1.0, 0.02);
}

TEST(CprSummary, TooFewSamples)
{
  std::vector<cpr::Point> s(1);
  EXPECT_THROW(SummarizeSamples(s), Error);
}

TEST(Quantile, TypeSeven)
{
  EXPECT_EQ(Quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_EQ(Quantile({4, 1, 3, 2}, 0.75), 3.25);
  EXPECT_EQ(Quantile({5}, 0.5), 5.0);
}

}  // namespace
}  // namespace regunc::uncertainty
