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

#include <array>
#include <span>
#include <vector>

namespace regunc::uncertainty {

/// Shannon entropy in bits, with 0 log 0 = 0. A uniform distribution over
/// four outcomes scores exactly 2.
double ShannonEntropy(std::span<double const> probs);

inline double ShannonEntropy(VoxelTransformDist const &dist)
{
  return ShannonEntropy(dist.probs());
}
inline double ShannonEntropy(LabelDistribution const &ld)
{
  return ShannonEntropy(ld.probs);
}

/// Label distribution induced by mapping displacement k to labels[k] and
/// summing mass per label. Support is ordered by first appearance.
LabelDistribution Pushforward(std::span<double const> probs, std::span<LabelId const> labels);

inline LabelDistribution Pushforward(VoxelTransformDist const &dist,
                                     std::span<LabelId const> labels)
{
  return Pushforward(dist.probs(), labels);
}

/// L_m: label with maximal mass, ties broken by support order.
LabelId MostLikelyLabel(LabelDistribution const &ld);

/// L(d_m): label attached to the displacement mode.
LabelId LabelOfMode(std::span<double const> probs, std::span<LabelId const> labels);

inline LabelId LabelOfMode(VoxelTransformDist const &dist, std::span<LabelId const> labels)
{
  return LabelOfMode(dist.probs(), labels);
}

/// floor(intensity / bin_width) per entry.
std::vector<LabelId> IntensityBins(std::span<double const> intensities, double bin_width);

struct VoxelReport
{
  GridPoint         voxel;
  double            u_t = 0.0;  // bits
  double            u_l = 0.0;  // bits
  LabelId           mode_label = 0;
  LabelId           ml_label   = 0;
  bool              agree      = true;
  LabelDistribution label_dist;
};

VoxelReport MakeVoxelReport(std::span<double const> probs, std::span<LabelId const> labels,
                            GridPoint voxel);

/// Scalar grid with explicit no-data cells (stored as NaN).
struct UncertaintyMap
{
  int                 width  = 0;
  int                 height = 0;
  std::vector<double> values;

  bool HasData(int x, int y) const;
};

struct FieldReports
{
  std::vector<VoxelReport> reports;  // row-major over masked-in voxels
  UncertaintyMap           u_t;
  UncertaintyMap           u_l;
};

/// Evaluates every masked-in voxel of a DPR field against the source label
/// map.
FieldReports ComputeFieldReports(TransformDistField const &field, LabelMap const &source_labels,
                                 int threads = 1);

/// As ComputeFieldReports but treats binned source intensities as labels.
FieldReports ComputeIntensityReports(TransformDistField const &field, Image const &source,
                                     double bin_width, int threads = 1);

/// Standard-normal interquartile range, Phi^-1(0.75) - Phi^-1(0.25).
inline constexpr double kNormalIqr = 1.3489795003921634;

/// Summary statistics of a continuous displacement distribution.
struct CprSummary
{
  std::array<double, 2> variance{};
  std::array<double, 2> std_dev{};
  std::array<double, 2> iqr{};
  double                cov_frobenius = 0.0;
};

/// Sample path: unbiased variances, type-7 quantile IQR, Frobenius norm of the
/// unbiased sample covariance. Requires at least two samples.
CprSummary SummarizeSamples(std::span<cpr::Point const> samples);

/// Closed form for a Gaussian voxel.
CprSummary SummarizeGaussian(cpr::Cov2 const &cov);

/// Type-7 (linear interpolation) quantile of unsorted data.
double Quantile(std::vector<double> values, double q);

}  // namespace regunc::uncertainty
