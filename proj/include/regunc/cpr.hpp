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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace regunc::cpr {

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

struct Landmark
{
  Point target;
  Point source;
};

/// Corresponding point pairs; displacement at a landmark is source - target.
class LandmarkSet
{
public:
  explicit LandmarkSet(std::vector<Landmark> pairs);

  std::vector<Landmark> const &pairs() const noexcept
  {
    return pairs_;
  }

private:
  std::vector<Landmark> pairs_;
};

/// CSV with tx,ty,sx,sy per line; a non-numeric first line is treated as a
/// header. Malformed rows raise ErrorKind::kConfig naming the line.
LandmarkSet LoadLandmarksCsv(std::filesystem::path const &path);

struct GpConfig
{
  double kernel_length   = 10.0;  // pixels
  double kernel_variance = 1.0;   // pixels^2
  double noise_variance  = 0.0;   // pixels^2
};

void Validate(GpConfig const &cfg);

/// Symmetric 2x2 covariance (cxx, cxy, cyy).
struct Cov2
{
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Per-voxel Gaussian marginals of the displacement posterior.
class GaussianDisplacementField
{
public:
  GaussianDisplacementField() = default;
  GaussianDisplacementField(int width, int height);

  int width() const noexcept
  {
    return width_;
  }
  int height() const noexcept
  {
    return height_;
  }
  std::size_t Index(int x, int y) const noexcept
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  Point const &mean(int x, int y) const
  {
    return mean_[Index(x, y)];
  }
  Cov2 const &cov(int x, int y) const
  {
    return cov_[Index(x, y)];
  }
  void Set(int x, int y, Point mean, Cov2 cov);

  std::vector<Point> const &means() const noexcept
  {
    return mean_;
  }
  std::vector<Cov2> const &covs() const noexcept
  {
    return cov_;
  }

private:
  int                width_  = 0;
  int                height_ = 0;
  std::vector<Point> mean_;
  std::vector<Cov2>  cov_;
};

/// Independent zero-mean GP regression of dx and dy with the squared
/// exponential kernel k(a, b) = s2 * exp(-|a - b|^2 / (2 l^2)). Stores the
/// latent posterior mean and marginal variance at every voxel centre; the
/// covariance is diagonal. Throws "degenerate landmark configuration" when
/// the kernel system cannot be factorised.
GaussianDisplacementField FitGp(LandmarkSet const &landmarks, int width, int height,
                                GpConfig const &cfg, int threads = 1);

/// sqrt(trace(cov) / 2): root mean of the two component variances.
double UncertaintyCircle(GaussianDisplacementField const &field, GridPoint voxel);

struct SampledDistribution
{
  LabelDistribution dist;     // support ascending by identifier
  std::size_t       clamped = 0;  // samples that left the grid
};

/// Monte-Carlo label distribution: displacement samples from the voxel's
/// Gaussian, rounded to the nearest source voxel (clamped to the border).
/// Deterministic in (seed, voxel, n_samples).
SampledDistribution SampleLabelDist(GaussianDisplacementField const &field,
                                    LabelMap const &source_labels, GridPoint voxel,
                                    std::size_t n_samples, std::uint64_t seed);

/// As SampleLabelDist but reads bilinear source intensity at the continuous
/// sample position and bins by floor(intensity / bin_width).
SampledDistribution SampleIntensityDist(GaussianDisplacementField const &field,
                                        Image const &source, GridPoint voxel,
                                        std::size_t n_samples, double bin_width,
                                        std::uint64_t seed);

/// Bilinear interpolation at a continuous position clamped to the grid.
double Bilinear(Image const &image, double x, double y);

/// Draws `n` displacement samples for `voxel` using the same stream as the
/// label samplers. Exposed for summary statistics.
std::vector<Point> SampleDisplacements(GaussianDisplacementField const &field, GridPoint voxel,
                                       std::size_t n, std::uint64_t seed);

}  // namespace regunc::cpr
