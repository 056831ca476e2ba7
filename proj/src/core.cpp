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

#include "regunc/core.hpp"

#include "regunc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>
#include <utility>

namespace regunc {
namespace {

constexpr double kSumTolerance = 1e-9;

void CheckDims(int width, int height)
{
  if (width <= 0 || height <= 0)
  {
    Fail(ErrorKind::kInvalid, "grid dimensions must be positive");
  }
}

std::size_t Area(int width, int height)
{
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Image::Image(int width, int height, double fill)
  : width_(width)
  , height_(height)
{
  CheckDims(width, height);
  if (!std::isfinite(fill))
  {
    Fail(ErrorKind::kInvalid, "image intensities must be finite");
  }
  data_.assign(Area(width, height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
  : width_(width)
  , height_(height)
  , data_(std::move(data))
{
  CheckDims(width, height);
  if (data_.size() != Area(width, height))
  {
    Fail(ErrorKind::kInvalid, "image data length does not match width x height");
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }))
  {
    Fail(ErrorKind::kInvalid, "image intensities must be finite");
  }
}

LabelMap::LabelMap(int width, int height, std::vector<LabelId> labels,
                   std::map<LabelId, std::string> names)
  : width_(width)
  , height_(height)
  , labels_(std::move(labels))
  , names_(std::move(names))
{
  CheckDims(width, height);
  if (labels_.size() != Area(width, height))
  {
    Fail(ErrorKind::kInvalid, "label data length does not match width x height");
  }
}

DisplacementSpace::DisplacementSpace(std::vector<Offset> offsets)
  : offsets_(std::move(offsets))
{
  if (offsets_.empty())
  {
    Fail(ErrorKind::kInvalid, "displacement space must contain at least one offset");
  }
  std::set<std::pair<int, int>> seen;
  for (auto const &o : offsets_)
  {
    if (!seen.emplace(o.dx, o.dy).second)
    {
      Fail(ErrorKind::kInvalid, "duplicate offset (" + std::to_string(o.dx) + ", " +
                                    std::to_string(o.dy) + ") in displacement space");
    }
  }
}

DisplacementSpace DisplacementSpace::Square(int radius)
{
  if (radius < 0)
  {
    Fail(ErrorKind::kInvalid, "displacement radius must be non-negative");
  }
  std::vector<Offset> offsets;
  offsets.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (int dy = -radius; dy <= radius; ++dy)
  {
    for (int dx = -radius; dx <= radius; ++dx)
    {
      offsets.push_back({dx, dy});
    }
  }
  return DisplacementSpace(std::move(offsets));
}

std::ptrdiff_t DisplacementSpace::Find(Offset o) const noexcept
{
  auto it = std::find(offsets_.begin(), offsets_.end(), o);
  return it == offsets_.end() ? -1 : std::distance(offsets_.begin(), it);
}

int DisplacementSpace::MaxAbsComponent() const noexcept
{
  int m = 0;
  for (auto const &o : offsets_)
  {
    m = std::max({m, std::abs(o.dx), std::abs(o.dy)});
  }
  return m;
}

VoxelTransformDist::VoxelTransformDist(std::vector<double> probs)
  : probs_(std::move(probs))
{
  if (probs_.empty())
  {
    Fail(ErrorKind::kInvalid, "transform distribution must be non-empty");
  }
  double sum = 0.0;
  for (double p : probs_)
  {
    if (!(p >= 0.0 && p <= 1.0))
    {
      Fail(ErrorKind::kInvalid, "probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
  {
    Fail(ErrorKind::kInvalid, "transform distribution does not sum to 1");
  }
}

VoxelTransformDist Normalize(std::span<double const> raw)
{
  double sum = 0.0;
  for (double w : raw)
  {
    if (!std::isfinite(w) || w < 0.0)
    {
      Fail(ErrorKind::kNumeric, "degenerate weights");
    }
    sum += w;
  }
  if (!(sum > 0.0))
  {
    Fail(ErrorKind::kNumeric, "degenerate weights");
  }
  std::vector<double> probs(raw.begin(), raw.end());
  for (double &p : probs)
  {
    p /= sum;
  }
  return VoxelTransformDist(std::move(probs));
}

double LabelDistribution::MassOf(LabelId label) const noexcept
{
  for (std::size_t i = 0; i < support.size(); ++i)
  {
    if (support[i] == label)
    {
      return probs[i];
    }
  }
  return 0.0;
}

void Validate(LabelDistribution const &ld)
{
  if (ld.support.empty() || ld.support.size() != ld.probs.size())
  {
    Fail(ErrorKind::kInvalid, "label distribution support/probability length mismatch");
  }
  std::set<LabelId> seen(ld.support.begin(), ld.support.end());
  if (seen.size() != ld.support.size())
  {
    Fail(ErrorKind::kInvalid, "label distribution support is not distinct");
  }
  double sum = 0.0;
  for (double p : ld.probs)
  {
    if (!(p >= 0.0))
    {
      Fail(ErrorKind::kInvalid, "negative label probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
  {
    Fail(ErrorKind::kInvalid, "label distribution does not sum to 1");
  }
}

TransformDistField::TransformDistField(int width, int height, DisplacementSpace space)
  : width_(width)
  , height_(height)
  , space_(std::move(space))
{
  CheckDims(width, height);
  if (space_.size() == 0)
  {
    Fail(ErrorKind::kInvalid, "displacement space must contain at least one offset");
  }
  probs_.assign(Area(width, height) * space_.size(), 0.0);
  mask_.assign(Area(width, height), 0);
}

std::size_t TransformDistField::MaskedCount() const noexcept
{
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::span<double const> TransformDistField::probs(int x, int y) const
{
  return std::span<double const>(probs_).subspan(VoxelIndex(x, y) * k(), k());
}

std::span<double> TransformDistField::MutableProbs(int x, int y)
{
  return std::span<double>(probs_).subspan(VoxelIndex(x, y) * k(), k());
}

void TransformDistField::SetMask(int x, int y, bool in)
{
  mask_[VoxelIndex(x, y)] = in ? 1 : 0;
}

void TransformDistField::Set(int x, int y, VoxelTransformDist const &dist)
{
  if (dist.size() != k())
  {
    Fail(ErrorKind::kInvalid, "distribution length does not match displacement space");
  }
  std::copy(dist.probs().begin(), dist.probs().end(), MutableProbs(x, y).begin());
  SetMask(x, y, true);
}

LabelId DisplacedLabel(LabelMap const &labels, GridPoint voxel, Offset offset)
{
  int const tx = voxel.x + offset.dx;
  int const ty = voxel.y + offset.dy;
  if (!labels.Contains(tx, ty))
  {
    Fail(ErrorKind::kInvalid, "displacement leaves grid");
  }
  return labels.at(tx, ty);
}

bool WindowInside(int width, int height, GridPoint voxel, DisplacementSpace const &space,
                  int patch_radius) noexcept
{
  auto inside = [&](int cx, int cy) {
    return cx - patch_radius >= 0 && cy - patch_radius >= 0 && cx + patch_radius < width &&
           cy + patch_radius < height;
  };
  if (!inside(voxel.x, voxel.y))
  {
    return false;
  }
  for (auto const &o : space.offsets())
  {
    if (!inside(voxel.x + o.dx, voxel.y + o.dy))
    {
      return false;
    }
  }
  return true;
}

}  // namespace regunc
