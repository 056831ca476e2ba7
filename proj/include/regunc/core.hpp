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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace regunc {

// Grid convention: row-major, origin top-left, x to the right, y downward.
// A displacement (dx, dy) moves a voxel (x, y) to (x + dx, y + dy).

struct GridPoint
{
  int x = 0;
  int y = 0;

  friend bool operator==(GridPoint const &, GridPoint const &) = default;
};

struct Offset
{
  int dx = 0;
  int dy = 0;

  friend bool operator==(Offset const &, Offset const &) = default;
};

using LabelId = std::int64_t;

/// 2D scalar image. Intensities are always held as doubles regardless of the
/// bit depth of the file they came from.
class Image
{
public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const noexcept
  {
    return width_;
  }
  int height() const noexcept
  {
    return height_;
  }
  std::size_t size() const noexcept
  {
    return data_.size();
  }
  bool Contains(int x, int y) const noexcept
  {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  double at(int x, int y) const
  {
    return data_[Index(x, y)];
  }
  double &at(int x, int y)
  {
    return data_[Index(x, y)];
  }
  std::size_t Index(int x, int y) const noexcept
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<double const> data() const noexcept
  {
    return data_;
  }

private:
  int                 width_  = 0;
  int                 height_ = 0;
  std::vector<double> data_;
};

/// Per-voxel categorical labels with optional display names.
class LabelMap
{
public:
  LabelMap() = default;
  LabelMap(int width, int height, std::vector<LabelId> labels,
           std::map<LabelId, std::string> names = {});

  int width() const noexcept
  {
    return width_;
  }
  int height() const noexcept
  {
    return height_;
  }
  bool Contains(int x, int y) const noexcept
  {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  LabelId at(int x, int y) const
  {
    return labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  std::span<LabelId const> labels() const noexcept
  {
    return labels_;
  }
  std::map<LabelId, std::string> const &names() const noexcept
  {
    return names_;
  }

private:
  int                            width_  = 0;
  int                            height_ = 0;
  std::vector<LabelId>           labels_;
  std::map<LabelId, std::string> names_;
};

/// Ordered, duplicate-free set of candidate integer displacements. The order
/// is part of the contract: mode tie-breaking picks the lowest index.
class DisplacementSpace
{
public:
  DisplacementSpace() = default;
  explicit DisplacementSpace(std::vector<Offset> offsets);

  /// Square neighbourhood with (2r+1)^2 offsets, dy outer and dx inner, both
  /// ascending. For r = 1 the zero offset sits at index 4.
  static DisplacementSpace Square(int radius);

  std::size_t size() const noexcept
  {
    return offsets_.size();
  }
  Offset const &operator[](std::size_t k) const
  {
    return offsets_[k];
  }
  std::span<Offset const> offsets() const noexcept
  {
    return offsets_;
  }

  /// Index of `o`, or -1 when the space does not contain it.
  std::ptrdiff_t Find(Offset o) const noexcept;

  int MaxAbsComponent() const noexcept;

  friend bool operator==(DisplacementSpace const &, DisplacementSpace const &) = default;

private:
  std::vector<Offset> offsets_;
};

/// Unity-sum probability vector over a DisplacementSpace.
class VoxelTransformDist
{
public:
  VoxelTransformDist() = default;

  /// Validates that every entry is in [0, 1] and the total is 1 within 1e-9.
  explicit VoxelTransformDist(std::vector<double> probs);

  std::span<double const> probs() const noexcept
  {
    return probs_;
  }
  std::size_t size() const noexcept
  {
    return probs_.size();
  }
  double operator[](std::size_t k) const
  {
    return probs_[k];
  }

private:
  std::vector<double> probs_;
};

/// raw / sum(raw). Throws "degenerate weights" for negative, non-finite or
/// all-zero input.
VoxelTransformDist Normalize(std::span<double const> raw);

/// Probability mass over label (or intensity bin) identifiers.
struct LabelDistribution
{
  std::vector<LabelId> support;
  std::vector<double>  probs;

  double MassOf(LabelId label) const noexcept;
};

/// Checks the distribution invariants; throws kInvalid on violation.
void Validate(LabelDistribution const &ld);

/// Per-voxel transform distributions for a whole grid. Masked-out voxels
/// carry no distribution; their storage is zero-filled.
class TransformDistField
{
public:
  TransformDistField() = default;
  TransformDistField(int width, int height, DisplacementSpace space);

  int width() const noexcept
  {
    return width_;
  }
  int height() const noexcept
  {
    return height_;
  }
  DisplacementSpace const &space() const noexcept
  {
    return space_;
  }
  std::size_t k() const noexcept
  {
    return space_.size();
  }
  std::size_t VoxelIndex(int x, int y) const noexcept
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  bool masked_in(int x, int y) const
  {
    return mask_[VoxelIndex(x, y)] != 0;
  }
  std::size_t MaskedCount() const noexcept;

  std::span<double const> probs(int x, int y) const;

  /// Stores `dist` at (x, y) and marks the voxel in-mask.
  void Set(int x, int y, VoxelTransformDist const &dist);

  /// Raw write access for engines that fill many voxels; the caller is
  /// responsible for the unity-sum invariant.
  std::span<double> MutableProbs(int x, int y);
  void              SetMask(int x, int y, bool in);

  std::span<double const>       raw_probs() const noexcept
  {
    return probs_;
  }
  std::span<std::uint8_t const> raw_mask() const noexcept
  {
    return mask_;
  }

private:
  int                       width_  = 0;
  int                       height_ = 0;
  DisplacementSpace         space_;
  std::vector<double>       probs_;
  std::vector<std::uint8_t> mask_;
};

/// L(d): the label found at voxel + offset. Throws "displacement leaves grid".
LabelId DisplacedLabel(LabelMap const &labels, GridPoint voxel, Offset offset);

/// True when every candidate window of `voxel` (patch of `patch_radius`
/// around voxel + d_k, and around voxel itself) stays inside a width x height
/// grid.
bool WindowInside(int width, int height, GridPoint voxel, DisplacementSpace const &space,
                  int patch_radius) noexcept;

}  // namespace regunc
