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

#include <cstddef>

namespace regunc::dpr {

enum class Metric
{
  kSsd,
  kNcc,
};

struct Config
{
  int    patch_radius         = 1;
  Metric metric               = Metric::kSsd;
  double temperature          = 1.0;  // intensity^2 for ssd, dimensionless for ncc
  double smoothing_weight     = 0.0;
  int    smoothing_iterations = 0;
};

void Validate(Config const &cfg);

/// Log floor applied before taking logarithms in smoothing.
inline constexpr double kLogFloor = 1e-12;

/// ssd: mean squared difference over the (2r+1)^2 patch.
/// ncc: 1 - normalised cross-correlation, in [0, 2].
/// Throws "masked voxel" when either patch leaves its image, and
/// "zero-variance patch" for ncc on a constant patch.
double LocalCost(Image const &target, Image const &source, GridPoint voxel, Offset offset,
                 Config const &cfg);

/// Gibbs distribution over candidate costs, P_k ~ exp(-(c_k - c_min) / T),
/// for every voxel whose full candidate window lies inside the grid. Output
/// is bit-identical for any thread count.
TransformDistField EstimateDist(Image const &target, Image const &source,
                                DisplacementSpace const &space, Config const &cfg,
                                int threads = 1);

/// Jacobi mean-field smoothing of log-probabilities over 4-neighbours:
///   log P'(v) = (1 - w) log P(v) + w * mean_{u in N(v), masked} log P(u)
/// followed by renormalisation. w = 0 or zero iterations return the input
/// unchanged.
TransformDistField SmoothDist(TransformDistField const &field, Config const &cfg,
                              int threads = 1);

/// Zero-based index of the most probable displacement; ties go to the lowest
/// index.
std::size_t ModeIndex(std::span<double const> probs);

inline std::size_t ModeIndex(VoxelTransformDist const &dist)
{
  return ModeIndex(dist.probs());
}

}  // namespace regunc::dpr
