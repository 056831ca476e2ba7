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
#include "regunc/dpr.hpp"
#include "regunc/uncertainty.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace regunc::harness {

/// Dense per-voxel integer displacement.
struct DisplacementGrid
{
  int                 width  = 0;
  int                 height = 0;
  std::vector<Offset> offsets;

  Offset const &at(int x, int y) const
  {
    return offsets[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)];
  }
};

/// Control points on a regular lattice with `spacing` pixels between nodes;
/// the lattice covers the image so the last node sits at or beyond the edge.
struct ControlGrid
{
  int                 spacing = 1;
  int                 nodes_x = 0;
  int                 nodes_y = 0;
  std::vector<Offset> displacements;  // row-major over nodes
};

ControlGrid RandomControlGrid(int width, int height, int spacing, int max_magnitude,
                              std::uint64_t seed);
ControlGrid ConstantControlGrid(int width, int height, int spacing, Offset displacement);

/// Bilinear interpolation of control displacements, rounded per voxel.
DisplacementGrid DenseDisplacement(ControlGrid const &grid, int width, int height);

struct SynthResult
{
  Image            deformed;
  DisplacementGrid gt_displacement;
  std::uint64_t    seed = 0;
};

/// deformed(v) = image(v + gt(v)) with nearest-neighbour lookup and border
/// clamping, so registering `deformed` (target) to `image` (source) has the
/// exact answer gt(v) at every voxel.
SynthResult Deform(Image const &image, ControlGrid const &grid, std::uint64_t seed = 0);

/// Random control displacements with components uniform in
/// [-max_magnitude, max_magnitude]. max_magnitude = 0 gives the identity.
SynthResult SynthDeform(Image const &image, int grid_spacing, int max_magnitude,
                        std::uint64_t seed);

struct EvalCounts
{
  std::size_t n_voxels          = 0;
  std::size_t both_correct      = 0;
  std::size_t only_ml_correct   = 0;  // L_m right, L(d_m) wrong
  std::size_t only_mode_correct = 0;  // L(d_m) right, L_m wrong
  std::size_t neither           = 0;

  friend bool operator==(EvalCounts const &, EvalCounts const &) = default;
};

enum class Outcome
{
  kBoth,
  kOnlyMl,
  kOnlyMode,
  kNeither,
};

struct VoxelOutcome
{
  GridPoint voxel;
  LabelId   gt_label   = 0;
  LabelId   mode_label = 0;
  LabelId   ml_label   = 0;
  Outcome   outcome    = Outcome::kBoth;
};

struct EvalResult
{
  EvalCounts                counts;
  std::vector<VoxelOutcome> voxels;  // row-major over masked-in voxels
};

/// Compares L(d_m) and L_m against the label found at the true displacement.
/// Throws "truth not representable" listing voxels whose true displacement
/// is not a candidate.
EvalResult Evaluate(TransformDistField const &field, DisplacementGrid const &gt,
                    LabelMap const &source_labels, int threads = 1);

char const *OutcomeName(Outcome o) noexcept;

struct McConfig
{
  std::size_t   n_trials          = 10000;
  std::size_t   k                 = 9;
  std::size_t   n_labels          = 2;
  double        concentration_low  = 0.1;
  double        concentration_high = 10.0;
  std::uint64_t seed               = 1;
};

struct McResult
{
  std::size_t                         n_trials        = 0;
  double                              spearman_rho    = 0.0;
  double                              frac_discordant = 0.0;  // U_t top quartile, U_l bottom
  std::uint64_t                       seed            = 0;
  std::vector<std::pair<double, double>> trials;              // (u_t, u_l)
};

/// Spearman rank correlation with average ranks for ties. Throws when either
/// input is constant.
double SpearmanRho(std::span<double const> a, std::span<double const> b);

/// Rank correlation and quartile discordance of (u_t, u_l) pairs.
McResult SummarizePairs(std::vector<std::pair<double, double>> pairs, std::uint64_t seed);

/// Dirichlet distributions over K displacements with random label
/// surjections; one independent counter stream per trial.
McResult MonteCarloDiscordance(McConfig const &cfg, int threads = 1);

/// Engine-driven variant: the (u_t, u_l) pairs of every masked voxel.
McResult EngineDiscordance(uncertainty::FieldReports const &reports, std::uint64_t seed);

/// Seeded two-label image with smooth texture and a soft disc boundary:
/// a bright disc (label 1) on a darker background (label 0).
struct Phantom
{
  Image    image;
  LabelMap labels;
};

Phantom TwoLabelPhantom(int width, int height, std::uint64_t seed);

struct StandardScenario
{
  Phantom            phantom;
  SynthResult        synth;
  DisplacementSpace  space;
  dpr::Config        dpr;
  TransformDistField field;
  EvalResult         eval;
};

/// 64x64 phantom, grid spacing 16, max magnitude 2, K = 25 square space.
StandardScenario RunStandardScenario(std::uint64_t seed = 42, int threads = 1);

}  // namespace regunc::harness
