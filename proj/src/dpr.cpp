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

#include "regunc/dpr.hpp"

#include "regunc/error.hpp"
#include "regunc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace regunc::dpr {
namespace {

std::string VoxelName(GridPoint v)
{
  return "(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
}

bool PatchInside(Image const &img, int cx, int cy, int r)
{
  return cx - r >= 0 && cy - r >= 0 && cx + r < img.width() && cy + r < img.height();
}

}  // namespace

void Validate(Config const &cfg)
{
  if (cfg.patch_radius < 0)
  {
    Fail(ErrorKind::kConfig, "patch_radius must be non-negative");
  }
  if (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature))
  {
    Fail(ErrorKind::kConfig, "temperature must be positive and finite");
  }
  if (!(cfg.smoothing_weight >= 0.0) || !std::isfinite(cfg.smoothing_weight))
  {
    Fail(ErrorKind::kConfig, "smoothing_weight must be non-negative");
  }
  if (cfg.smoothing_iterations < 0)
  {
    Fail(ErrorKind::kConfig, "smoothing_iterations must be non-negative");
  }
}

double LocalCost(Image const &target, Image const &source, GridPoint voxel, Offset offset,
                 Config const &cfg)
{
  int const r  = cfg.patch_radius;
  int const sx = voxel.x + offset.dx;
  int const sy = voxel.y + offset.dy;
  if (!PatchInside(target, voxel.x, voxel.y, r) || !PatchInside(source, sx, sy, r))
  {
    Fail(ErrorKind::kInvalid, "masked voxel " + VoxelName(voxel));
  }
  double const n = static_cast<double>((2 * r + 1) * (2 * r + 1));

  if (cfg.metric == Metric::kSsd)
  {
    double acc = 0.0;
    for (int j = -r; j <= r; ++j)
    {
      for (int i = -r; i <= r; ++i)
      {
        double const d = source.at(sx + i, sy + j) - target.at(voxel.x + i, voxel.y + j);
        acc += d * d;
      }
    }
    return acc / n;
  }

  double mt = 0.0, ms = 0.0;
  for (int j = -r; j <= r; ++j)
  {
    for (int i = -r; i <= r; ++i)
    {
      mt += target.at(voxel.x + i, voxel.y + j);
      ms += source.at(sx + i, sy + j);
    }
  }
  mt /= n;
  ms /= n;
  double st = 0.0, ss = 0.0, cross = 0.0;
  for (int j = -r; j <= r; ++j)
  {
    for (int i = -r; i <= r; ++i)
    {
      double const a = target.at(voxel.x + i, voxel.y + j) - mt;
      double const b = source.at(sx + i, sy + j) - ms;
      st += a * a;
      ss += b * b;
      cross += a * b;
    }
  }
  if (st <= 0.0 || ss <= 0.0)
  {
    Fail(ErrorKind::kNumeric, "zero-variance patch at voxel " + VoxelName(voxel));
  }
  double const ncc = std::clamp(cross / std::sqrt(st * ss), -1.0, 1.0);
  return 1.0 - ncc;
}

TransformDistField EstimateDist(Image const &target, Image const &source,
                                DisplacementSpace const &space, Config const &cfg, int threads)
{
  Validate(cfg);
  if (target.width() != source.width() || target.height() != source.height())
  {
    Fail(ErrorKind::kConfig, "target and source images differ in size");
  }
  int const          w = target.width();
  int const          h = target.height();
  TransformDistField field(w, h, space);
  std::size_t const  k = space.size();

  ParallelFor(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
    int const           y = static_cast<int>(row);
    std::vector<double> costs(k);
    for (int x = 0; x < w; ++x)
    {
      if (!WindowInside(w, h, {x, y}, space, cfg.patch_radius))
      {
        continue;
      }
      double cmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i)
      {
        costs[i] = LocalCost(target, source, {x, y}, space[i], cfg);
        cmin     = std::min(cmin, costs[i]);
      }
      auto   out = field.MutableProbs(x, y);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i)
      {
        out[i] = std::exp(-(costs[i] - cmin) / cfg.temperature);
        sum += out[i];
      }
      for (auto &p : out)
      {
        p /= sum;
      }
      field.SetMask(x, y, true);
    }
  });

  if (field.MaskedCount() == 0)
  {
    Fail(ErrorKind::kConfig, "displacement space too large for image");
  }
  return field;
}

TransformDistField SmoothDist(TransformDistField const &field, Config const &cfg, int threads)
{
  Validate(cfg);
  if (cfg.smoothing_iterations == 0 || cfg.smoothing_weight == 0.0)
  {
    return field;
  }
  int const         w = field.width();
  int const         h = field.height();
  std::size_t const k = field.k();
  double const      weight = cfg.smoothing_weight;

  // Log-probabilities of the previous iterate; masked-out slots are unused.
  std::vector<double> logp(static_cast<std::size_t>(w) * h * k, 0.0);
  auto load_logs = [&](TransformDistField const &f) {
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        if (!f.masked_in(x, y))
        {
          continue;
        }
        auto const   p    = f.probs(x, y);
        std::size_t base  = f.VoxelIndex(x, y) * k;
        for (std::size_t i = 0; i < k; ++i)
        {
          logp[base + i] = std::log(std::max(p[i], kLogFloor));
        }
      }
    }
  };

  TransformDistField current = field;
  for (int it = 0; it < cfg.smoothing_iterations; ++it)
  {
    load_logs(current);
    TransformDistField next = current;
    ParallelFor(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
      int const           y = static_cast<int>(row);
      std::vector<double> acc(k);
      int const           nx[4] = {-1, 1, 0, 0};
      int const           ny[4] = {0, 0, -1, 1};
      for (int x = 0; x < w; ++x)
      {
        if (!current.masked_in(x, y))
        {
          continue;
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        int count = 0;
        for (int n = 0; n < 4; ++n)
        {
          int const ux = x + nx[n];
          int const uy = y + ny[n];
          if (ux < 0 || uy < 0 || ux >= w || uy >= h || !current.masked_in(ux, uy))
          {
            continue;
          }
          std::size_t const base = current.VoxelIndex(ux, uy) * k;
          for (std::size_t i = 0; i < k; ++i)
          {
            acc[i] += logp[base + i];
          }
          ++count;
        }
        if (count == 0)
        {
          continue;
        }
        std::size_t const self = current.VoxelIndex(x, y) * k;
        double            lmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i)
        {
          acc[i] = (1.0 - weight) * logp[self + i] + weight * (acc[i] / count);
          lmax   = std::max(lmax, acc[i]);
        }
        auto   out = next.MutableProbs(x, y);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i)
        {
          out[i] = std::exp(acc[i] - lmax);
          sum += out[i];
        }
        for (auto &p : out)
        {
          p /= sum;
        }
      }
    });
    current = std::move(next);
  }
  return current;
}

std::size_t ModeIndex(std::span<double const> probs)
{
  if (probs.empty())
  {
    Fail(ErrorKind::kInvalid, "mode of an empty distribution");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
  {
    if (probs[i] > probs[best])
    {
      best = i;
    }
  }
  return best;
}

}  // namespace regunc::dpr
