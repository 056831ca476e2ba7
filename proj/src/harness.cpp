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

#include "regunc/harness.hpp"

#include "regunc/error.hpp"
#include "regunc/parallel.hpp"
#include "regunc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace regunc::harness {
namespace {

int NodeCount(int extent, int spacing)
{
  return (extent - 1 + spacing - 1) / spacing + 1;
}

void CheckSpacing(int width, int height, int spacing)
{
  if (spacing <= 0 || spacing >= std::min(width, height))
  {
    Fail(ErrorKind::kConfig, "grid_spacing must be positive and below the image size");
  }
}

std::vector<double> AverageRanks(std::span<double const> v)
{
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t         i = 0;
  while (i < order.size())
  {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
    {
      ++j;
    }
    double const r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t)
    {
      ranks[order[t]] = r;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ControlGrid RandomControlGrid(int width, int height, int spacing, int max_magnitude,
                              std::uint64_t seed)
{
  CheckSpacing(width, height, spacing);
  if (max_magnitude < 0)
  {
    Fail(ErrorKind::kConfig, "max_magnitude must be non-negative");
  }
  ControlGrid g;
  g.spacing = spacing;
  g.nodes_x = NodeCount(width, spacing);
  g.nodes_y = NodeCount(height, spacing);
  CounterRng          rng(seed, 0);
  std::uint64_t const span = 2 * static_cast<std::uint64_t>(max_magnitude) + 1;
  for (int i = 0; i < g.nodes_x * g.nodes_y; ++i)
  {
    int const dx = static_cast<int>(rng.NextBelow(span)) - max_magnitude;
    int const dy = static_cast<int>(rng.NextBelow(span)) - max_magnitude;
    g.displacements.push_back({dx, dy});
  }
  return g;
}

ControlGrid ConstantControlGrid(int width, int height, int spacing, Offset displacement)
{
  CheckSpacing(width, height, spacing);
  ControlGrid g;
  g.spacing = spacing;
  g.nodes_x = NodeCount(width, spacing);
  g.nodes_y = NodeCount(height, spacing);
  g.displacements.assign(static_cast<std::size_t>(g.nodes_x * g.nodes_y), displacement);
  return g;
}

DisplacementGrid DenseDisplacement(ControlGrid const &grid, int width, int height)
{
  DisplacementGrid out{width, height, {}};
  out.offsets.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  auto node = [&](int i, int j) -> Offset const & {
    return grid.displacements[static_cast<std::size_t>(j * grid.nodes_x + i)];
  };
  double const s = grid.spacing;
  for (int y = 0; y < height; ++y)
  {
    int const    j  = std::min(y / grid.spacing, grid.nodes_y - 2);
    double const fy = (y - j * s) / s;
    for (int x = 0; x < width; ++x)
    {
      int const    i  = std::min(x / grid.spacing, grid.nodes_x - 2);
      double const fx = (x - i * s) / s;
      auto blend = [&](auto comp) {
        double const top    = (1.0 - fx) * comp(node(i, j)) + fx * comp(node(i + 1, j));
        double const bottom = (1.0 - fx) * comp(node(i, j + 1)) + fx * comp(node(i + 1, j + 1));
        return static_cast<int>(std::floor((1.0 - fy) * top + fy * bottom + 0.5));
      };
      out.offsets.push_back({blend([](Offset const &o) { return o.dx; }),
                             blend([](Offset const &o) { return o.dy; })});
    }
  }
  return out;
}

SynthResult Deform(Image const &image, ControlGrid const &grid, std::uint64_t seed)
{
  int const   w = image.width();
  int const   h = image.height();
  SynthResult r;
  r.seed            = seed;
  r.gt_displacement = DenseDisplacement(grid, w, h);
  std::vector<double> data(image.size());
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      Offset const &d  = r.gt_displacement.at(x, y);
      int const     sx = std::clamp(x + d.dx, 0, w - 1);
      int const     sy = std::clamp(y + d.dy, 0, h - 1);
      data[image.Index(x, y)] = image.at(sx, sy);
    }
  }
  r.deformed = Image(w, h, std::move(data));
  return r;
}

SynthResult SynthDeform(Image const &image, int grid_spacing, int max_magnitude,
                        std::uint64_t seed)
{
  return Deform(image,
                RandomControlGrid(image.width(), image.height(), grid_spacing, max_magnitude,
                                  seed),
                seed);
}

char const *OutcomeName(Outcome o) noexcept
{
  switch (o)
  {
  case Outcome::kBoth:
    return "both_correct";
  case Outcome::kOnlyMl:
    return "only_ml_correct";
  case Outcome::kOnlyMode:
    return "only_mode_correct";
  case Outcome::kNeither:
    return "neither";
  }
  return "unknown";
}

EvalResult Evaluate(TransformDistField const &field, DisplacementGrid const &gt,
                    LabelMap const &source_labels, int threads)
{
  int const w = field.width();
  int const h = field.height();
  if (gt.width != w || gt.height != h || source_labels.width() != w ||
      source_labels.height() != h)
  {
    Fail(ErrorKind::kConfig, "field, ground truth and label map grids differ");
  }

  std::string offenders;
  std::size_t n_offenders = 0;
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      if (field.masked_in(x, y) && field.space().Find(gt.at(x, y)) < 0)
      {
        if (n_offenders < 20)
        {
          offenders += " (" + std::to_string(x) + "," + std::to_string(y) + ")";
        }
        ++n_offenders;
      }
    }
  }
  if (n_offenders > 0)
  {
    Fail(ErrorKind::kConfig, "truth not representable at " + std::to_string(n_offenders) +
                                 " voxel(s):" + offenders + (n_offenders > 20 ? " ..." : ""));
  }

  auto const reports = uncertainty::ComputeFieldReports(field, source_labels, threads);
  EvalResult result;
  for (auto const &rep : reports.reports)
  {
    VoxelOutcome o;
    o.voxel      = rep.voxel;
    o.gt_label   = DisplacedLabel(source_labels, rep.voxel, gt.at(rep.voxel.x, rep.voxel.y));
    o.mode_label = rep.mode_label;
    o.ml_label   = rep.ml_label;
    bool const mode_ok = o.mode_label == o.gt_label;
    bool const ml_ok   = o.ml_label == o.gt_label;
    auto      &c       = result.counts;
    ++c.n_voxels;
    if (mode_ok && ml_ok)
    {
      o.outcome = Outcome::kBoth;
      ++c.both_correct;
    }
    else if (ml_ok)
    {
      o.outcome = Outcome::kOnlyMl;
      ++c.only_ml_correct;
    }
    else if (mode_ok)
    {
      o.outcome = Outcome::kOnlyMode;
      ++c.only_mode_correct;
    }
    else
    {
      o.outcome = Outcome::kNeither;
      ++c.neither;
    }
    result.voxels.push_back(o);
  }
  return result;
}

double SpearmanRho(std::span<double const> a, std::span<double const> b)
{
  if (a.size() != b.size() || a.size() < 2)
  {
    Fail(ErrorKind::kInvalid, "rank correlation needs two equal-length series of length >= 2");
  }
  auto const   ra = AverageRanks(a);
  auto const   rb = AverageRanks(b);
  double const n  = static_cast<double>(a.size());
  double const mean = (n + 1.0) / 2.0;
  double       sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i)
  {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0)
  {
    Fail(ErrorKind::kNumeric, "rank correlation undefined for a constant series");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

McResult SummarizePairs(std::vector<std::pair<double, double>> pairs, std::uint64_t seed)
{
  std::vector<double> ut, ul;
  ut.reserve(pairs.size());
  ul.reserve(pairs.size());
  for (auto const &[t, l] : pairs)
  {
    ut.push_back(t);
    ul.push_back(l);
  }
  McResult r;
  r.n_trials     = pairs.size();
  r.seed         = seed;
  r.spearman_rho = SpearmanRho(ut, ul);
  double const q3_t = uncertainty::Quantile(ut, 0.75);
  double const q1_l = uncertainty::Quantile(ul, 0.25);
  std::size_t  discordant = 0;
  for (auto const &[t, l] : pairs)
  {
    if (t >= q3_t && l <= q1_l)
    {
      ++discordant;
    }
  }
  r.frac_discordant = static_cast<double>(discordant) / static_cast<double>(pairs.size());
  r.trials          = std::move(pairs);
  return r;
}

McResult MonteCarloDiscordance(McConfig const &cfg, int threads)
{
  if (cfg.n_trials < 2)
  {
    Fail(ErrorKind::kConfig, "n_trials must be at least 2");
  }
  if (cfg.k < 2)
  {
    Fail(ErrorKind::kConfig, "K must be at least 2");
  }
  if (cfg.n_labels < 2 || cfg.n_labels > cfg.k)
  {
    Fail(ErrorKind::kConfig, "n_labels must satisfy 2 <= n_labels <= K");
  }
  if (!(cfg.concentration_low > 0.0) || !(cfg.concentration_high >= cfg.concentration_low))
  {
    Fail(ErrorKind::kConfig, "concentration range must be positive and ordered");
  }
  double const log_lo = std::log(cfg.concentration_low);
  double const log_hi = std::log(cfg.concentration_high);

  std::vector<std::pair<double, double>> pairs(cfg.n_trials);
  ParallelFor(cfg.n_trials, threads, [&](std::size_t trial) {
    CounterRng   rng(cfg.seed, trial);
    double const alpha = std::exp(log_lo + rng.NextUniform() * (log_hi - log_lo));

    // Log-domain gamma draws so very small concentrations do not underflow.
    std::vector<double> logg(cfg.k);
    for (auto &lg : logg)
    {
      if (alpha < 1.0)
      {
        lg = std::log(rng.NextGamma(alpha + 1.0)) + std::log(rng.NextOpenUniform()) / alpha;
      }
      else
      {
        lg = std::log(rng.NextGamma(alpha));
      }
    }
    double const        lmax = *std::max_element(logg.begin(), logg.end());
    std::vector<double> probs(cfg.k);
    double              sum = 0.0;
    for (std::size_t i = 0; i < cfg.k; ++i)
    {
      probs[i] = std::exp(logg[i] - lmax);
      sum += probs[i];
    }
    for (auto &p : probs)
    {
      p /= sum;
    }

    std::vector<std::size_t> perm(cfg.k);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = cfg.k - 1; i > 0; --i)
    {
      std::swap(perm[i], perm[rng.NextBelow(i + 1)]);
    }
    std::vector<LabelId> labels(cfg.k);
    for (std::size_t i = 0; i < cfg.k; ++i)
    {
      labels[perm[i]] = i < cfg.n_labels ? static_cast<LabelId>(i)
                                         : static_cast<LabelId>(rng.NextBelow(cfg.n_labels));
    }
    double const u_t = uncertainty::ShannonEntropy(probs);
    double const u_l = uncertainty::ShannonEntropy(uncertainty::Pushforward(probs, labels));
    pairs[trial]     = {u_t, u_l};
  });
  return SummarizePairs(std::move(pairs), cfg.seed);
}

McResult EngineDiscordance(uncertainty::FieldReports const &reports, std::uint64_t seed)
{
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(reports.reports.size());
  for (auto const &r : reports.reports)
  {
    pairs.emplace_back(r.u_t, r.u_l);
  }
  if (pairs.size() < 2)
  {
    Fail(ErrorKind::kNumeric, "engine discordance needs at least two masked voxels");
  }
  return SummarizePairs(std::move(pairs), seed);
}

Phantom TwoLabelPhantom(int width, int height, std::uint64_t seed)
{
  constexpr int    kBlur      = 2;
  constexpr double kAmplitude = 5.0;
  constexpr double kRamp      = 4.0;
  constexpr double kContrast  = 50.0;

  double const cx     = (width - 1) / 2.0;
  double const cy     = (height - 1) / 2.0;
  double const radius = 0.3 * std::min(width, height);

  std::vector<double> noise(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < noise.size(); ++i)
  {
    CounterRng rng(seed, i);
    noise[i] = rng.NextUniform() * 2.0 - 1.0;
  }

  std::vector<double>  data;
  std::vector<LabelId> labels;
  data.reserve(noise.size());
  labels.reserve(noise.size());
  for (int y = 0; y < height; ++y)
  {
    for (int x = 0; x < width; ++x)
    {
      double sum   = 0.0;
      int    count = 0;
      for (int j = -kBlur; j <= kBlur; ++j)
      {
        for (int i = -kBlur; i <= kBlur; ++i)
        {
          int const xx = std::clamp(x + i, 0, width - 1);
          int const yy = std::clamp(y + j, 0, height - 1);
          sum += noise[static_cast<std::size_t>(yy) * width + xx];
          ++count;
        }
      }
      double const texture = kAmplitude * sum / std::sqrt(static_cast<double>(count));
      double const dist    = std::hypot(x - cx, y - cy);
      double const blend   = std::clamp((radius - dist) / kRamp + 0.5, 0.0, 1.0);
      data.push_back(std::round(100.0 + kContrast * blend + texture));
      labels.push_back(dist <= radius ? 1 : 0);
    }
  }
  return {Image(width, height, std::move(data)),
          LabelMap(width, height, std::move(labels), {{0, "background"}, {1, "object"}})};
}

StandardScenario RunStandardScenario(std::uint64_t seed, int threads)
{
  StandardScenario s;
  s.phantom = TwoLabelPhantom(64, 64, seed);
  s.synth   = SynthDeform(s.phantom.image, 16, 2, seed);
  s.space   = DisplacementSpace::Square(2);
  s.dpr.patch_radius         = 1;
  s.dpr.metric               = dpr::Metric::kSsd;
  s.dpr.temperature          = 100.0;
  s.dpr.smoothing_weight     = 0.0;
  s.dpr.smoothing_iterations = 0;
  auto field = dpr::EstimateDist(s.synth.deformed, s.phantom.image, s.space, s.dpr, threads);
  s.field    = dpr::SmoothDist(field, s.dpr, threads);
  s.eval     = Evaluate(s.field, s.synth.gt_displacement, s.phantom.labels, threads);
  return s;
}

}  // namespace regunc::harness
