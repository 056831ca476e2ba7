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

#include "regunc/uncertainty.hpp"

#include "regunc/dpr.hpp"
#include "regunc/error.hpp"
#include "regunc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regunc::uncertainty {

double ShannonEntropy(std::span<double const> probs)
{
  double h = 0.0;
  for (double p : probs)
  {
    if (p > 0.0)
    {
      h -= p * std::log2(p);
    }
  }
  // -0.0 for a delta reads oddly in reports.
  return h <= 0.0 ? 0.0 : h;
}

LabelDistribution Pushforward(std::span<double const> probs, std::span<LabelId const> labels)
{
  if (probs.size() != labels.size())
  {
    Fail(ErrorKind::kInvalid, "labels_per_offset length must equal K");
  }
  LabelDistribution ld;
  for (std::size_t k = 0; k < probs.size(); ++k)
  {
    auto it = std::find(ld.support.begin(), ld.support.end(), labels[k]);
    if (it == ld.support.end())
    {
      ld.support.push_back(labels[k]);
      ld.probs.push_back(probs[k]);
    }
    else
    {
      ld.probs[static_cast<std::size_t>(it - ld.support.begin())] += probs[k];
    }
  }
  if (ld.support.size() == 1)
  {
    ld.probs[0] = 1.0;
  }
  return ld;
}

LabelId MostLikelyLabel(LabelDistribution const &ld)
{
  if (ld.support.empty() || ld.support.size() != ld.probs.size())
  {
    Fail(ErrorKind::kInvalid, "most likely label of an empty distribution");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ld.probs.size(); ++i)
  {
    if (ld.probs[i] > ld.probs[best])
    {
      best = i;
    }
  }
  return ld.support[best];
}

LabelId LabelOfMode(std::span<double const> probs, std::span<LabelId const> labels)
{
  if (probs.size() != labels.size())
  {
    Fail(ErrorKind::kInvalid, "labels_per_offset length must equal K");
  }
  return labels[dpr::ModeIndex(probs)];
}

std::vector<LabelId> IntensityBins(std::span<double const> intensities, double bin_width)
{
  if (!(bin_width > 0.0))
  {
    Fail(ErrorKind::kInvalid, "bin_width must be positive");
  }
  std::vector<LabelId> bins;
  bins.reserve(intensities.size());
  for (double v : intensities)
  {
    bins.push_back(static_cast<LabelId>(std::floor(v / bin_width)));
  }
  return bins;
}

VoxelReport MakeVoxelReport(std::span<double const> probs, std::span<LabelId const> labels,
                            GridPoint voxel)
{
  VoxelReport r;
  r.voxel      = voxel;
  r.u_t        = ShannonEntropy(probs);
  r.label_dist = Pushforward(probs, labels);
  r.u_l        = ShannonEntropy(r.label_dist);
  r.mode_label = LabelOfMode(probs, labels);
  r.ml_label   = MostLikelyLabel(r.label_dist);
  r.agree      = r.mode_label == r.ml_label;
  return r;
}

bool UncertaintyMap::HasData(int x, int y) const
{
  return !std::isnan(values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                            static_cast<std::size_t>(x)]);
}

namespace {

template <typename LabelAt>
FieldReports Evaluate(TransformDistField const &field, LabelAt &&label_at, int threads)
{
  int const         w = field.width();
  int const         h = field.height();
  std::size_t const n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  double const      nan = std::numeric_limits<double>::quiet_NaN();

  FieldReports out;
  out.u_t = {w, h, std::vector<double>(n, nan)};
  out.u_l = {w, h, std::vector<double>(n, nan)};

  std::vector<VoxelReport> slots(n);
  std::vector<std::uint8_t> have(n, 0);
  ParallelFor(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
    int const            y = static_cast<int>(row);
    std::vector<LabelId> labels(field.k());
    for (int x = 0; x < w; ++x)
    {
      if (!field.masked_in(x, y))
      {
        continue;
      }
      for (std::size_t k = 0; k < field.k(); ++k)
      {
        labels[k] = label_at(GridPoint{x, y}, field.space()[k]);
      }
      std::size_t const idx = field.VoxelIndex(x, y);
      slots[idx]            = MakeVoxelReport(field.probs(x, y), labels, {x, y});
      have[idx]             = 1;
      out.u_t.values[idx]   = slots[idx].u_t;
      out.u_l.values[idx]   = slots[idx].u_l;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
  {
    if (have[i])
    {
      out.reports.push_back(std::move(slots[i]));
    }
  }
  return out;
}

}  // namespace

FieldReports ComputeFieldReports(TransformDistField const &field, LabelMap const &source_labels,
                                 int threads)
{
  if (source_labels.width() != field.width() || source_labels.height() != field.height())
  {
    Fail(ErrorKind::kConfig, "label map does not cover the field grid");
  }
  return Evaluate(
      field,
      [&](GridPoint v, Offset o) { return DisplacedLabel(source_labels, v, o); }, threads);
}

FieldReports ComputeIntensityReports(TransformDistField const &field, Image const &source,
                                     double bin_width, int threads)
{
  if (source.width() != field.width() || source.height() != field.height())
  {
    Fail(ErrorKind::kConfig, "source image does not cover the field grid");
  }
  if (!(bin_width > 0.0))
  {
    Fail(ErrorKind::kConfig, "bin_width must be positive");
  }
  return Evaluate(
      field,
      [&](GridPoint v, Offset o) {
        return static_cast<LabelId>(std::floor(source.at(v.x + o.dx, v.y + o.dy) / bin_width));
      },
      threads);
}

double Quantile(std::vector<double> values, double q)
{
  if (values.empty())
  {
    Fail(ErrorKind::kInvalid, "quantile of empty data");
  }
  std::sort(values.begin(), values.end());
  double const      h  = (static_cast<double>(values.size()) - 1.0) * q;
  auto const        lo = static_cast<std::size_t>(std::floor(h));
  std::size_t const hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CprSummary SummarizeSamples(std::span<cpr::Point const> samples)
{
  if (samples.size() < 2)
  {
    Fail(ErrorKind::kInvalid, "at least two samples are required for a summary");
  }
  double const n  = static_cast<double>(samples.size());
  double       mx = 0.0, my = 0.0;
  for (auto const &s : samples)
  {
    mx += s.x;
    my += s.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  std::vector<double> xs, ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  for (auto const &s : samples)
  {
    sxx += (s.x - mx) * (s.x - mx);
    syy += (s.y - my) * (s.y - my);
    sxy += (s.x - mx) * (s.y - my);
    xs.push_back(s.x);
    ys.push_back(s.y);
  }
  sxx /= n - 1.0;
  syy /= n - 1.0;
  sxy /= n - 1.0;

  CprSummary out;
  out.variance      = {sxx, syy};
  out.std_dev       = {std::sqrt(sxx), std::sqrt(syy)};
  out.iqr           = {Quantile(xs, 0.75) - Quantile(xs, 0.25),
                       Quantile(ys, 0.75) - Quantile(ys, 0.25)};
  out.cov_frobenius = std::sqrt(sxx * sxx + syy * syy + 2.0 * sxy * sxy);
  return out;
}

CprSummary SummarizeGaussian(cpr::Cov2 const &cov)
{
  CprSummary out;
  out.variance      = {std::max(cov.xx, 0.0), std::max(cov.yy, 0.0)};
  out.std_dev       = {std::sqrt(out.variance[0]), std::sqrt(out.variance[1])};
  out.iqr           = {kNormalIqr * out.std_dev[0], kNormalIqr * out.std_dev[1]};
  out.cov_frobenius = std::sqrt(cov.xx * cov.xx + cov.yy * cov.yy + 2.0 * cov.xy * cov.xy);
  return out;
}

}  // namespace regunc::uncertainty
