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

#include "regunc/cpr.hpp"

#include "regunc/error.hpp"
#include "regunc/parallel.hpp"
#include "regunc/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace regunc::cpr {
namespace {

bool ParseDouble(std::string_view s, double *out)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
  {
    s.remove_suffix(1);
  }
  if (s.empty())
  {
    return false;
  }
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(*out);
}

std::vector<std::string_view> SplitCommas(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t                   start = 0;
  for (;;)
  {
    auto const pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos)
    {
      return out;
    }
    start = pos + 1;
  }
}

// Maps a sample counter stream onto a voxel so every voxel has its own
// sequence regardless of which thread evaluates it.
CounterRng VoxelStream(GaussianDisplacementField const &field, GridPoint voxel,
                       std::uint64_t seed)
{
  return CounterRng(seed, field.Index(voxel.x, voxel.y));
}

// Lower Cholesky factor of a PSD 2x2 covariance; tiny negative values from
// round-off are clamped to zero.
struct Chol2
{
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;
};

Chol2 Factor(Cov2 const &c)
{
  Chol2 l;
  l.l11 = std::sqrt(std::max(c.xx, 0.0));
  if (l.l11 > 0.0)
  {
    l.l21 = c.xy / l.l11;
  }
  l.l22 = std::sqrt(std::max(c.yy - l.l21 * l.l21, 0.0));
  return l;
}

void CheckVoxel(GaussianDisplacementField const &field, GridPoint voxel)
{
  if (voxel.x < 0 || voxel.y < 0 || voxel.x >= field.width() || voxel.y >= field.height())
  {
    Fail(ErrorKind::kInvalid, "voxel outside the displacement field grid");
  }
}

LabelDistribution FromCounts(std::map<LabelId, std::size_t> const &counts, std::size_t n)
{
  LabelDistribution ld;
  for (auto const &[label, c] : counts)
  {
    ld.support.push_back(label);
    ld.probs.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  return ld;
}

}  // namespace

LandmarkSet::LandmarkSet(std::vector<Landmark> pairs)
  : pairs_(std::move(pairs))
{
  if (pairs_.empty())
  {
    Fail(ErrorKind::kConfig, "landmark set is empty");
  }
  std::set<std::pair<double, double>> seen;
  for (auto const &p : pairs_)
  {
    if (!seen.emplace(p.target.x, p.target.y).second)
    {
      Fail(ErrorKind::kConfig, "degenerate landmark configuration: duplicate target point");
    }
  }
}

LandmarkSet LoadLandmarksCsv(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    Fail(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::vector<Landmark> pairs;
  std::string           line;
  int                   lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos)
    {
      continue;
    }
    auto const fields = SplitCommas(line);
    double     v[4];
    bool       ok = fields.size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i)
    {
      ok = ParseDouble(fields[i], &v[i]);
    }
    if (!ok)
    {
      if (lineno == 1 && pairs.empty())
      {
        continue;  // header
      }
      Fail(ErrorKind::kConfig, path.string() + " line " + std::to_string(lineno) +
                                   ": expected tx,ty,sx,sy");
    }
    pairs.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return LandmarkSet(std::move(pairs));
}

void Validate(GpConfig const &cfg)
{
  if (!(cfg.kernel_length > 0.0) || !std::isfinite(cfg.kernel_length))
  {
    Fail(ErrorKind::kConfig, "kernel_length must be positive");
  }
  if (!(cfg.kernel_variance > 0.0) || !std::isfinite(cfg.kernel_variance))
  {
    Fail(ErrorKind::kConfig, "kernel_variance must be positive");
  }
  if (!(cfg.noise_variance >= 0.0) || !std::isfinite(cfg.noise_variance))
  {
    Fail(ErrorKind::kConfig, "noise_variance must be non-negative");
  }
}

GaussianDisplacementField::GaussianDisplacementField(int width, int height)
  : width_(width)
  , height_(height)
{
  if (width <= 0 || height <= 0)
  {
    Fail(ErrorKind::kInvalid, "grid dimensions must be positive");
  }
  std::size_t const n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  mean_.assign(n, Point{});
  cov_.assign(n, Cov2{});
}

void GaussianDisplacementField::Set(int x, int y, Point mean, Cov2 cov)
{
  mean_[Index(x, y)] = mean;
  cov_[Index(x, y)]  = cov;
}

GaussianDisplacementField FitGp(LandmarkSet const &landmarks, int width, int height,
                                GpConfig const &cfg, int threads)
{
  Validate(cfg);
  auto const &pairs = landmarks.pairs();
  auto const  n     = static_cast<Eigen::Index>(pairs.size());
  double const inv2l2 = 1.0 / (2.0 * cfg.kernel_length * cfg.kernel_length);
  auto kernel = [&](Point a, Point b) {
    double const dx = a.x - b.x;
    double const dy = a.y - b.y;
    return cfg.kernel_variance * std::exp(-(dx * dx + dy * dy) * inv2l2);
  };

  Eigen::MatrixXd gram(n, n);
  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
    {
      gram(i, j) = kernel(pairs[i].target, pairs[j].target);
    }
    gram(i, i) += cfg.noise_variance;
    rhs(i, 0) = pairs[i].source.x - pairs[i].target.x;
    rhs(i, 1) = pairs[i].source.y - pairs[i].target.y;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
  {
    Fail(ErrorKind::kNumeric, "degenerate landmark configuration");
  }
  // A factorisation can succeed with a pivot so small the solve is garbage.
  double const min_pivot = llt.matrixL().toDenseMatrix().diagonal().minCoeff();
  if (!(min_pivot > 1e-7 * std::sqrt(cfg.kernel_variance)))
  {
    Fail(ErrorKind::kNumeric, "degenerate landmark configuration");
  }
  Eigen::MatrixXd const alpha = llt.solve(rhs);

  GaussianDisplacementField field(width, height);
  ParallelFor(static_cast<std::size_t>(height), threads, [&](std::size_t row) {
    int const       y = static_cast<int>(row);
    Eigen::VectorXd kx(n);
    for (int x = 0; x < width; ++x)
    {
      Point const q{static_cast<double>(x), static_cast<double>(y)};
      for (Eigen::Index i = 0; i < n; ++i)
      {
        kx(i) = kernel(q, pairs[i].target);
      }
      Eigen::VectorXd const v   = llt.matrixL().solve(kx);
      double const          var = std::max(cfg.kernel_variance - v.squaredNorm(), 0.0);
      Point const           mean{kx.dot(alpha.col(0)), kx.dot(alpha.col(1))};
      field.Set(x, y, mean, Cov2{var, 0.0, var});
    }
  });
  return field;
}

double UncertaintyCircle(GaussianDisplacementField const &field, GridPoint voxel)
{
  CheckVoxel(field, voxel);
  Cov2 const &c = field.cov(voxel.x, voxel.y);
  return std::sqrt(std::max(c.xx + c.yy, 0.0) / 2.0);
}

std::vector<Point> SampleDisplacements(GaussianDisplacementField const &field, GridPoint voxel,
                                       std::size_t n, std::uint64_t seed)
{
  CheckVoxel(field, voxel);
  Point const &mu  = field.mean(voxel.x, voxel.y);
  Chol2 const  l   = Factor(field.cov(voxel.x, voxel.y));
  CounterRng   rng = VoxelStream(field, voxel, seed);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    double const z1 = rng.NextNormal();
    double const z2 = rng.NextNormal();
    out.push_back({mu.x + l.l11 * z1, mu.y + l.l21 * z1 + l.l22 * z2});
  }
  return out;
}

SampledDistribution SampleLabelDist(GaussianDisplacementField const &field,
                                    LabelMap const &source_labels, GridPoint voxel,
                                    std::size_t n_samples, std::uint64_t seed)
{
  if (n_samples == 0)
  {
    Fail(ErrorKind::kInvalid, "n_samples must be positive");
  }
  std::map<LabelId, std::size_t> counts;
  SampledDistribution            out;
  for (Point const &d : SampleDisplacements(field, voxel, n_samples, seed))
  {
    int px = static_cast<int>(std::floor(voxel.x + d.x + 0.5));
    int py = static_cast<int>(std::floor(voxel.y + d.y + 0.5));
    if (!source_labels.Contains(px, py))
    {
      ++out.clamped;
      px = std::clamp(px, 0, source_labels.width() - 1);
      py = std::clamp(py, 0, source_labels.height() - 1);
    }
    ++counts[source_labels.at(px, py)];
  }
  out.dist = FromCounts(counts, n_samples);
  return out;
}

double Bilinear(Image const &image, double x, double y)
{
  x = std::clamp(x, 0.0, static_cast<double>(image.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(image.height() - 1));
  int const    x0 = std::min(static_cast<int>(std::floor(x)), image.width() - 1);
  int const    y0 = std::min(static_cast<int>(std::floor(y)), image.height() - 1);
  int const    x1 = std::min(x0 + 1, image.width() - 1);
  int const    y1 = std::min(y0 + 1, image.height() - 1);
  double const fx = x - x0;
  double const fy = y - y0;
  double const top    = (1.0 - fx) * image.at(x0, y0) + fx * image.at(x1, y0);
  double const bottom = (1.0 - fx) * image.at(x0, y1) + fx * image.at(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

SampledDistribution SampleIntensityDist(GaussianDisplacementField const &field,
                                        Image const &source, GridPoint voxel,
                                        std::size_t n_samples, double bin_width,
                                        std::uint64_t seed)
{
  if (n_samples == 0)
  {
    Fail(ErrorKind::kInvalid, "n_samples must be positive");
  }
  if (!(bin_width > 0.0))
  {
    Fail(ErrorKind::kInvalid, "bin_width must be positive");
  }
  std::map<LabelId, std::size_t> counts;
  SampledDistribution            out;
  double const                   xmax = source.width() - 1;
  double const                   ymax = source.height() - 1;
  for (Point const &d : SampleDisplacements(field, voxel, n_samples, seed))
  {
    double const px = voxel.x + d.x;
    double const py = voxel.y + d.y;
    if (px < 0.0 || py < 0.0 || px > xmax || py > ymax)
    {
      ++out.clamped;
    }
    double const v = Bilinear(source, px, py);
    ++counts[static_cast<LabelId>(std::floor(v / bin_width))];
  }
  out.dist = FromCounts(counts, n_samples);
  return out;
}

}  // namespace regunc::cpr
