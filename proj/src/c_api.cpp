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

#include "regunc/regunc.h"

#include "regunc/app.hpp"
#include "regunc/cpr.hpp"
#include "regunc/dpr.hpp"
#include "regunc/error.hpp"
#include "regunc/field_io.hpp"
#include "regunc/harness.hpp"
#include "regunc/image_io.hpp"
#include "regunc/uncertainty.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct regunc_image
{
  regunc::Image value;
};

struct regunc_labels
{
  regunc::LabelMap value;
};

struct regunc_field
{
  regunc::TransformDistField value;
};

struct regunc_gdf
{
  regunc::cpr::GaussianDisplacementField value;
};

namespace {

using namespace regunc;

thread_local std::string g_last_error;

regunc_status StatusOf(ErrorKind kind)
{
  switch (kind)
  {
  case ErrorKind::kInvalid:
  case ErrorKind::kConfig:
    return REGUNC_ERR_USAGE;
  case ErrorKind::kIo:
    return REGUNC_ERR_IO;
  case ErrorKind::kNumeric:
    return REGUNC_ERR_NUMERIC;
  }
  return REGUNC_ERR_INTERNAL;
}

template <typename Fn>
regunc_status Guard(Fn &&fn) noexcept
{
  g_last_error.clear();
  try
  {
    fn();
    return REGUNC_OK;
  }
  catch (Error const &e)
  {
    g_last_error = e.what();
    return StatusOf(e.kind());
  }
  catch (std::bad_alloc const &)
  {
    g_last_error = "out of memory";
    return REGUNC_ERR_INTERNAL;
  }
  catch (std::exception const &e)
  {
    g_last_error = e.what();
    return REGUNC_ERR_INTERNAL;
  }
  catch (...)
  {
    g_last_error = "unknown error";
    return REGUNC_ERR_INTERNAL;
  }
}

template <typename T>
T const &Deref(T const *p, char const *what)
{
  if (p == nullptr)
  {
    Fail(ErrorKind::kInvalid, std::string("null ") + what);
  }
  return *p;
}

void NeedOut(void const *p)
{
  if (p == nullptr)
  {
    Fail(ErrorKind::kInvalid, "null output pointer");
  }
}

std::filesystem::path PathOf(char const *s)
{
  return s == nullptr ? std::filesystem::path() : std::filesystem::path(s);
}

void EmitSummary(std::string const &text, char **summary)
{
  if (summary == nullptr)
  {
    return;
  }
  char *buf = static_cast<char *>(std::malloc(text.size() + 1));
  if (buf == nullptr)
  {
    throw std::bad_alloc();
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  *summary = buf;
}

dpr::Config ToDpr(regunc_dpr_config const &c)
{
  dpr::Config d;
  d.patch_radius         = c.patch_radius;
  d.metric               = c.metric == REGUNC_METRIC_NCC ? dpr::Metric::kNcc : dpr::Metric::kSsd;
  d.temperature          = c.temperature;
  d.smoothing_weight     = c.smoothing_weight;
  d.smoothing_iterations = c.smoothing_iterations;
  if (c.metric != REGUNC_METRIC_SSD && c.metric != REGUNC_METRIC_NCC)
  {
    Fail(ErrorKind::kConfig, "unknown metric");
  }
  return d;
}

std::span<double const> Probs(double const *p, std::size_t n)
{
  if (p == nullptr || n == 0)
  {
    Fail(ErrorKind::kInvalid, "empty probability vector");
  }
  return {p, n};
}

}  // namespace

extern "C" {

const char *regunc_version(void)
{
  return "0.1.0";
}

const char *regunc_last_error(void)
{
  return g_last_error.c_str();
}

void regunc_string_free(char *s)
{
  std::free(s);
}

regunc_status regunc_image_load(const char *path, regunc_image **out)
{
  return Guard([&] {
    NeedOut(out);
    *out = new regunc_image{LoadImage(PathOf(path))};
  });
}

regunc_status regunc_image_create(int width, int height, const double *data, regunc_image **out)
{
  return Guard([&] {
    NeedOut(out);
    if (data == nullptr || width <= 0 || height <= 0)
    {
      Fail(ErrorKind::kInvalid, "image data must be non-null with positive dimensions");
    }
    std::size_t const n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    *out = new regunc_image{Image(width, height, std::vector<double>(data, data + n))};
  });
}

regunc_status regunc_image_save_pgm(const regunc_image *image, const char *path)
{
  return Guard([&] { SavePgm(Deref(image, "image").value, PathOf(path)); });
}

void regunc_image_free(regunc_image *image)
{
  delete image;
}

int regunc_image_width(const regunc_image *image)
{
  return image ? image->value.width() : 0;
}

int regunc_image_height(const regunc_image *image)
{
  return image ? image->value.height() : 0;
}

const double *regunc_image_data(const regunc_image *image)
{
  return image ? image->value.data().data() : nullptr;
}

regunc_status regunc_labels_load(const char *path, regunc_labels **out)
{
  return Guard([&] {
    NeedOut(out);
    *out = new regunc_labels{LoadLabelMap(PathOf(path))};
  });
}

regunc_status regunc_labels_create(int width, int height, const int64_t *labels,
                                   regunc_labels **out)
{
  return Guard([&] {
    NeedOut(out);
    if (labels == nullptr || width <= 0 || height <= 0)
    {
      Fail(ErrorKind::kInvalid, "label data must be non-null with positive dimensions");
    }
    std::size_t const n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    *out = new regunc_labels{LabelMap(width, height, std::vector<LabelId>(labels, labels + n))};
  });
}

void regunc_labels_free(regunc_labels *labels)
{
  delete labels;
}

int regunc_labels_width(const regunc_labels *labels)
{
  return labels ? labels->value.width() : 0;
}

int regunc_labels_height(const regunc_labels *labels)
{
  return labels ? labels->value.height() : 0;
}

regunc_status regunc_displaced_label(const regunc_labels *labels, int x, int y, int dx, int dy,
                                     int64_t *out)
{
  return Guard([&] {
    NeedOut(out);
    auto const &map = Deref(labels, "labels").value;
    if (!map.Contains(x, y))
    {
      Fail(ErrorKind::kInvalid, "voxel outside the label grid");
    }
    *out = DisplacedLabel(map, {x, y}, {dx, dy});
  });
}

regunc_status regunc_normalize(const double *raw, size_t n, double *out)
{
  return Guard([&] {
    NeedOut(out);
    auto const d = Normalize(Probs(raw, n));
    std::copy(d.probs().begin(), d.probs().end(), out);
  });
}

regunc_status regunc_entropy_bits(const double *probs, size_t n, double *out)
{
  return Guard([&] {
    NeedOut(out);
    *out = uncertainty::ShannonEntropy(Probs(probs, n));
  });
}

regunc_status regunc_mode_index(const double *probs, size_t n, size_t *out)
{
  return Guard([&] {
    NeedOut(out);
    *out = dpr::ModeIndex(Probs(probs, n));
  });
}

regunc_status regunc_pushforward(const double *probs, const int64_t *labels, size_t k,
                                 int64_t *support, double *mass, size_t *n_out)
{
  return Guard([&] {
    NeedOut(support);
    NeedOut(mass);
    NeedOut(n_out);
    NeedOut(labels);
    auto const ld = uncertainty::Pushforward(Probs(probs, k), std::span(labels, k));
    std::copy(ld.support.begin(), ld.support.end(), support);
    std::copy(ld.probs.begin(), ld.probs.end(), mass);
    *n_out = ld.support.size();
  });
}

regunc_status regunc_intensity_bins(const double *intensities, size_t n, double bin_width,
                                    int64_t *out)
{
  return Guard([&] {
    NeedOut(out);
    NeedOut(intensities);
    auto const bins = uncertainty::IntensityBins(std::span(intensities, n), bin_width);
    std::copy(bins.begin(), bins.end(), out);
  });
}

regunc_status regunc_voxel_report_compute(const double *probs, const int64_t *labels, size_t k,
                                          regunc_voxel_report *out)
{
  return Guard([&] {
    NeedOut(out);
    NeedOut(labels);
    auto const p = Probs(probs, k);
    auto const r = uncertainty::MakeVoxelReport(p, std::span(labels, k), {0, 0});
    out->u_t_bits   = r.u_t;
    out->u_l_bits   = r.u_l;
    out->mode_label = r.mode_label;
    out->ml_label   = r.ml_label;
    out->agree      = r.agree ? 1 : 0;
    out->mode_index = dpr::ModeIndex(p);
  });
}

regunc_status regunc_local_cost(const regunc_image *target, const regunc_image *source, int x,
                                int y, int dx, int dy, const regunc_dpr_config *cfg, double *out)
{
  return Guard([&] {
    NeedOut(out);
    *out = dpr::LocalCost(Deref(target, "target").value, Deref(source, "source").value, {x, y},
                          {dx, dy}, ToDpr(Deref(cfg, "config")));
  });
}

regunc_status regunc_register(const regunc_image *target, const regunc_image *source,
                              int space_radius, const regunc_dpr_config *cfg, int threads,
                              regunc_field **out)
{
  return Guard([&] {
    NeedOut(out);
    auto const d     = ToDpr(Deref(cfg, "config"));
    auto const space = DisplacementSpace::Square(space_radius);
    auto field = dpr::EstimateDist(Deref(target, "target").value, Deref(source, "source").value,
                                   space, d, threads);
    *out = new regunc_field{dpr::SmoothDist(field, d, threads)};
  });
}

regunc_status regunc_field_load(const char *path, regunc_field **out)
{
  return Guard([&] {
    NeedOut(out);
    *out = new regunc_field{io::LoadTdf(PathOf(path))};
  });
}

regunc_status regunc_field_save(const regunc_field *field, const char *path)
{
  return Guard([&] { io::SaveTdf(Deref(field, "field").value, PathOf(path)); });
}

void regunc_field_free(regunc_field *field)
{
  delete field;
}

int regunc_field_width(const regunc_field *field)
{
  return field ? field->value.width() : 0;
}

int regunc_field_height(const regunc_field *field)
{
  return field ? field->value.height() : 0;
}

size_t regunc_field_k(const regunc_field *field)
{
  return field ? field->value.k() : 0;
}

size_t regunc_field_masked_count(const regunc_field *field)
{
  return field ? field->value.MaskedCount() : 0;
}

regunc_status regunc_field_offset(const regunc_field *field, size_t k, int *dx, int *dy)
{
  return Guard([&] {
    NeedOut(dx);
    NeedOut(dy);
    auto const &f = Deref(field, "field").value;
    if (k >= f.k())
    {
      Fail(ErrorKind::kInvalid, "offset index out of range");
    }
    *dx = f.space()[k].dx;
    *dy = f.space()[k].dy;
  });
}

regunc_status regunc_field_probs(const regunc_field *field, int x, int y, const double **probs)
{
  return Guard([&] {
    NeedOut(probs);
    auto const &f = Deref(field, "field").value;
    if (x < 0 || y < 0 || x >= f.width() || y >= f.height())
    {
      Fail(ErrorKind::kInvalid, "voxel outside the field grid");
    }
    if (!f.masked_in(x, y))
    {
      Fail(ErrorKind::kInvalid, "masked voxel (" + std::to_string(x) + ", " +
                                    std::to_string(y) + ") has no distribution");
    }
    *probs = f.probs(x, y).data();
  });
}

regunc_status regunc_gp_fit(const regunc_landmark *landmarks, size_t n, int width, int height,
                            const regunc_gp_config *cfg, int threads, regunc_gdf **out)
{
  return Guard([&] {
    NeedOut(out);
    if (landmarks == nullptr && n > 0)
    {
      Fail(ErrorKind::kInvalid, "null landmarks");
    }
    std::vector<cpr::Landmark> pairs;
    for (std::size_t i = 0; i < n; ++i)
    {
      pairs.push_back({{landmarks[i].tx, landmarks[i].ty}, {landmarks[i].sx, landmarks[i].sy}});
    }
    auto const &c = Deref(cfg, "config");
    *out = new regunc_gdf{cpr::FitGp(cpr::LandmarkSet(std::move(pairs)), width, height,
                                     {c.kernel_length, c.kernel_variance, c.noise_variance},
                                     threads)};
  });
}

regunc_status regunc_gdf_load(const char *path, regunc_gdf **out)
{
  return Guard([&] {
    NeedOut(out);
    *out = new regunc_gdf{io::LoadGdf(PathOf(path))};
  });
}

regunc_status regunc_gdf_save(const regunc_gdf *field, const char *path)
{
  return Guard([&] { io::SaveGdf(Deref(field, "field").value, PathOf(path)); });
}

void regunc_gdf_free(regunc_gdf *field)
{
  delete field;
}

regunc_status regunc_gdf_voxel(const regunc_gdf *field, int x, int y, double *mean, double *cov)
{
  return Guard([&] {
    NeedOut(mean);
    NeedOut(cov);
    auto const &f = Deref(field, "field").value;
    if (x < 0 || y < 0 || x >= f.width() || y >= f.height())
    {
      Fail(ErrorKind::kInvalid, "voxel outside the field grid");
    }
    mean[0] = f.mean(x, y).x;
    mean[1] = f.mean(x, y).y;
    cov[0]  = f.cov(x, y).xx;
    cov[1]  = f.cov(x, y).xy;
    cov[2]  = f.cov(x, y).yy;
  });
}

regunc_status regunc_uncertainty_circle(const regunc_gdf *field, int x, int y, double *radius)
{
  return Guard([&] {
    NeedOut(radius);
    *radius = cpr::UncertaintyCircle(Deref(field, "field").value, {x, y});
  });
}

regunc_status regunc_sample_label_dist(const regunc_gdf *field, const regunc_labels *labels,
                                       int x, int y, size_t n_samples, uint64_t seed,
                                       int64_t *support, double *probs, size_t capacity,
                                       size_t *n_out, size_t *clamped)
{
  return Guard([&] {
    NeedOut(support);
    NeedOut(probs);
    NeedOut(n_out);
    auto const r = cpr::SampleLabelDist(Deref(field, "field").value,
                                        Deref(labels, "labels").value, {x, y}, n_samples, seed);
    *n_out = r.dist.support.size();
    if (clamped != nullptr)
    {
      *clamped = r.clamped;
    }
    if (r.dist.support.size() > capacity)
    {
      Fail(ErrorKind::kInvalid, "output capacity too small for " +
                                    std::to_string(r.dist.support.size()) + " labels");
    }
    std::copy(r.dist.support.begin(), r.dist.support.end(), support);
    std::copy(r.dist.probs.begin(), r.dist.probs.end(), probs);
  });
}

regunc_status regunc_standard_scenario(uint64_t seed, int threads, regunc_eval_counts *out)
{
  return Guard([&] {
    NeedOut(out);
    auto const s = harness::RunStandardScenario(seed, threads);
    auto const &c = s.eval.counts;
    *out = {c.n_voxels, c.both_correct, c.only_ml_correct, c.only_mode_correct, c.neither};
  });
}

regunc_status regunc_montecarlo(const regunc_mc_config *cfg, int threads, regunc_mc_result *out)
{
  return Guard([&] {
    NeedOut(out);
    auto const       &c = Deref(cfg, "config");
    harness::McConfig m{c.n_trials, c.k, c.n_labels, c.concentration_low, c.concentration_high,
                        c.seed};
    auto const r = harness::MonteCarloDiscordance(m, threads);
    *out         = {r.n_trials, r.spearman_rho, r.frac_discordant, r.seed};
  });
}

regunc_status regunc_cmd_register(const regunc_register_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunRegister({PathOf(a.target), PathOf(a.source), PathOf(a.config),
                                  PathOf(a.out), a.threads}),
                summary);
  });
}

regunc_status regunc_cmd_uncertainty(const regunc_uncertainty_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunUncertainty({PathOf(a.field), PathOf(a.labels), PathOf(a.intensity),
                                     PathOf(a.config), PathOf(a.out_prefix), a.threads}),
                summary);
  });
}

regunc_status regunc_cmd_render(const regunc_render_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunRender({PathOf(a.map), a.colormap ? a.colormap : "viridis",
                                a.scale ? a.scale : "auto", PathOf(a.out)}),
                summary);
  });
}

regunc_status regunc_cmd_cpr(const regunc_cpr_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunCpr({PathOf(a.landmarks), PathOf(a.labels), PathOf(a.intensity),
                             PathOf(a.config), PathOf(a.out_prefix), a.threads}),
                summary);
  });
}

regunc_status regunc_cmd_synth(const regunc_synth_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunSynth({PathOf(a.image), PathOf(a.config), PathOf(a.out_prefix)}),
                summary);
  });
}

regunc_status regunc_cmd_phantom(const regunc_phantom_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunPhantom({PathOf(a.config), PathOf(a.out_prefix)}), summary);
  });
}

regunc_status regunc_cmd_eval(const regunc_eval_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunEval({PathOf(a.field), PathOf(a.gt), PathOf(a.labels),
                              PathOf(a.out_prefix), a.threads}),
                summary);
  });
}

regunc_status regunc_cmd_mc(const regunc_mc_args *args, char **summary)
{
  return Guard([&] {
    auto const &a = Deref(args, "args");
    EmitSummary(app::RunMc({PathOf(a.config), PathOf(a.out_prefix),
                            a.mode ? a.mode : "dirichlet", PathOf(a.field), PathOf(a.labels),
                            a.threads}),
                summary);
  });
}

regunc_status regunc_cmd_replay(const char *manifest, int threads, char **summary)
{
  return Guard([&] { EmitSummary(app::Replay(PathOf(manifest), threads), summary); });
}

}  // extern "C"
