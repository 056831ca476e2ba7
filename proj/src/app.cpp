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

#include "regunc/app.hpp"

#include "regunc/error.hpp"
#include "regunc/field_io.hpp"
#include "regunc/image_io.hpp"
#include "regunc/parallel.hpp"
#include "regunc/render.hpp"
#include "regunc/uncertainty.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace regunc::app {
namespace {

using nlohmann::json;

constexpr char const *kVersion = "0.1.0";

// Walks one JSON object, tracking which keys were consumed so that leftovers
// can be reported as unknown.
class Section
{
public:
  Section(json const &obj, std::string path)
    : obj_(obj)
    , path_(std::move(path))
  {
    if (!obj_.is_object())
    {
      Fail(ErrorKind::kConfig, "config: '" + Name() + "' must be an object");
    }
  }

  bool Has(std::string const &key) const
  {
    return obj_.contains(key);
  }

  json const &Required(std::string const &key)
  {
    used_.insert(key);
    if (!obj_.contains(key))
    {
      Fail(ErrorKind::kConfig, "config: missing key '" + Qualified(key) + "'");
    }
    return obj_.at(key);
  }

  template <typename T>
  T Get(std::string const &key)
  {
    json const &v = Required(key);
    try
    {
      if constexpr (std::is_unsigned_v<T>)
      {
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        {
          throw std::invalid_argument("not a non-negative integer");
        }
      }
      else if constexpr (std::is_integral_v<T>)
      {
        if (!v.is_number_integer())
        {
          throw std::invalid_argument("not an integer");
        }
      }
      else if constexpr (std::is_floating_point_v<T>)
      {
        if (!v.is_number())
        {
          throw std::invalid_argument("not a number");
        }
      }
      return v.get<T>();
    }
    catch (std::exception const &)
    {
      Fail(ErrorKind::kConfig, "config: key '" + Qualified(key) + "' has the wrong type");
    }
  }

  template <typename T>
  T GetOr(std::string const &key, T fallback)
  {
    return Has(key) ? Get<T>(key) : fallback;
  }

  std::string Qualified(std::string const &key) const
  {
    return path_.empty() ? key : path_ + "." + key;
  }

  void RejectUnknown() const
  {
    for (auto const &[key, _] : obj_.items())
    {
      if (!used_.count(key))
      {
        Fail(ErrorKind::kConfig, "config: unknown key '" + Qualified(key) + "'");
      }
    }
  }

private:
  std::string Name() const
  {
    return path_.empty() ? "<root>" : path_;
  }

  json const           &obj_;
  std::string           path_;
  std::set<std::string> used_;
};

void Check(bool ok, std::string const &key, std::string const &what)
{
  if (!ok)
  {
    Fail(ErrorKind::kConfig, "config: '" + key + "' " + what);
  }
}

std::string Num(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path WithSuffix(fs::path const &base, std::string const &suffix)
{
  fs::path p = base;
  p += suffix;
  return p;
}

void RequireInput(fs::path const &p, char const *what)
{
  if (p.empty())
  {
    Fail(ErrorKind::kConfig, std::string("missing required path: ") + what);
  }
  if (!fs::exists(p))
  {
    Fail(ErrorKind::kIo, std::string(what) + " not found: " + p.string());
  }
}

void RequireOutputDir(fs::path const &p, char const *what)
{
  if (p.empty())
  {
    Fail(ErrorKind::kConfig, std::string("missing required path: ") + what);
  }
  fs::path dir = p.parent_path();
  if (!dir.empty() && !fs::is_directory(dir))
  {
    Fail(ErrorKind::kIo, std::string("output directory does not exist for ") + what + ": " +
                             dir.string());
  }
}

template <typename T>
T const &Need(std::optional<T> const &v, char const *section)
{
  if (!v)
  {
    Fail(ErrorKind::kConfig, std::string("config: missing section '") + section + "'");
  }
  return *v;
}

void WriteManifest(fs::path const &path, std::string const &command, json args,
                   json const &config, std::vector<fs::path> const &outputs)
{
  nlohmann::ordered_json m;
  m["tool"]    = "regunc";
  m["version"] = kVersion;
  m["command"] = command;
  m["args"]    = std::move(args);
  m["config"]  = config;
  auto outs    = json::array();
  for (auto const &o : outputs)
  {
    outs.push_back(o.string());
  }
  m["outputs"] = outs;
  io::WriteText(path, m.dump(2) + "\n");
}

json ReadConfigOrNull(fs::path const &path)
{
  return path.empty() ? json(nullptr) : LoadConfigJson(path);
}

RunConfig ParseOrDefault(json const &doc)
{
  return doc.is_null() ? RunConfig{} : ParseConfig(doc);
}

class CsvWriter
{
public:
  explicit CsvWriter(std::string header)
  {
    out_ << header << '\n';
  }
  template <typename... Ts>
  void Row(Ts const &...cols)
  {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cols), ...);
    out_ << '\n';
  }
  void Save(fs::path const &path) const
  {
    io::WriteText(path, out_.str());
  }

private:
  std::ostringstream out_;
};

std::string RegisterImpl(RegisterArgs const &a, json const &config)
{
  RunConfig const cfg    = ParseConfig(config);
  dpr::Config const dcfg = Need(cfg.dpr, "dpr");
  int const radius       = Need(cfg.space_radius, "space");
  Image const target     = LoadImage(a.target);
  Image const source     = LoadImage(a.source);
  if (target.width() != source.width() || target.height() != source.height())
  {
    Fail(ErrorKind::kConfig, "target " + std::to_string(target.width()) + "x" +
                                 std::to_string(target.height()) + " and source " +
                                 std::to_string(source.width()) + "x" +
                                 std::to_string(source.height()) + " differ in size");
  }
  auto const space = DisplacementSpace::Square(radius);
  auto field       = dpr::EstimateDist(target, source, space, dcfg, a.threads);
  field            = dpr::SmoothDist(field, dcfg, a.threads);

  fs::path const summary = WithSuffix(a.out, ".json");
  io::SaveTdf(field, a.out);
  io::WriteText(summary, io::TdfHeaderJson(field));
  WriteManifest(WithSuffix(a.out, ".manifest.json"), "register",
                {{"target", a.target.string()},
                 {"source", a.source.string()},
                 {"out", a.out.string()}},
                config, {a.out, summary});
  return "registered " + std::to_string(field.width()) + "x" + std::to_string(field.height()) +
         ", K = " + std::to_string(field.k()) +
         ", masked voxels = " + std::to_string(field.MaskedCount());
}

std::string UncertaintyImpl(UncertaintyArgs const &a, json const &config)
{
  RunConfig const cfg   = ParseOrDefault(config);
  auto const      field = io::LoadTdf(a.field);
  uncertainty::FieldReports reports;
  if (!a.intensity.empty())
  {
    reports = uncertainty::ComputeIntensityReports(field, LoadImage(a.intensity), cfg.bin_width,
                                                   a.threads);
  }
  else
  {
    reports = uncertainty::ComputeFieldReports(field, LoadLabelMap(a.labels), a.threads);
  }

  CsvWriter csv("x,y,u_t_bits,u_l_bits,mode_label,ml_label,agree");
  std::size_t disagree = 0;
  for (auto const &r : reports.reports)
  {
    csv.Row(r.voxel.x, r.voxel.y, Num(r.u_t), Num(r.u_l), r.mode_label, r.ml_label,
            r.agree ? "true" : "false");
    disagree += r.agree ? 0 : 1;
  }
  fs::path const csv_path = WithSuffix(a.out_prefix, "_reports.csv");
  csv.Save(csv_path);
  fs::path const ut = io::SaveMap(reports.u_t, WithSuffix(a.out_prefix, "_ut"), "u_t_bits");
  fs::path const ul = io::SaveMap(reports.u_l, WithSuffix(a.out_prefix, "_ul"), "u_l_bits");

  json args = {{"field", a.field.string()}, {"out_prefix", a.out_prefix.string()}};
  if (!a.intensity.empty())
  {
    args["intensity"] = a.intensity.string();
  }
  else
  {
    args["labels"] = a.labels.string();
  }
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "uncertainty", args, config,
                {csv_path, ut, WithSuffix(a.out_prefix, "_ut.raw"), ul,
                 WithSuffix(a.out_prefix, "_ul.raw")});
  return std::to_string(reports.reports.size()) + " voxel reports, " + std::to_string(disagree) +
         " with L(d_m) != L_m";
}

std::string RenderImpl(RenderArgs const &a)
{
  render::Colormap cmap;
  if (a.colormap == "viridis")
  {
    cmap = render::Colormap::kViridis;
  }
  else if (a.colormap == "gray" || a.colormap == "grayscale")
  {
    cmap = render::Colormap::kGray;
  }
  else
  {
    Fail(ErrorKind::kConfig, "unknown colormap '" + a.colormap + "'");
  }
  render::Scale scale;
  if (a.scale.rfind("fixed:", 0) == 0)
  {
    scale.automatic = false;
    std::string const  range = a.scale.substr(6);
    std::istringstream in(range);
    char               comma = 0;
    if (!(in >> scale.min >> comma >> scale.max) || comma != ',' || !(in >> std::ws).eof())
    {
      Fail(ErrorKind::kConfig, "scale must be 'auto' or 'fixed:MIN,MAX'");
    }
  }
  else if (a.scale != "auto")
  {
    Fail(ErrorKind::kConfig, "scale must be 'auto' or 'fixed:MIN,MAX'");
  }
  auto const img = render::Render(io::LoadMap(a.map), cmap, scale);
  render::SaveRender(img, cmap, a.out);
  WriteManifest(WithSuffix(a.out, ".manifest.json"), "render",
                {{"map", a.map.string()},
                 {"colormap", a.colormap},
                 {"scale", a.scale},
                 {"out", a.out.string()}},
                nullptr, {a.out});
  return "rendered " + std::to_string(img.width) + "x" + std::to_string(img.height) +
         " with range [" + Num(img.lo) + ", " + Num(img.hi) + "]";
}

std::string CprImpl(CprArgs const &a, json const &config)
{
  RunConfig const cfg       = ParseConfig(config);
  auto const     &gp        = Need(cfg.gp, "gp");
  auto const      ccfg      = cfg.cpr.value_or(RunConfig::Cpr{});
  auto const      landmarks = cpr::LoadLandmarksCsv(a.landmarks);
  LabelMap const  labels    = LoadLabelMap(a.labels);
  std::optional<Image> intensity;
  if (!a.intensity.empty())
  {
    intensity = LoadImage(a.intensity);
    if (intensity->width() != labels.width() || intensity->height() != labels.height())
    {
      Fail(ErrorKind::kConfig, "intensity image and label map differ in size");
    }
  }
  int const w     = labels.width();
  int const h     = labels.height();
  auto const field = cpr::FitGp(landmarks, w, h, gp, a.threads);

  std::vector<GridPoint> probes = ccfg.probes;
  if (probes.empty())
  {
    for (int y = 0; y < h; ++y)
    {
      for (int x = 0; x < w; ++x)
      {
        probes.push_back({x, y});
      }
    }
  }
  for (auto const &p : probes)
  {
    if (p.x < 0 || p.y < 0 || p.x >= w || p.y >= h)
    {
      Fail(ErrorKind::kConfig, "config: probe (" + std::to_string(p.x) + ", " +
                                   std::to_string(p.y) + ") lies outside the grid");
    }
  }

  CsvWriter circles("x,y,mean_dx,mean_dy,var_x,var_y,radius,std_x,std_y,iqr_x,iqr_y,cov_frobenius");
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      auto const &m = field.mean(x, y);
      auto const  s = uncertainty::SummarizeGaussian(field.cov(x, y));
      circles.Row(x, y, Num(m.x), Num(m.y), Num(s.variance[0]), Num(s.variance[1]),
                  Num(cpr::UncertaintyCircle(field, {x, y})), Num(s.std_dev[0]),
                  Num(s.std_dev[1]), Num(s.iqr[0]), Num(s.iqr[1]), Num(s.cov_frobenius));
    }
  }

  // Sampling is per-voxel seeded, so the probe loop can run in parallel.
  std::vector<cpr::SampledDistribution> label_dists(probes.size());
  std::vector<cpr::SampledDistribution> intensity_dists(intensity ? probes.size() : 0);
  ParallelFor(probes.size(), a.threads, [&](std::size_t i) {
    label_dists[i] = cpr::SampleLabelDist(field, labels, probes[i], ccfg.n_samples,
                                          cfg.seeds.sample);
    if (intensity)
    {
      intensity_dists[i] = cpr::SampleIntensityDist(field, *intensity, probes[i],
                                                    ccfg.n_samples, cfg.bin_width,
                                                    cfg.seeds.sample);
    }
  });

  auto dist_csv = [&](std::vector<cpr::SampledDistribution> const &dists, char const *what) {
    CsvWriter csv(std::string("x,y,") + what + ",probability,n_samples,clamped");
    for (std::size_t i = 0; i < dists.size(); ++i)
    {
      auto const &d = dists[i];
      for (std::size_t j = 0; j < d.dist.support.size(); ++j)
      {
        csv.Row(probes[i].x, probes[i].y, d.dist.support[j], Num(d.dist.probs[j]),
                ccfg.n_samples, d.clamped);
      }
    }
    return csv;
  };

  fs::path const gdf_path     = WithSuffix(a.out_prefix, ".gdf");
  fs::path const circles_path = WithSuffix(a.out_prefix, "_circles.csv");
  fs::path const labels_path  = WithSuffix(a.out_prefix, "_labeldist.csv");
  io::SaveGdf(field, gdf_path);
  circles.Save(circles_path);
  dist_csv(label_dists, "label").Save(labels_path);
  std::vector<fs::path> outputs{gdf_path, circles_path, labels_path};
  json args = {{"landmarks", a.landmarks.string()},
               {"labels", a.labels.string()},
               {"out_prefix", a.out_prefix.string()}};
  if (intensity)
  {
    fs::path const ipath = WithSuffix(a.out_prefix, "_intensitydist.csv");
    dist_csv(intensity_dists, "bin").Save(ipath);
    outputs.push_back(ipath);
    args["intensity"] = a.intensity.string();
  }
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "cpr", args, config, outputs);
  return "fitted " + std::to_string(landmarks.pairs().size()) + " landmarks on " +
         std::to_string(w) + "x" + std::to_string(h) + ", sampled " +
         std::to_string(probes.size()) + " probe voxels";
}

std::string SynthImpl(SynthArgs const &a, json const &config)
{
  RunConfig const cfg   = ParseConfig(config);
  auto const     &scfg  = Need(cfg.synth, "synth");
  Image const     image = LoadImage(a.image);
  std::string     note;
  if (cfg.space_radius && scfg.max_magnitude > *cfg.space_radius)
  {
    note = "warning: max_magnitude " + std::to_string(scfg.max_magnitude) +
           " exceeds displacement radius " + std::to_string(*cfg.space_radius) +
           "; ground truth will not be representable\n";
    std::cerr << note;
  }
  auto const r = harness::SynthDeform(image, scfg.grid_spacing, scfg.max_magnitude,
                                      cfg.seeds.synth);
  fs::path const deformed = WithSuffix(a.out_prefix, "_deformed.pgm");
  fs::path const gt       = WithSuffix(a.out_prefix, "_gt.csv");
  SavePgm(r.deformed, deformed);
  SaveGtCsv(r.gt_displacement, gt);
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "synth",
                {{"image", a.image.string()}, {"out_prefix", a.out_prefix.string()}}, config,
                {deformed, gt});
  return note + "deformed " + std::to_string(image.width()) + "x" +
         std::to_string(image.height()) + " with seed " + std::to_string(cfg.seeds.synth);
}

std::string PhantomImpl(PhantomArgs const &a, json const &config)
{
  RunConfig const cfg  = ParseOrDefault(config);
  auto const      scfg = cfg.synth.value_or(RunConfig::Synth{});
  auto const      ph   = harness::TwoLabelPhantom(scfg.width, scfg.height, cfg.seeds.synth);
  fs::path const  image  = WithSuffix(a.out_prefix, "_image.pgm");
  fs::path const  labels = WithSuffix(a.out_prefix, "_labels.pgm");
  SavePgm(ph.image, image);
  SaveLabelMap(ph.labels, labels);
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "phantom",
                {{"out_prefix", a.out_prefix.string()}}, config,
                {image, labels, NamesSidecarPath(labels)});
  return "phantom " + std::to_string(scfg.width) + "x" + std::to_string(scfg.height);
}

std::string EvalImpl(EvalArgs const &a)
{
  auto const field  = io::LoadTdf(a.field);
  auto const gt     = LoadGtCsv(a.gt);
  auto const labels = LoadLabelMap(a.labels);
  auto const res    = harness::Evaluate(field, gt, labels, a.threads);
  auto const &c     = res.counts;

  CsvWriter counts("category,count,fraction");
  auto frac = [&](std::size_t v) {
    return Num(c.n_voxels ? static_cast<double>(v) / static_cast<double>(c.n_voxels) : 0.0);
  };
  counts.Row("n_voxels", c.n_voxels, frac(c.n_voxels));
  counts.Row("both_correct", c.both_correct, frac(c.both_correct));
  counts.Row("only_ml_correct", c.only_ml_correct, frac(c.only_ml_correct));
  counts.Row("only_mode_correct", c.only_mode_correct, frac(c.only_mode_correct));
  counts.Row("neither", c.neither, frac(c.neither));

  CsvWriter voxels("x,y,gt_label,mode_label,ml_label,outcome");
  for (auto const &v : res.voxels)
  {
    voxels.Row(v.voxel.x, v.voxel.y, v.gt_label, v.mode_label, v.ml_label,
               harness::OutcomeName(v.outcome));
  }
  fs::path const counts_path = WithSuffix(a.out_prefix, "_counts.csv");
  fs::path const voxels_path = WithSuffix(a.out_prefix, "_voxels.csv");
  counts.Save(counts_path);
  voxels.Save(voxels_path);
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "eval",
                {{"field", a.field.string()},
                 {"gt", a.gt.string()},
                 {"labels", a.labels.string()},
                 {"out_prefix", a.out_prefix.string()}},
                nullptr, {counts_path, voxels_path});
  return "voxels " + std::to_string(c.n_voxels) + ": both " + std::to_string(c.both_correct) +
         ", only L_m " + std::to_string(c.only_ml_correct) + ", only L(d_m) " +
         std::to_string(c.only_mode_correct) + ", neither " + std::to_string(c.neither);
}

std::string McImpl(McArgs const &a, json const &config)
{
  RunConfig const   cfg = ParseConfig(config);
  harness::McResult res;
  json              args = {{"mode", a.mode}, {"out_prefix", a.out_prefix.string()}};
  if (a.mode == "dirichlet")
  {
    auto mc = Need(cfg.mc, "mc");
    mc.seed = cfg.seeds.mc;
    res     = harness::MonteCarloDiscordance(mc, a.threads);
  }
  else if (a.mode == "engine")
  {
    RequireInput(a.field, "field");
    RequireInput(a.labels, "labels");
    auto const field = io::LoadTdf(a.field);
    res = harness::EngineDiscordance(
        uncertainty::ComputeFieldReports(field, LoadLabelMap(a.labels), a.threads),
        cfg.seeds.mc);
    args["field"]  = a.field.string();
    args["labels"] = a.labels.string();
  }
  else
  {
    Fail(ErrorKind::kConfig, "mode must be 'dirichlet' or 'engine'");
  }

  CsvWriter trials("trial,u_t_bits,u_l_bits");
  for (std::size_t i = 0; i < res.trials.size(); ++i)
  {
    trials.Row(i, Num(res.trials[i].first), Num(res.trials[i].second));
  }
  CsvWriter summary("n_trials,spearman_rho,frac_discordant,seed");
  summary.Row(res.n_trials, Num(res.spearman_rho), Num(res.frac_discordant), res.seed);
  fs::path const trials_path  = WithSuffix(a.out_prefix, "_trials.csv");
  fs::path const summary_path = WithSuffix(a.out_prefix, "_summary.csv");
  trials.Save(trials_path);
  summary.Save(summary_path);
  WriteManifest(WithSuffix(a.out_prefix, ".manifest.json"), "mc", args, config,
                {trials_path, summary_path});
  return "trials " + std::to_string(res.n_trials) + ", spearman rho " + Num(res.spearman_rho) +
         ", discordant fraction " + Num(res.frac_discordant);
}

std::string ArgString(json const &args, char const *key)
{
  return args.contains(key) ? args.at(key).get<std::string>() : std::string();
}

}  // namespace

json LoadConfigJson(fs::path const &path)
{
  RequireInput(path, "config");
  std::ifstream in(path);
  try
  {
    return json::parse(in);
  }
  catch (json::exception const &e)
  {
    Fail(ErrorKind::kConfig, "config " + path.string() + " is not valid JSON: " + e.what());
  }
}

RunConfig ParseConfig(json const &doc)
{
  RunConfig cfg;
  Section   root(doc, "");
  if (root.Has("dpr"))
  {
    Section     s(root.Required("dpr"), "dpr");
    dpr::Config d;
    d.patch_radius = s.Get<int>("patch_radius");
    auto metric    = s.Get<std::string>("metric");
    if (metric == "ssd")
    {
      d.metric = dpr::Metric::kSsd;
    }
    else if (metric == "ncc")
    {
      d.metric = dpr::Metric::kNcc;
    }
    else
    {
      Fail(ErrorKind::kConfig, "config: 'dpr.metric' must be \"ssd\" or \"ncc\"");
    }
    d.temperature          = s.Get<double>("temperature");
    d.smoothing_weight     = s.Get<double>("smoothing_weight");
    d.smoothing_iterations = s.Get<int>("smoothing_iterations");
    s.RejectUnknown();
    Check(d.patch_radius >= 0, "dpr.patch_radius", "must be non-negative");
    Check(d.temperature > 0.0 && std::isfinite(d.temperature), "dpr.temperature",
          "must be positive");
    Check(d.smoothing_weight >= 0.0, "dpr.smoothing_weight", "must be non-negative");
    Check(d.smoothing_iterations >= 0, "dpr.smoothing_iterations", "must be non-negative");
    cfg.dpr = d;
  }
  if (root.Has("space"))
  {
    Section s(root.Required("space"), "space");
    cfg.space_radius = s.Get<int>("radius");
    s.RejectUnknown();
    Check(*cfg.space_radius >= 0, "space.radius", "must be non-negative");
  }
  if (root.Has("gp"))
  {
    Section       s(root.Required("gp"), "gp");
    cpr::GpConfig g;
    g.kernel_length   = s.Get<double>("kernel_length");
    g.kernel_variance = s.Get<double>("kernel_variance");
    g.noise_variance  = s.Get<double>("noise_variance");
    s.RejectUnknown();
    Check(g.kernel_length > 0.0, "gp.kernel_length", "must be positive");
    Check(g.kernel_variance > 0.0, "gp.kernel_variance", "must be positive");
    Check(g.noise_variance >= 0.0, "gp.noise_variance", "must be non-negative");
    cfg.gp = g;
  }
  cfg.bin_width = root.GetOr<double>("bin_width", 1.0);
  Check(cfg.bin_width > 0.0, "bin_width", "must be positive");
  if (root.Has("seeds"))
  {
    Section s(root.Required("seeds"), "seeds");
    cfg.seeds.synth  = s.GetOr<std::uint64_t>("synth", cfg.seeds.synth);
    cfg.seeds.sample = s.GetOr<std::uint64_t>("sample", cfg.seeds.sample);
    cfg.seeds.mc     = s.GetOr<std::uint64_t>("mc", cfg.seeds.mc);
    s.RejectUnknown();
  }
  if (root.Has("synth"))
  {
    Section          s(root.Required("synth"), "synth");
    RunConfig::Synth sy;
    sy.grid_spacing  = s.Get<int>("grid_spacing");
    sy.max_magnitude = s.Get<int>("max_magnitude");
    sy.width         = s.GetOr<int>("width", sy.width);
    sy.height        = s.GetOr<int>("height", sy.height);
    s.RejectUnknown();
    Check(sy.grid_spacing > 0, "synth.grid_spacing", "must be positive");
    Check(sy.max_magnitude >= 0, "synth.max_magnitude", "must be non-negative");
    Check(sy.width > 0 && sy.height > 0, "synth.width/height", "must be positive");
    cfg.synth = sy;
  }
  if (root.Has("cpr"))
  {
    Section        s(root.Required("cpr"), "cpr");
    RunConfig::Cpr c;
    c.n_samples = s.Get<std::size_t>("n_samples");
    Check(c.n_samples >= 1, "cpr.n_samples", "must be positive");
    if (s.Has("probes"))
    {
      json const &probes = s.Required("probes");
      Check(probes.is_array(), "cpr.probes", "must be an array of [x, y] pairs");
      for (auto const &p : probes)
      {
        Check(p.is_array() && p.size() == 2 && p[0].is_number_integer() &&
                  p[1].is_number_integer(),
              "cpr.probes", "must be an array of [x, y] integer pairs");
        c.probes.push_back({p[0].get<int>(), p[1].get<int>()});
      }
    }
    s.RejectUnknown();
    cfg.cpr = c;
  }
  if (root.Has("mc"))
  {
    Section           s(root.Required("mc"), "mc");
    harness::McConfig m;
    m.n_trials = s.Get<std::size_t>("n_trials");
    m.k        = s.Get<std::size_t>("K");
    m.n_labels = s.Get<std::size_t>("n_labels");
    json const &range = s.Required("concentration");
    Check(range.is_array() && range.size() == 2 && range[0].is_number() && range[1].is_number(),
          "mc.concentration", "must be [low, high]");
    m.concentration_low  = range[0].get<double>();
    m.concentration_high = range[1].get<double>();
    s.RejectUnknown();
    Check(m.n_trials >= 2, "mc.n_trials", "must be at least 2");
    Check(m.k >= 2, "mc.K", "must be at least 2");
    Check(m.n_labels >= 2 && m.n_labels <= m.k, "mc.n_labels", "must satisfy 2 <= n_labels <= K");
    Check(m.concentration_low > 0.0 && m.concentration_high >= m.concentration_low,
          "mc.concentration", "must satisfy 0 < low <= high");
    cfg.mc = m;
  }
  root.RejectUnknown();
  return cfg;
}

std::string RunRegister(RegisterArgs const &a)
{
  RequireInput(a.target, "target");
  RequireInput(a.source, "source");
  RequireOutputDir(a.out, "out");
  return RegisterImpl(a, LoadConfigJson(a.config));
}

std::string RunUncertainty(UncertaintyArgs const &a)
{
  RequireInput(a.field, "field");
  if (a.intensity.empty())
  {
    RequireInput(a.labels, "labels");
  }
  else
  {
    RequireInput(a.intensity, "intensity");
  }
  RequireOutputDir(a.out_prefix, "out-prefix");
  return UncertaintyImpl(a, ReadConfigOrNull(a.config));
}

std::string RunRender(RenderArgs const &a)
{
  RequireInput(a.map, "map");
  RequireOutputDir(a.out, "out");
  return RenderImpl(a);
}

std::string RunCpr(CprArgs const &a)
{
  RequireInput(a.landmarks, "landmarks");
  RequireInput(a.labels, "labels");
  if (!a.intensity.empty())
  {
    RequireInput(a.intensity, "intensity");
  }
  RequireOutputDir(a.out_prefix, "out-prefix");
  return CprImpl(a, LoadConfigJson(a.config));
}

std::string RunSynth(SynthArgs const &a)
{
  RequireInput(a.image, "image");
  RequireOutputDir(a.out_prefix, "out-prefix");
  return SynthImpl(a, LoadConfigJson(a.config));
}

std::string RunPhantom(PhantomArgs const &a)
{
  RequireOutputDir(a.out_prefix, "out-prefix");
  return PhantomImpl(a, ReadConfigOrNull(a.config));
}

std::string RunEval(EvalArgs const &a)
{
  RequireInput(a.field, "field");
  RequireInput(a.gt, "gt");
  RequireInput(a.labels, "labels");
  RequireOutputDir(a.out_prefix, "out-prefix");
  return EvalImpl(a);
}

std::string RunMc(McArgs const &a)
{
  RequireOutputDir(a.out_prefix, "out-prefix");
  return McImpl(a, LoadConfigJson(a.config));
}

std::string Replay(fs::path const &manifest, int threads)
{
  RequireInput(manifest, "manifest");
  json m;
  try
  {
    std::ifstream in(manifest);
    m = json::parse(in);
    if (m.at("tool").get<std::string>() != "regunc")
    {
      Fail(ErrorKind::kConfig, "not a regunc manifest: " + manifest.string());
    }
  }
  catch (json::exception const &e)
  {
    Fail(ErrorKind::kConfig, "manifest " + manifest.string() + ": " + e.what());
  }
  std::string const cmd    = m.at("command").get<std::string>();
  json const       &args   = m.at("args");
  json const       &config = m.at("config");
  auto              p      = [&](char const *key) { return fs::path(ArgString(args, key)); };

  if (cmd == "register")
  {
    return RegisterImpl({p("target"), p("source"), {}, p("out"), threads}, config);
  }
  if (cmd == "uncertainty")
  {
    return UncertaintyImpl({p("field"), p("labels"), p("intensity"), {}, p("out_prefix"), threads},
                           config);
  }
  if (cmd == "render")
  {
    return RenderImpl({p("map"), ArgString(args, "colormap"), ArgString(args, "scale"), p("out")});
  }
  if (cmd == "cpr")
  {
    return CprImpl({p("landmarks"), p("labels"), p("intensity"), {}, p("out_prefix"), threads},
                   config);
  }
  if (cmd == "synth")
  {
    return SynthImpl({p("image"), {}, p("out_prefix")}, config);
  }
  if (cmd == "phantom")
  {
    return PhantomImpl({{}, p("out_prefix")}, config);
  }
  if (cmd == "eval")
  {
    return EvalImpl({p("field"), p("gt"), p("labels"), p("out_prefix"), threads});
  }
  if (cmd == "mc")
  {
    return McImpl({{}, p("out_prefix"), ArgString(args, "mode"), p("field"), p("labels"), threads},
                  config);
  }
  Fail(ErrorKind::kConfig, "manifest names unknown command '" + cmd + "'");
}

void SaveGtCsv(harness::DisplacementGrid const &gt, fs::path const &path)
{
  CsvWriter csv("x,y,dx,dy");
  for (int y = 0; y < gt.height; ++y)
  {
    for (int x = 0; x < gt.width; ++x)
    {
      csv.Row(x, y, gt.at(x, y).dx, gt.at(x, y).dy);
    }
  }
  csv.Save(path);
}

harness::DisplacementGrid LoadGtCsv(fs::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    Fail(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,y,dx,dy", 0) != 0)
  {
    Fail(ErrorKind::kConfig, path.string() + ": expected header x,y,dx,dy");
  }
  struct Row
  {
    int x, y, dx, dy;
  };
  std::vector<Row> rows;
  int              lineno = 1;
  int              w = 0, h = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (line.empty())
    {
      continue;
    }
    std::istringstream ls(line);
    Row                r{};
    char               c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> r.x >> c1 >> r.y >> c2 >> r.dx >> c3 >> r.dy) || c1 != ',' || c2 != ',' ||
        c3 != ',' || r.x < 0 || r.y < 0)
    {
      Fail(ErrorKind::kConfig, path.string() + ":" + std::to_string(lineno) +
                                   ": expected x,y,dx,dy integers");
    }
    w = std::max(w, r.x + 1);
    h = std::max(h, r.y + 1);
    rows.push_back(r);
  }
  if (rows.empty() || rows.size() != static_cast<std::size_t>(w) * h)
  {
    Fail(ErrorKind::kConfig, path.string() + ": ground truth does not cover a full grid");
  }
  harness::DisplacementGrid gt{w, h, std::vector<Offset>(rows.size())};
  std::vector<std::uint8_t> seen(rows.size(), 0);
  for (auto const &r : rows)
  {
    std::size_t const i = static_cast<std::size_t>(r.y) * w + r.x;
    if (seen[i]++)
    {
      Fail(ErrorKind::kConfig, path.string() + ": duplicate voxel in ground truth");
    }
    gt.offsets[i] = {r.dx, r.dy};
  }
  return gt;
}

}  // namespace regunc::app
