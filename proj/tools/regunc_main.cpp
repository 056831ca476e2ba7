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

#include "CLI11.hpp"

#include <cstdio>
#include <functional>
#include <string>

namespace {

int Report(regunc_status status, char **out)
{
  char *summary = *out;
  if (status == REGUNC_OK)
  {
    if (summary != nullptr)
    {
      std::printf("%s\n", summary);
    }
  }
  else
  {
    std::fprintf(stderr, "regunc: error: %s\n", regunc_last_error());
  }
  regunc_string_free(summary);
  return static_cast<int>(status);
}

char const *OrNull(std::string const &s)
{
  return s.empty() ? nullptr : s.c_str();
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Registration uncertainty toolkit: discrete and continuous probabilistic "
               "registration, transformation vs label uncertainty"};
  app.require_subcommand(1);
  app.set_version_flag("--version", regunc_version());

  int threads = 1;
  app.add_option("--threads", threads, "Worker cap; results do not depend on it")
      ->check(CLI::PositiveNumber);

  std::function<int()> run;

  // register
  std::string target, source, config, out;
  auto *reg = app.add_subcommand("register", "Estimate per-voxel displacement distributions");
  reg->add_option("--target", target, "Target image (PGM/PNG)")->required();
  reg->add_option("--source", source, "Source image (PGM/PNG)")->required();
  reg->add_option("--config", config, "JSON run configuration")->required();
  reg->add_option("--out", out, "Output TDF1 field")->required();
  reg->callback([&] {
    run = [&] {
      regunc_register_args a{target.c_str(), source.c_str(), config.c_str(), out.c_str(), threads};
      char *summary = nullptr;
      return Report(regunc_cmd_register(&a, &summary), &summary);
    };
  });

  // uncertainty
  std::string field, labels, intensity, out_prefix;
  auto *unc = app.add_subcommand("uncertainty", "Per-voxel U_t / U_l reports and maps");
  unc->add_option("--field", field, "TDF1 field")->required();
  auto *unc_labels = unc->add_option("--labels", labels, "Source label map (PGM/PNG)");
  auto *unc_int    = unc->add_option("--intensity", intensity,
                                     "Source image; binned intensities act as labels");
  unc_labels->excludes(unc_int);
  unc->add_option("--config", config, "Optional JSON configuration (bin_width)");
  unc->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  unc->callback([&] {
    if (labels.empty() && intensity.empty())
    {
      throw CLI::ValidationError("uncertainty", "one of --labels or --intensity is required");
    }
    run = [&] {
      regunc_uncertainty_args a{field.c_str(), OrNull(labels), OrNull(intensity), OrNull(config),
                                out_prefix.c_str(), threads};
      char *summary = nullptr;
      return Report(regunc_cmd_uncertainty(&a, &summary), &summary);
    };
  });

  // render
  std::string map, colormap = "viridis", scale = "auto";
  auto *ren = app.add_subcommand("render", "Colour-map an uncertainty map to PNG");
  ren->add_option("--map", map, "Map JSON header")->required();
  ren->add_option("--colormap", colormap, "viridis | gray")
      ->check(CLI::IsMember({"viridis", "gray", "grayscale"}));
  ren->add_option("--scale", scale, "auto | fixed:MIN,MAX");
  ren->add_option("--out", out, "Output PNG")->required();
  ren->callback([&] {
    run = [&] {
      regunc_render_args a{map.c_str(), colormap.c_str(), scale.c_str(), out.c_str()};
      char *summary = nullptr;
      return Report(regunc_cmd_render(&a, &summary), &summary);
    };
  });

  // cpr
  std::string landmarks;
  auto *cp = app.add_subcommand("cpr", "Landmark Gaussian-process registration and sampling");
  cp->add_option("--landmarks", landmarks, "CSV of tx,ty,sx,sy")->required();
  cp->add_option("--labels", labels, "Source label map; also fixes the grid")->required();
  cp->add_option("--intensity", intensity, "Optional source image for intensity distributions");
  cp->add_option("--config", config, "JSON run configuration")->required();
  cp->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  cp->callback([&] {
    run = [&] {
      regunc_cpr_args a{landmarks.c_str(), labels.c_str(), OrNull(intensity), config.c_str(),
                        out_prefix.c_str(), threads};
      char *summary = nullptr;
      return Report(regunc_cmd_cpr(&a, &summary), &summary);
    };
  });

  // synth
  std::string image;
  auto *syn = app.add_subcommand("synth", "Synthetically deform an image with known truth");
  syn->add_option("--image", image, "Input image")->required();
  syn->add_option("--config", config, "JSON run configuration")->required();
  syn->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  syn->callback([&] {
    run = [&] {
      regunc_synth_args a{image.c_str(), config.c_str(), out_prefix.c_str()};
      char *summary = nullptr;
      return Report(regunc_cmd_synth(&a, &summary), &summary);
    };
  });

  // phantom
  auto *pha = app.add_subcommand("phantom", "Write the seeded two-label test phantom");
  pha->add_option("--config", config, "Optional JSON configuration (seeds.synth, synth size)");
  pha->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  pha->callback([&] {
    run = [&] {
      regunc_phantom_args a{OrNull(config), out_prefix.c_str()};
      char *summary = nullptr;
      return Report(regunc_cmd_phantom(&a, &summary), &summary);
    };
  });

  // eval
  std::string gt;
  auto *ev = app.add_subcommand("eval", "Score L(d_m) and L_m against ground truth");
  ev->add_option("--field", field, "TDF1 field")->required();
  ev->add_option("--gt", gt, "Ground-truth displacement CSV")->required();
  ev->add_option("--labels", labels, "Source label map")->required();
  ev->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  ev->callback([&] {
    run = [&] {
      regunc_eval_args a{field.c_str(), gt.c_str(), labels.c_str(), out_prefix.c_str(), threads};
      char *summary = nullptr;
      return Report(regunc_cmd_eval(&a, &summary), &summary);
    };
  });

  // mc
  std::string mode = "dirichlet";
  auto *mc = app.add_subcommand("mc", "U_t / U_l discordance study");
  mc->add_option("--config", config, "JSON run configuration")->required();
  mc->add_option("--out-prefix", out_prefix, "Output prefix")->required();
  mc->add_option("--mode", mode, "dirichlet | engine")
      ->check(CLI::IsMember({"dirichlet", "engine"}));
  mc->add_option("--field", field, "TDF1 field (engine mode)");
  mc->add_option("--labels", labels, "Source label map (engine mode)");
  mc->callback([&] {
    run = [&] {
      regunc_mc_args a{config.c_str(), out_prefix.c_str(), mode.c_str(), OrNull(field),
                       OrNull(labels), threads};
      char *summary = nullptr;
      return Report(regunc_cmd_mc(&a, &summary), &summary);
    };
  });

  // replay
  std::string manifest;
  auto *rep = app.add_subcommand("replay", "Re-run a command from its manifest");
  rep->add_option("manifest", manifest, "Manifest JSON written by an earlier run")->required();
  rep->callback([&] {
    run = [&] {
      char *summary = nullptr;
      return Report(regunc_cmd_replay(manifest.c_str(), threads, &summary), &summary);
    };
  });

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : REGUNC_ERR_USAGE;
  }
  return run();
}
