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

#include "regunc/cpr.hpp"
#include "regunc/dpr.hpp"
#include "regunc/harness.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace regunc::app {

namespace fs = std::filesystem;

/// Numeric run state read from a JSON config. Every section is optional at
/// the top level; a subcommand demands the sections it needs. Unknown keys
/// anywhere are rejected.
struct RunConfig
{
  std::optional<dpr::Config> dpr;
  std::optional<int>         space_radius;
  std::optional<cpr::GpConfig> gp;
  double bin_width = 1.0;

  struct Seeds
  {
    std::uint64_t synth  = 42;
    std::uint64_t sample = 7;
    std::uint64_t mc     = 1;
  } seeds;

  struct Synth
  {
    int grid_spacing  = 16;
    int max_magnitude = 2;
    int width         = 64;  // phantom size
    int height        = 64;
  };
  std::optional<Synth> synth;

  struct Cpr
  {
    std::size_t            n_samples = 1000;
    std::vector<GridPoint> probes;  // empty: every voxel
  };
  std::optional<Cpr> cpr;

  std::optional<harness::McConfig> mc;  // seed comes from seeds.mc
};

/// Parses and validates; ErrorKind::kConfig names the offending key.
RunConfig ParseConfig(nlohmann::json const &doc);
nlohmann::json LoadConfigJson(fs::path const &path);

struct RegisterArgs
{
  fs::path target;
  fs::path source;
  fs::path config;
  fs::path out;
  int      threads = 1;
};

struct UncertaintyArgs
{
  fs::path field;
  fs::path labels;     // label map, or
  fs::path intensity;  // source image whose binned intensities act as labels
  fs::path config;     // optional; supplies bin_width
  fs::path out_prefix;
  int      threads = 1;
};

struct RenderArgs
{
  fs::path    map;  // JSON header of a raw map
  std::string colormap = "viridis";  // viridis | gray
  std::string scale    = "auto";     // auto | fixed:MIN,MAX
  fs::path    out;
};

struct CprArgs
{
  fs::path landmarks;
  fs::path labels;
  fs::path intensity;  // optional source image for intensity distributions
  fs::path config;
  fs::path out_prefix;
  int      threads = 1;
};

struct SynthArgs
{
  fs::path image;
  fs::path config;
  fs::path out_prefix;
};

struct PhantomArgs
{
  fs::path config;
  fs::path out_prefix;
};

struct EvalArgs
{
  fs::path field;
  fs::path gt;
  fs::path labels;
  fs::path out_prefix;
  int      threads = 1;
};

struct McArgs
{
  fs::path    config;
  fs::path    out_prefix;
  std::string mode = "dirichlet";  // dirichlet | engine
  fs::path    field;               // engine mode
  fs::path    labels;              // engine mode
  int         threads = 1;
};

/// Each runner writes its outputs plus `<output>.manifest.json`, and
/// returns a short human-readable summary.
std::string RunRegister(RegisterArgs const &args);
std::string RunUncertainty(UncertaintyArgs const &args);
std::string RunRender(RenderArgs const &args);
std::string RunCpr(CprArgs const &args);
std::string RunSynth(SynthArgs const &args);
std::string RunPhantom(PhantomArgs const &args);
std::string RunEval(EvalArgs const &args);
std::string RunMc(McArgs const &args);

/// Re-executes the command recorded in a manifest using the configuration
/// embedded in it. Outputs are byte-identical to the original run.
std::string Replay(fs::path const &manifest, int threads = 1);

/// Ground-truth displacement CSV (x,y,dx,dy), row-major and covering the
/// whole grid.
void                      SaveGtCsv(harness::DisplacementGrid const &gt, fs::path const &path);
harness::DisplacementGrid LoadGtCsv(fs::path const &path);

}  // namespace regunc::app
