/*
 *
 *   Copyright 2026 The regunc Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 *
 */

/*
 * regunc C API.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function. Functions return a regunc_status; on failure a
 * message describing the problem is available from regunc_last_error() on the
 * calling thread until the next API call on that thread. Status values are
 * stable and double as process exit codes for the command-line tool.
 *
 * Grids are row-major with the origin at the top-left; a displacement
 * (dx, dy) moves voxel (x, y) to (x + dx, y + dy). Offset indices are
 * zero-based.
 */
#ifndef REGUNC_REGUNC_H
#define REGUNC_REGUNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(REGUNC_BUILDING_LIBRARY)
#define REGUNC_API __attribute__((visibility("default")))
#else
#define REGUNC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum regunc_status
{
  REGUNC_OK           = 0,
  REGUNC_ERR_INTERNAL = 1,
  REGUNC_ERR_USAGE    = 2, /* bad argument, configuration or input content */
  REGUNC_ERR_IO       = 3,
  REGUNC_ERR_NUMERIC  = 4
} regunc_status;

REGUNC_API const char *regunc_version(void);
REGUNC_API const char *regunc_last_error(void);
REGUNC_API void        regunc_string_free(char *s);

/* ---- images and label maps ------------------------------------------- */

typedef struct regunc_image  regunc_image;
typedef struct regunc_labels regunc_labels;

REGUNC_API regunc_status regunc_image_load(const char *path, regunc_image **out);
REGUNC_API regunc_status regunc_image_create(int width, int height, const double *data,
                                             regunc_image **out);
REGUNC_API regunc_status regunc_image_save_pgm(const regunc_image *image, const char *path);
REGUNC_API void          regunc_image_free(regunc_image *image);
REGUNC_API int           regunc_image_width(const regunc_image *image);
REGUNC_API int           regunc_image_height(const regunc_image *image);
/* Borrowed pointer to width*height intensities, valid while the handle lives. */
REGUNC_API const double *regunc_image_data(const regunc_image *image);

REGUNC_API regunc_status regunc_labels_load(const char *path, regunc_labels **out);
REGUNC_API regunc_status regunc_labels_create(int width, int height, const int64_t *labels,
                                              regunc_labels **out);
REGUNC_API void          regunc_labels_free(regunc_labels *labels);
REGUNC_API int           regunc_labels_width(const regunc_labels *labels);
REGUNC_API int           regunc_labels_height(const regunc_labels *labels);
REGUNC_API regunc_status regunc_displaced_label(const regunc_labels *labels, int x, int y, int dx,
                                                int dy, int64_t *out);

/* ---- distributions and uncertainty ----------------------------------- */

typedef struct regunc_voxel_report
{
  double  u_t_bits;
  double  u_l_bits;
  int64_t mode_label; /* L(d_m) */
  int64_t ml_label;   /* L_m */
  int     agree;
  size_t  mode_index;
} regunc_voxel_report;

/* out receives n probabilities raw / sum(raw). */
REGUNC_API regunc_status regunc_normalize(const double *raw, size_t n, double *out);
REGUNC_API regunc_status regunc_entropy_bits(const double *probs, size_t n, double *out);
REGUNC_API regunc_status regunc_mode_index(const double *probs, size_t n, size_t *out);
/* support/mass must hold k entries; *n_out receives the support size. */
REGUNC_API regunc_status regunc_pushforward(const double *probs, const int64_t *labels, size_t k,
                                            int64_t *support, double *mass, size_t *n_out);
REGUNC_API regunc_status regunc_intensity_bins(const double *intensities, size_t n,
                                               double bin_width, int64_t *out);
REGUNC_API regunc_status regunc_voxel_report_compute(const double *probs, const int64_t *labels,
                                                     size_t k, regunc_voxel_report *out);

/* ---- discrete registration ------------------------------------------- */

typedef enum regunc_metric
{
  REGUNC_METRIC_SSD = 0,
  REGUNC_METRIC_NCC = 1
} regunc_metric;

typedef struct regunc_dpr_config
{
  int           patch_radius;
  regunc_metric metric;
  double        temperature;
  double        smoothing_weight;
  int           smoothing_iterations;
} regunc_dpr_config;

typedef struct regunc_field regunc_field;

REGUNC_API regunc_status regunc_local_cost(const regunc_image *target, const regunc_image *source,
                                           int x, int y, int dx, int dy,
                                           const regunc_dpr_config *cfg, double *out);
/* Square displacement space of the given radius, estimation then smoothing. */
REGUNC_API regunc_status regunc_register(const regunc_image *target, const regunc_image *source,
                                         int space_radius, const regunc_dpr_config *cfg,
                                         int threads, regunc_field **out);
REGUNC_API regunc_status regunc_field_load(const char *path, regunc_field **out);
REGUNC_API regunc_status regunc_field_save(const regunc_field *field, const char *path);
REGUNC_API void          regunc_field_free(regunc_field *field);
REGUNC_API int           regunc_field_width(const regunc_field *field);
REGUNC_API int           regunc_field_height(const regunc_field *field);
REGUNC_API size_t        regunc_field_k(const regunc_field *field);
REGUNC_API size_t        regunc_field_masked_count(const regunc_field *field);
REGUNC_API regunc_status regunc_field_offset(const regunc_field *field, size_t k, int *dx, int *dy);
/* Borrowed pointer to K probabilities; REGUNC_ERR_USAGE for masked-out voxels. */
REGUNC_API regunc_status regunc_field_probs(const regunc_field *field, int x, int y,
                                            const double **probs);

/* ---- continuous registration ----------------------------------------- */

typedef struct regunc_gp_config
{
  double kernel_length;
  double kernel_variance;
  double noise_variance;
} regunc_gp_config;

typedef struct regunc_landmark
{
  double tx, ty; /* target point */
  double sx, sy; /* source point */
} regunc_landmark;

typedef struct regunc_gdf regunc_gdf;

REGUNC_API regunc_status regunc_gp_fit(const regunc_landmark *landmarks, size_t n, int width,
                                       int height, const regunc_gp_config *cfg, int threads,
                                       regunc_gdf **out);
REGUNC_API regunc_status regunc_gdf_load(const char *path, regunc_gdf **out);
REGUNC_API regunc_status regunc_gdf_save(const regunc_gdf *field, const char *path);
REGUNC_API void          regunc_gdf_free(regunc_gdf *field);
/* mean[2] = (dx, dy); cov[3] = (cxx, cxy, cyy). */
REGUNC_API regunc_status regunc_gdf_voxel(const regunc_gdf *field, int x, int y, double *mean,
                                          double *cov);
REGUNC_API regunc_status regunc_uncertainty_circle(const regunc_gdf *field, int x, int y,
                                                   double *radius);
/* support/probs hold `capacity` entries; *n_out receives the support size. */
REGUNC_API regunc_status regunc_sample_label_dist(const regunc_gdf *field,
                                                  const regunc_labels *labels, int x, int y,
                                                  size_t n_samples, uint64_t seed,
                                                  int64_t *support, double *probs,
                                                  size_t capacity, size_t *n_out,
                                                  size_t *clamped);

/* ---- experiments ------------------------------------------------------ */

typedef struct regunc_eval_counts
{
  size_t n_voxels;
  size_t both_correct;
  size_t only_ml_correct;
  size_t only_mode_correct;
  size_t neither;
} regunc_eval_counts;

typedef struct regunc_mc_config
{
  size_t   n_trials;
  size_t   k;
  size_t   n_labels;
  double   concentration_low;
  double   concentration_high;
  uint64_t seed;
} regunc_mc_config;

typedef struct regunc_mc_result
{
  size_t   n_trials;
  double   spearman_rho;
  double   frac_discordant;
  uint64_t seed;
} regunc_mc_result;

/* Synthetic-deformation experiment on the seeded 64x64 two-label phantom. */
REGUNC_API regunc_status regunc_standard_scenario(uint64_t seed, int threads,
                                                  regunc_eval_counts *out);
REGUNC_API regunc_status regunc_montecarlo(const regunc_mc_config *cfg, int threads,
                                           regunc_mc_result *out);

/* ---- file-to-file commands -------------------------------------------- */
/*
 * Each command validates its paths before work starts, writes its outputs
 * plus a <output>.manifest.json for exact replay, and optionally returns a
 * one-line summary (free with regunc_string_free). Unused optional paths
 * may be NULL or "".
 */

typedef struct regunc_register_args
{
  const char *target;
  const char *source;
  const char *config;
  const char *out;
  int         threads;
} regunc_register_args;

typedef struct regunc_uncertainty_args
{
  const char *field;
  const char *labels;
  const char *intensity; /* optional: binned intensities act as labels */
  const char *config;    /* optional: bin_width */
  const char *out_prefix;
  int         threads;
} regunc_uncertainty_args;

typedef struct regunc_render_args
{
  const char *map;
  const char *colormap; /* "viridis" | "gray" */
  const char *scale;    /* "auto" | "fixed:MIN,MAX" */
  const char *out;
} regunc_render_args;

typedef struct regunc_cpr_args
{
  const char *landmarks;
  const char *labels;
  const char *intensity; /* optional */
  const char *config;
  const char *out_prefix;
  int         threads;
} regunc_cpr_args;

typedef struct regunc_synth_args
{
  const char *image;
  const char *config;
  const char *out_prefix;
} regunc_synth_args;

typedef struct regunc_phantom_args
{
  const char *config; /* optional */
  const char *out_prefix;
} regunc_phantom_args;

typedef struct regunc_eval_args
{
  const char *field;
  const char *gt;
  const char *labels;
  const char *out_prefix;
  int         threads;
} regunc_eval_args;

typedef struct regunc_mc_args
{
  const char *config;
  const char *out_prefix;
  const char *mode;   /* "dirichlet" | "engine" */
  const char *field;  /* engine mode */
  const char *labels; /* engine mode */
  int         threads;
} regunc_mc_args;

REGUNC_API regunc_status regunc_cmd_register(const regunc_register_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_uncertainty(const regunc_uncertainty_args *args,
                                                char **summary);
REGUNC_API regunc_status regunc_cmd_render(const regunc_render_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_cpr(const regunc_cpr_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_synth(const regunc_synth_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_phantom(const regunc_phantom_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_eval(const regunc_eval_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_mc(const regunc_mc_args *args, char **summary);
REGUNC_API regunc_status regunc_cmd_replay(const char *manifest, int threads, char **summary);

#ifdef __cplusplus
}
#endif

#endif /* REGUNC_REGUNC_H */
