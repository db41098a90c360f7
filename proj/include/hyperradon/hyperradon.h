/*
 * hyperradon — exact discrete Radon transforms of voxel data via closed-form
 * cube-plane intersection areas, with trace-transform features, normalized
 * Radon CDT profiles, 1-NN experiment tooling, and sliced-Wasserstein
 * fitting of cube mixtures.
 *
 * C API: every function returns hr_status; outputs go through pointers.
 * Objects are opaque handles released with their matching _free function.
 * On failure, hr_last_error() returns a thread-local message.
 */
#ifndef HYPERRADON_H
#define HYPERRADON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hr_status {
    HR_OK = 0,
    HR_ERR_INVALID_ARGUMENT = 1,
    HR_ERR_DIMENSION_MISMATCH = 2,
    HR_ERR_IO = 3,
    HR_ERR_PARSE = 4,
    HR_ERR_DEGENERATE = 5,
    HR_ERR_INTERNAL = 6
} hr_status;

const char* hr_version(void);
const char* hr_last_error(void);
/* Caps worker threads; 0 restores the hardware default. */
void hr_set_num_threads(int n);

/* Opaque handles; release with the matching _free function. */
typedef struct hr_image hr_image;
typedef struct hr_sinogram hr_sinogram;
typedef struct hr_directions hr_directions;
typedef struct hr_mesh hr_mesh;
typedef struct hr_experiment hr_experiment;
typedef struct hr_points hr_points;
typedef struct hr_mixture hr_mixture;
typedef struct hr_measure hr_measure;
/* ---- closed-form geometry -------------------------------------------- */

/* Section area of the box (-a, a] with the hyperplane <x,theta> = t. */
hr_status hr_cube_plane_area(int d, const double* a, const double* theta, double t,
                             double* out);
/* Dimension-specialized evaluators (d = 2 resp. 3). */
hr_status hr_cube_plane_area_2d(const double* a, const double* theta, double t, double* out);
hr_status hr_cube_plane_area_3d(const double* a, const double* theta, double t, double* out);
/* Box volume inside the slab t1 <= <x,theta> <= t2. */
hr_status hr_cube_slab_volume(int d, const double* a, const double* theta, double t1,
                              double t2, double* out);
/* Slab average (1/(2 eps)) V(t-eps, t+eps). */
hr_status hr_cube_plane_area_regularized(int d, const double* a, const double* theta,
                                         double t, double eps, double* out);
/* k-fold (2 pi)^{-1/2}-normalized convolution of interval indicators. */
hr_status hr_indicator_convolution(int k, const double* b, double t, double* out);

/* ---- voxel images and the discrete Radon transform -------------------- */

hr_status hr_image_create(int d, const int32_t* extents, double voxel_size,
                          const double* values /* NULL for zeros */, hr_image** out);
void hr_image_free(hr_image* image);
int hr_image_dim(const hr_image* image);
hr_status hr_image_extents(const hr_image* image, int32_t* out);
double hr_image_voxel_size(const hr_image* image);
size_t hr_image_value_count(const hr_image* image);
const double* hr_image_values(const hr_image* image);

hr_status hr_image_load_rvox(const char* path, hr_image** out);
hr_status hr_image_save_rvox(const hr_image* image, const char* path);

/* Membership rasterizer on the N^3 unit-box grid. params_json:
 * {"kind":"solid_box|solid_sphere|hemisphere|shell", "center":[...],
 *  "half_widths":[...], "radius":r, "thickness":h, "axis":[...]} */
hr_status hr_image_synth(const char* params_json, int n, hr_image** out);
/* Named template shapes: "box", "ball", "lshape". */
hr_status hr_image_synth_template(const char* name, int n, hr_image** out);

/* Centroid/PCA/rescale/mass canonicalization chain. */
hr_status hr_image_preprocess(const hr_image* image, hr_image** out,
                              int* rotation_skipped /* nullable */);

/* Random invertible map A = R Shear Scale plus shift; matrix is d*d
 * row-major. ranges_json (nullable) overrides
 * {"shear_max":..,"scale_min":..,"scale_max":..,"shift_max":..,"rotate":..}. */
hr_status hr_affine_random(int d, uint64_t seed, const char* ranges_json, double* matrix,
                           double* shift);
hr_status hr_image_apply_affine(const hr_image* image, const double* matrix,
                                const double* shift, hr_image** out);

/* Exact transform at one offset; eps > 0 selects the slab-regularized
 * variant. */
hr_status hr_discrete_radon(const hr_image* image, const double* theta, double t,
                            double eps, double* out);
/* Center-projection binning baseline; out has one value per radius. */
hr_status hr_binned_radon(const hr_image* image, const double* theta, const double* radii,
                          int num_radii, double bin_halfwidth, double* out);
/* Default grid: count points over [-r, r], r = s sqrt(d) max(N)/2. */
hr_status hr_default_radius_grid(const hr_image* image, int count, double* out);

hr_status hr_sinogram_compute(const hr_image* image, const hr_directions* directions,
                              const double* radii, int num_radii,
                              double eps /* <= 0 for the exact transform */,
                              hr_sinogram** out);
void hr_sinogram_free(hr_sinogram* sinogram);
int hr_sinogram_num_directions(const hr_sinogram* sinogram);
int hr_sinogram_num_radii(const hr_sinogram* sinogram);
const double* hr_sinogram_values(const hr_sinogram* sinogram); /* row-major */
hr_status hr_sinogram_radii(const hr_sinogram* sinogram, double* out);
hr_status hr_sinogram_save_csv(const hr_sinogram* sinogram, const char* path,
                               const char* comment /* nullable */);

/* ---- direction sets ---------------------------------------------------- */

/* spec: "circle:n" | "grid:n1,n2" | "fibonacci:n" | "sobol:n". */
hr_status hr_directions_create(const char* spec, hr_directions** out);
hr_status hr_directions_from_array(int d, int n, const double* data, hr_directions** out);
void hr_directions_free(hr_directions* directions);
int hr_directions_count(const hr_directions* directions);
int hr_directions_dim(const hr_directions* directions);
hr_status hr_directions_get(const hr_directions* directions, int index, double* out);

/* ---- Monte Carlo comparison ------------------------------------------- */

hr_status hr_mc_cube_plane_area(int d, const double* a, const double* theta, double t,
                                double eps, uint64_t num_samples, uint64_t seed,
                                double* estimate, double* std_error);

/* Error-vs-N study on the unit cube. out_rows (nullable) receives
 * num_counts x 5 values: N, mean_abs_diff, norm_mean_abs_diff,
 * mean_time_mc_sec, time_exact_sec. csv_path (nullable) writes the report. */
hr_status hr_mc_compare(const hr_directions* directions, const double* radii, int num_radii,
                        double eps, const uint64_t* sample_counts, int num_counts,
                        int repeats, uint64_t seed, const char* csv_path,
                        const char* comment, double* out_rows);

/* ---- meshes ------------------------------------------------------------ */

hr_status hr_mesh_parse_off(const char* text, hr_mesh** out);
hr_status hr_mesh_load_off(const char* path, hr_mesh** out);
void hr_mesh_free(hr_mesh* mesh);
hr_status hr_mesh_counts(const hr_mesh* mesh, int64_t* num_vertices, int64_t* num_faces);
hr_status hr_mesh_voxelize(const hr_mesh* mesh, int n, int fill, hr_image** out);

/* ---- trace-transform features ------------------------------------------ */

#define HR_NUM_TRACE_FEATURES 51

/* Full pipeline: Radon tensor on the (n1 x n2) spherical grid and the given
 * radii, then the 51 tabled extractors. eps <= 0 selects the exact
 * transform. */
hr_status hr_trace_features(const hr_image* image, const double* radii, int num_radii,
                            int n1, int n2, double eps,
                            double out[HR_NUM_TRACE_FEATURES]);
/* Extractors on a raw (t, theta1, theta2) tensor, theta2 fastest. */
hr_status hr_trace_features_tensor(const double* values, int d1, int d2, int d3,
                                   double out[HR_NUM_TRACE_FEATURES]);
hr_status hr_save_features_csv(const int32_t* sample_ids, const double* features,
                               int num_samples, int num_features, const char* path,
                               const char* comment);

/* ---- normalized Radon CDT ---------------------------------------------- */

/* Standardized quantile profile of one sinogram row on num_quantiles
 * midpoints of (0,1). */
hr_status hr_sinogram_nrcdt(const hr_sinogram* sinogram, int direction_index,
                            int num_quantiles, double* out);
/* Pointwise supremum over directions; degenerate rows are skipped. */
hr_status hr_sinogram_max_nrcdt(const hr_sinogram* sinogram, int num_quantiles, double* out,
                                int* skipped_directions /* nullable */);
hr_status hr_save_profile_csv(const double* values, int num_quantiles, const char* path,
                              const char* comment);

/* ---- 1-NN experiments --------------------------------------------------- */

/* norm: 0 = L1, 1 = L2, 2 = Linf. features is num_samples x feature_dim. */
hr_status hr_knn_experiment(int num_samples, int feature_dim, const double* features,
                            const int32_t* labels, int train_per_class, int repeats,
                            int norm, uint64_t seed, hr_experiment** out);
void hr_experiment_free(hr_experiment* experiment);
double hr_experiment_mean_accuracy(const hr_experiment* experiment);
double hr_experiment_std_accuracy(const hr_experiment* experiment);
int hr_experiment_num_repeats(const hr_experiment* experiment);
hr_status hr_experiment_accuracies(const hr_experiment* experiment, double* out);
hr_status hr_experiment_save_accuracy_csv(const hr_experiment* experiment, const char* path,
                                          const char* comment);
hr_status hr_experiment_save_confusion_csv(const hr_experiment* experiment, const char* path,
                                           const char* comment);
hr_status hr_experiment_save_distmap_csv(const hr_experiment* experiment, const char* path,
                                         const char* comment);

/* ---- sliced Wasserstein -------------------------------------------------- */

hr_status hr_points_create(int d, int n, const double* data, hr_points** out);
/* n/2 points uniform on [-1,-1/2]^d and n/2 on [1/2,1]^d. */
hr_status hr_points_two_clusters(int n, int d, uint64_t seed, hr_points** out);
void hr_points_free(hr_points* points);
int hr_points_count(const hr_points* points);
int hr_points_dim(const hr_points* points);
hr_status hr_points_get(const hr_points* points, int index, double* out);

hr_status hr_mixture_create(int k, int d, const double* centers, const double* widths,
                            hr_mixture** out);
void hr_mixture_free(hr_mixture* mixture);
int hr_mixture_k(const hr_mixture* mixture);
int hr_mixture_dim(const hr_mixture* mixture);
hr_status hr_mixture_centers(const hr_mixture* mixture, double* out);
hr_status hr_mixture_widths(const hr_mixture* mixture, double* out);
hr_status hr_mixture_save_json(const hr_mixture* mixture, const double* loss_trace,
                               int trace_len, double initial_loss, const char* meta,
                               const char* path);
hr_status hr_mixture_load_json(const char* path, hr_mixture** out);

hr_status hr_measure_from_image(const hr_image* image, hr_measure** out);
hr_status hr_measure_from_points(const hr_points* points, hr_measure** out);
hr_status hr_measure_from_mixture(const hr_mixture* mixture, hr_measure** out);
void hr_measure_free(hr_measure* measure);
/* Radon density rows of the measure for plotting. */
hr_status hr_measure_sinogram_csv(const hr_measure* measure, const hr_directions* directions,
                                  const double* radii, int num_radii, const char* path,
                                  const char* comment);

typedef struct hr_sw_config {
    const hr_directions* directions;
    const double* radii;
    int num_radii;
    int num_quantiles;
    double lr;
    double beta1;
    double beta2;
    int epochs;
    double eps_hat;
    double grad_deadband;
    uint64_t rng_seed;
} hr_sw_config;

/* Fills optimizer defaults (lr 0.05, betas 0.9/0.99, 100 epochs, 256
 * quantiles); directions/radii stay NULL and must be set by the caller. */
void hr_sw_config_default(hr_sw_config* config);

hr_status hr_sw2(const hr_measure* mu, const hr_measure* nu, const hr_sw_config* config,
                 double* out);

typedef void (*hr_fit_callback)(int epoch, const hr_mixture* snapshot, const double* trace,
                                int trace_len, void* user);

/* ADAM fit of a k-cube mixture to a point cloud; out_trace (nullable) must
 * hold epochs doubles. init NULL selects the default initialization. */
hr_status hr_fit_mixture(const hr_points* target, int k, const hr_sw_config* config,
                         const hr_mixture* init, hr_fit_callback callback, void* user,
                         hr_mixture** out, double* out_trace, double* out_initial_loss);

hr_status hr_sw_barycenter(const hr_measure* mu1, const hr_measure* mu2, double lambda,
                           int k, const hr_sw_config* config, const hr_mixture* init,
                           hr_fit_callback callback, void* user, hr_mixture** out,
                           double* out_trace, double* out_initial_loss);

#ifdef __cplusplus
}
#endif

#endif /* HYPERRADON_H */
