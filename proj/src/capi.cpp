#include "hyperradon/hyperradon.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "classify.hpp"
#include "directions.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "ingest.hpp"
#include "mc_oracle.hpp"
#include "nrcdt.hpp"
#include "sliced_wasserstein.hpp"
#include "trace_features.hpp"
#include "voxel.hpp"

namespace hr = hyperradon;

namespace {

thread_local std::string g_last_error;

hr_status fail(hr_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename Fn>
hr_status guarded(Fn&& fn) {
    try {
        fn();
        return HR_OK;
    } catch (const hr::ParseError& e) {
        return fail(HR_ERR_PARSE, e.what());
    } catch (const hr::IoError& e) {
        return fail(HR_ERR_IO, e.what());
    } catch (const std::domain_error& e) {
        return fail(HR_ERR_DEGENERATE, e.what());
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        if (msg.find("mismatch") != std::string::npos) {
            return fail(HR_ERR_DIMENSION_MISMATCH, e.what());
        }
        return fail(HR_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(HR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HR_ERR_INTERNAL, "unknown error");
    }
}

hr_status require(bool ok, const char* what) {
    return ok ? HR_OK : fail(HR_ERR_INVALID_ARGUMENT, what);
}

hr::HalfWidths make_halfwidths(int d, const double* a) {
    return hr::HalfWidths(std::vector<double>(a, a + d));
}

hr::Direction make_direction(int d, const double* theta) {
    return hr::Direction::raw(std::vector<double>(theta, theta + d));
}

hr::AffineRanges ranges_from_json(const char* json_text) {
    hr::AffineRanges ranges;
    if (!json_text || !*json_text) {
        return ranges;
    }
    const auto j = nlohmann::json::parse(json_text);
    ranges.shear_max = j.value("shear_max", ranges.shear_max);
    ranges.scale_min = j.value("scale_min", ranges.scale_min);
    ranges.scale_max = j.value("scale_max", ranges.scale_max);
    ranges.shift_max = j.value("shift_max", ranges.shift_max);
    ranges.rotate = j.value("rotate", ranges.rotate);
    return ranges;
}

std::string opt_comment(const char* comment) { return comment ? comment : ""; }

}  // namespace

struct hr_image {
    hr::VoxelImage value;
};
struct hr_sinogram {
    hr::Sinogram value;
};
struct hr_directions {
    hr::DirectionSet value;
};
struct hr_mesh {
    hr::TriangleMesh value;
};
struct hr_experiment {
    hr::ExperimentResult value;
};
struct hr_points {
    hr::EmpiricalMeasure value;
};
struct hr_mixture {
    hr::CubeMixture value;
};
struct hr_measure {
    hr::SWMeasure value;
};

namespace {

hr::SWConfig convert_config(const hr_sw_config* config) {
    if (!config || !config->directions || !config->radii || config->num_radii < 2) {
        throw std::invalid_argument("sw config: directions and radii are required");
    }
    hr::SWConfig cfg;
    cfg.directions = config->directions->value;
    cfg.radii.assign(config->radii, config->radii + config->num_radii);
    cfg.num_quantiles = config->num_quantiles;
    cfg.adam.lr = config->lr;
    cfg.adam.beta1 = config->beta1;
    cfg.adam.beta2 = config->beta2;
    cfg.adam.epochs = config->epochs;
    cfg.adam.eps_hat = config->eps_hat;
    cfg.adam.grad_deadband = config->grad_deadband;
    cfg.rng_seed = config->rng_seed;
    return cfg;
}

hr::FitCallback wrap_callback(hr_fit_callback callback, void* user) {
    if (!callback) {
        return nullptr;
    }
    return [callback, user](int epoch, const hr::CubeMixture& mixture,
                            const std::vector<double>& trace) {
        hr_mixture snapshot{mixture};
        callback(epoch, &snapshot, trace.data(), static_cast<int>(trace.size()), user);
    };
}

void export_fit(const hr::FitResult& result, hr_mixture** out, double* out_trace,
                double* out_initial_loss) {
    *out = new hr_mixture{result.mixture};
    if (out_trace) {
        std::memcpy(out_trace, result.loss_trace.data(),
                    sizeof(double) * result.loss_trace.size());
    }
    if (out_initial_loss) {
        *out_initial_loss = result.initial_loss;
    }
}

}  // namespace

extern "C" {

const char* hr_version(void) { return "hyperradon 1.0.0"; }

const char* hr_last_error(void) { return g_last_error.c_str(); }

void hr_set_num_threads(int n) {
#ifdef _OPENMP
    if (n <= 0) {
        omp_set_num_threads(omp_get_num_procs());
    } else {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

/* ---- geometry ---------------------------------------------------------- */

hr_status hr_cube_plane_area(int d, const double* a, const double* theta, double t,
                             double* out) {
    if (hr_status s = require(d >= 1 && a && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = hr::cube_plane_area(make_halfwidths(d, a), make_direction(d, theta), t); });
}

hr_status hr_cube_plane_area_2d(const double* a, const double* theta, double t, double* out) {
    if (hr_status s = require(a && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = hr::cube_plane_area_2d(make_halfwidths(2, a), make_direction(2, theta), t); });
}

hr_status hr_cube_plane_area_3d(const double* a, const double* theta, double t, double* out) {
    if (hr_status s = require(a && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = hr::cube_plane_area_3d(make_halfwidths(3, a), make_direction(3, theta), t); });
}

hr_status hr_cube_slab_volume(int d, const double* a, const double* theta, double t1,
                              double t2, double* out) {
    if (hr_status s = require(d >= 1 && a && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        *out = hr::cube_slab_volume(make_halfwidths(d, a), make_direction(d, theta), {t1, t2});
    });
}

hr_status hr_cube_plane_area_regularized(int d, const double* a, const double* theta,
                                         double t, double eps, double* out) {
    if (hr_status s = require(d >= 1 && a && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        *out = hr::cube_plane_area_regularized(make_halfwidths(d, a), make_direction(d, theta),
                                               t, eps);
    });
}

hr_status hr_indicator_convolution(int k, const double* b, double t, double* out) {
    if (hr_status s = require(k >= 1 && b && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        *out = hr::indicator_convolution(std::span<const double>(b, static_cast<size_t>(k)), t);
    });
}

/* ---- images ------------------------------------------------------------- */

hr_status hr_image_create(int d, const int32_t* extents, double voxel_size,
                          const double* values, hr_image** out) {
    if (hr_status s = require(d >= 1 && extents && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::vector<int> ext(extents, extents + d);
        if (values) {
            size_t n = 1;
            for (int e : ext) {
                n *= static_cast<size_t>(e > 0 ? e : 0);
            }
            *out = new hr_image{hr::VoxelImage(ext, voxel_size,
                                               std::vector<double>(values, values + n))};
        } else {
            *out = new hr_image{hr::VoxelImage::zeros(ext, voxel_size)};
        }
    });
}

void hr_image_free(hr_image* image) { delete image; }

int hr_image_dim(const hr_image* image) { return image ? image->value.dim() : 0; }

hr_status hr_image_extents(const hr_image* image, int32_t* out) {
    if (hr_status s = require(image && out, "null argument")) {
        return s;
    }
    for (int i = 0; i < image->value.dim(); ++i) {
        out[i] = image->value.extents()[static_cast<size_t>(i)];
    }
    return HR_OK;
}

double hr_image_voxel_size(const hr_image* image) {
    return image ? image->value.voxel_size() : 0.0;
}

size_t hr_image_value_count(const hr_image* image) { return image ? image->value.size() : 0; }

const double* hr_image_values(const hr_image* image) {
    return image ? image->value.values().data() : nullptr;
}

hr_status hr_image_load_rvox(const char* path, hr_image** out) {
    if (hr_status s = require(path && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_image{hr::load_rvox(path)}; });
}

hr_status hr_image_save_rvox(const hr_image* image, const char* path) {
    if (hr_status s = require(image && path, "null argument")) {
        return s;
    }
    return guarded([&] { hr::save_rvox(image->value, path); });
}

hr_status hr_image_synth(const char* params_json, int n, hr_image** out) {
    if (hr_status s = require(params_json && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(params_json);
        } catch (const nlohmann::json::exception& e) {
            throw hr::ParseError(std::string("synth params: ") + e.what());
        }
        const std::string kind = j.at("kind").get<std::string>();
        hr::ShapeParams params;
        if (j.contains("center")) {
            const auto c = j["center"].get<std::vector<double>>();
            if (c.size() != 3) {
                throw std::invalid_argument("synth params: center must have 3 entries");
            }
            std::copy(c.begin(), c.end(), params.center.begin());
        }
        if (j.contains("half_widths")) {
            const auto h = j["half_widths"].get<std::vector<double>>();
            if (h.size() != 3) {
                throw std::invalid_argument("synth params: half_widths must have 3 entries");
            }
            std::copy(h.begin(), h.end(), params.half_widths.begin());
        }
        if (j.contains("axis")) {
            const auto ax = j["axis"].get<std::vector<double>>();
            if (ax.size() != 3) {
                throw std::invalid_argument("synth params: axis must have 3 entries");
            }
            std::copy(ax.begin(), ax.end(), params.axis.begin());
        }
        params.radius = j.value("radius", 0.0);
        params.thickness = j.value("thickness", 0.0);
        hr::ShapeKind shape;
        if (kind == "solid_box") {
            shape = hr::ShapeKind::solid_box;
        } else if (kind == "solid_sphere") {
            shape = hr::ShapeKind::solid_sphere;
        } else if (kind == "hemisphere") {
            shape = hr::ShapeKind::hemisphere;
        } else if (kind == "shell") {
            shape = hr::ShapeKind::shell;
        } else {
            throw std::invalid_argument("synth params: unknown kind '" + kind + "'");
        }
        *out = new hr_image{hr::synth_shape(shape, params, n)};
    });
}

hr_status hr_image_synth_template(const char* name, int n, hr_image** out) {
    if (hr_status s = require(name && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_image{hr::synth_template(name, n)}; });
}

hr_status hr_image_preprocess(const hr_image* image, hr_image** out, int* rotation_skipped) {
    if (hr_status s = require(image && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        hr::PreprocessInfo info;
        *out = new hr_image{hr::preprocess(image->value, &info)};
        if (rotation_skipped) {
            *rotation_skipped = info.rotation_skipped ? 1 : 0;
        }
    });
}

hr_status hr_affine_random(int d, uint64_t seed, const char* ranges_json, double* matrix,
                           double* shift) {
    if (hr_status s = require(matrix && shift, "null argument")) {
        return s;
    }
    return guarded([&] {
        hr::AffineRanges ranges;
        try {
            ranges = ranges_from_json(ranges_json);
        } catch (const nlohmann::json::exception& e) {
            throw hr::ParseError(std::string("affine ranges: ") + e.what());
        }
        const hr::AffineMap map = hr::random_affine(d, seed, ranges);
        std::memcpy(matrix, map.matrix.data(), sizeof(double) * map.matrix.size());
        std::memcpy(shift, map.shift.data(), sizeof(double) * map.shift.size());
    });
}

hr_status hr_image_apply_affine(const hr_image* image, const double* matrix,
                                const double* shift, hr_image** out) {
    if (hr_status s = require(image && matrix && shift && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        const int d = image->value.dim();
        hr::AffineMap map;
        map.dim = d;
        map.matrix.assign(matrix, matrix + d * d);
        map.shift.assign(shift, shift + d);
        *out = new hr_image{hr::apply_affine_voxels(image->value, map)};
    });
}

hr_status hr_discrete_radon(const hr_image* image, const double* theta, double t, double eps,
                            double* out) {
    if (hr_status s = require(image && theta && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto dir = make_direction(image->value.dim(), theta);
        *out = eps > 0.0 ? hr::discrete_radon_regularized(image->value, dir, t, eps)
                         : hr::discrete_radon(image->value, dir, t);
    });
}

hr_status hr_binned_radon(const hr_image* image, const double* theta, const double* radii,
                          int num_radii, double bin_halfwidth, double* out) {
    if (hr_status s = require(image && theta && radii && out && num_radii >= 1,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto values = hr::binned_radon(
            image->value, make_direction(image->value.dim(), theta),
            std::vector<double>(radii, radii + num_radii), bin_halfwidth);
        std::memcpy(out, values.data(), sizeof(double) * values.size());
    });
}

hr_status hr_default_radius_grid(const hr_image* image, int count, double* out) {
    if (hr_status s = require(image && out && count >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto grid = hr::default_radius_grid(image->value, count);
        std::memcpy(out, grid.data(), sizeof(double) * grid.size());
    });
}

hr_status hr_sinogram_compute(const hr_image* image, const hr_directions* directions,
                              const double* radii, int num_radii, double eps,
                              hr_sinogram** out) {
    if (hr_status s =
            require(image && directions && radii && out && num_radii >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::optional<double> reg;
        if (eps > 0.0) {
            reg = eps;
        }
        *out = new hr_sinogram{hr::compute_sinogram(
            image->value, directions->value, std::vector<double>(radii, radii + num_radii),
            reg)};
    });
}

void hr_sinogram_free(hr_sinogram* sinogram) { delete sinogram; }

int hr_sinogram_num_directions(const hr_sinogram* sinogram) {
    return sinogram ? sinogram->value.num_directions() : 0;
}

int hr_sinogram_num_radii(const hr_sinogram* sinogram) {
    return sinogram ? sinogram->value.num_radii() : 0;
}

const double* hr_sinogram_values(const hr_sinogram* sinogram) {
    return sinogram ? sinogram->value.values.data() : nullptr;
}

hr_status hr_sinogram_radii(const hr_sinogram* sinogram, double* out) {
    if (hr_status s = require(sinogram && out, "null argument")) {
        return s;
    }
    std::memcpy(out, sinogram->value.radii.data(), sizeof(double) * sinogram->value.radii.size());
    return HR_OK;
}

hr_status hr_sinogram_save_csv(const hr_sinogram* sinogram, const char* path,
                               const char* comment) {
    if (hr_status s = require(sinogram && path, "null argument")) {
        return s;
    }
    return guarded([&] { hr::save_sinogram_csv(sinogram->value, path, opt_comment(comment)); });
}

/* ---- directions ---------------------------------------------------------- */

hr_status hr_directions_create(const char* spec, hr_directions** out) {
    if (hr_status s = require(spec && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_directions{hr::parse_direction_spec(spec)}; });
}

hr_status hr_directions_from_array(int d, int n, const double* data, hr_directions** out) {
    if (hr_status s = require(d >= 1 && n >= 1 && data && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::vector<std::vector<double>> points;
        points.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            points.emplace_back(data + static_cast<size_t>(i) * d,
                                data + static_cast<size_t>(i + 1) * d);
        }
        *out = new hr_directions{hr::explicit_directions(d, points)};
    });
}

void hr_directions_free(hr_directions* directions) { delete directions; }

int hr_directions_count(const hr_directions* directions) {
    return directions ? directions->value.count() : 0;
}

int hr_directions_dim(const hr_directions* directions) {
    return directions ? directions->value.dim : 0;
}

hr_status hr_directions_get(const hr_directions* directions, int index, double* out) {
    if (hr_status s = require(directions && out, "null argument")) {
        return s;
    }
    if (index < 0 || index >= directions->value.count()) {
        return fail(HR_ERR_INVALID_ARGUMENT, "direction index out of range");
    }
    const auto& v = directions->value.points[static_cast<size_t>(index)].values();
    std::memcpy(out, v.data(), sizeof(double) * v.size());
    return HR_OK;
}

/* ---- Monte Carlo ----------------------------------------------------------- */

hr_status hr_mc_cube_plane_area(int d, const double* a, const double* theta, double t,
                                double eps, uint64_t num_samples, uint64_t seed,
                                double* estimate, double* std_error) {
    if (hr_status s = require(d >= 1 && a && theta && estimate, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto r = hr::mc_cube_plane_area(make_halfwidths(d, a), make_direction(d, theta),
                                              t, eps, num_samples, seed);
        *estimate = r.estimate;
        if (std_error) {
            *std_error = r.std_error;
        }
    });
}

hr_status hr_mc_compare(const hr_directions* directions, const double* radii, int num_radii,
                        double eps, const uint64_t* sample_counts, int num_counts,
                        int repeats, uint64_t seed, const char* csv_path,
                        const char* comment, double* out_rows) {
    if (hr_status s = require(directions && radii && sample_counts && num_radii >= 1 &&
                                  num_counts >= 1,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto report = hr::mc_comparison_report(
            directions->value, std::vector<double>(radii, radii + num_radii), eps,
            std::vector<uint64_t>(sample_counts, sample_counts + num_counts), repeats, seed);
        if (csv_path) {
            hr::save_mc_report_csv(report, csv_path, opt_comment(comment));
        }
        if (out_rows) {
            for (int i = 0; i < num_counts; ++i) {
                const auto& row = report.rows[static_cast<size_t>(i)];
                out_rows[i * 5 + 0] = static_cast<double>(row.num_samples);
                out_rows[i * 5 + 1] = row.mean_abs_diff;
                out_rows[i * 5 + 2] = row.norm_mean_abs_diff;
                out_rows[i * 5 + 3] = row.mean_time_mc_sec;
                out_rows[i * 5 + 4] = row.time_exact_sec;
            }
        }
    });
}

/* ---- meshes ------------------------------------------------------------------ */

hr_status hr_mesh_parse_off(const char* text, hr_mesh** out) {
    if (hr_status s = require(text && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_mesh{hr::parse_off(text)}; });
}

hr_status hr_mesh_load_off(const char* path, hr_mesh** out) {
    if (hr_status s = require(path && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_mesh{hr::load_off(path)}; });
}

void hr_mesh_free(hr_mesh* mesh) { delete mesh; }

hr_status hr_mesh_counts(const hr_mesh* mesh, int64_t* num_vertices, int64_t* num_faces) {
    if (hr_status s = require(mesh != nullptr, "null argument")) {
        return s;
    }
    if (num_vertices) {
        *num_vertices = static_cast<int64_t>(mesh->value.vertices.size());
    }
    if (num_faces) {
        *num_faces = static_cast<int64_t>(mesh->value.faces.size());
    }
    return HR_OK;
}

hr_status hr_mesh_voxelize(const hr_mesh* mesh, int n, int fill, hr_image** out) {
    if (hr_status s = require(mesh && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_image{hr::voxelize(mesh->value, n, fill != 0)}; });
}

/* ---- trace features ------------------------------------------------------------ */

hr_status hr_trace_features(const hr_image* image, const double* radii, int num_radii,
                            int n1, int n2, double eps, double out[HR_NUM_TRACE_FEATURES]) {
    if (hr_status s = require(image && radii && out && num_radii >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::optional<double> reg;
        if (eps > 0.0) {
            reg = eps;
        }
        const auto tensor = hr::trace_sinogram_tensor(
            image->value, std::vector<double>(radii, radii + num_radii), n1, n2, reg);
        const auto features = hr::extract_features(tensor);
        std::memcpy(out, features.data(), sizeof(double) * features.size());
    });
}

hr_status hr_trace_features_tensor(const double* values, int d1, int d2, int d3,
                                   double out[HR_NUM_TRACE_FEATURES]) {
    if (hr_status s = require(values && out && d1 >= 1 && d2 >= 1 && d3 >= 1,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        hr::SinogramTensor3 tensor;
        tensor.t_grid.assign(static_cast<size_t>(d1), 0.0);
        tensor.theta1_grid.assign(static_cast<size_t>(d2), 0.0);
        tensor.theta2_grid.assign(static_cast<size_t>(d3), 0.0);
        tensor.values.assign(values, values + static_cast<size_t>(d1) *
                                                  static_cast<size_t>(d2) *
                                                  static_cast<size_t>(d3));
        const auto features = hr::extract_features(tensor);
        std::memcpy(out, features.data(), sizeof(double) * features.size());
    });
}

hr_status hr_save_features_csv(const int32_t* sample_ids, const double* features,
                               int num_samples, int num_features, const char* path,
                               const char* comment) {
    if (hr_status s = require(sample_ids && features && path && num_samples >= 1 &&
                                  num_features >= 1,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        std::vector<int> ids(sample_ids, sample_ids + num_samples);
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<size_t>(num_samples));
        for (int i = 0; i < num_samples; ++i) {
            rows.emplace_back(features + static_cast<size_t>(i) * num_features,
                              features + static_cast<size_t>(i + 1) * num_features);
        }
        hr::save_features_csv(ids, rows, path, opt_comment(comment));
    });
}

/* ---- NR-CDT ----------------------------------------------------------------------- */

hr_status hr_sinogram_nrcdt(const hr_sinogram* sinogram, int direction_index,
                            int num_quantiles, double* out) {
    if (hr_status s = require(sinogram && out && num_quantiles >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto profile = hr::nrcdt(sinogram->value, direction_index,
                                       hr::default_xi_grid(num_quantiles));
        std::memcpy(out, profile.values.data(), sizeof(double) * profile.values.size());
    });
}

hr_status hr_sinogram_max_nrcdt(const hr_sinogram* sinogram, int num_quantiles, double* out,
                                int* skipped_directions) {
    if (hr_status s = require(sinogram && out && num_quantiles >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto profile = hr::max_nrcdt(sinogram->value, hr::default_xi_grid(num_quantiles),
                                           skipped_directions);
        std::memcpy(out, profile.values.data(), sizeof(double) * profile.values.size());
    });
}

hr_status hr_save_profile_csv(const double* values, int num_quantiles, const char* path,
                              const char* comment) {
    if (hr_status s = require(values && path && num_quantiles >= 1, "null argument")) {
        return s;
    }
    return guarded([&] {
        hr::QuantileProfile profile;
        profile.xi_grid = hr::default_xi_grid(num_quantiles);
        profile.values.assign(values, values + num_quantiles);
        hr::save_profile_csv(profile, path, opt_comment(comment));
    });
}

/* ---- 1-NN experiments ---------------------------------------------------------------- */

hr_status hr_knn_experiment(int num_samples, int feature_dim, const double* features,
                            const int32_t* labels, int train_per_class, int repeats,
                            int norm, uint64_t seed, hr_experiment** out) {
    if (hr_status s = require(features && labels && out && num_samples >= 2 &&
                                  feature_dim >= 1,
                              "null argument")) {
        return s;
    }
    if (norm < 0 || norm > 2) {
        return fail(HR_ERR_INVALID_ARGUMENT, "norm must be 0 (L1), 1 (L2) or 2 (Linf)");
    }
    return guarded([&] {
        hr::LabeledFeatureSet set;
        for (int i = 0; i < num_samples; ++i) {
            hr::LabeledSample sample;
            sample.label = labels[i];
            sample.sample_id = i;
            sample.features.assign(features + static_cast<size_t>(i) * feature_dim,
                                   features + static_cast<size_t>(i + 1) * feature_dim);
            set.samples.push_back(std::move(sample));
        }
        hr::ExperimentConfig cfg;
        cfg.train_per_class = train_per_class;
        cfg.repeats = repeats;
        cfg.norm = static_cast<hr::Norm>(norm);
        cfg.rng_seed = seed;
        *out = new hr_experiment{hr::run_experiment(set, cfg)};
    });
}

void hr_experiment_free(hr_experiment* experiment) { delete experiment; }

double hr_experiment_mean_accuracy(const hr_experiment* experiment) {
    return experiment ? experiment->value.mean_accuracy : 0.0;
}

double hr_experiment_std_accuracy(const hr_experiment* experiment) {
    return experiment ? experiment->value.std_accuracy : 0.0;
}

int hr_experiment_num_repeats(const hr_experiment* experiment) {
    return experiment ? static_cast<int>(experiment->value.accuracies.size()) : 0;
}

hr_status hr_experiment_accuracies(const hr_experiment* experiment, double* out) {
    if (hr_status s = require(experiment && out, "null argument")) {
        return s;
    }
    std::memcpy(out, experiment->value.accuracies.data(),
                sizeof(double) * experiment->value.accuracies.size());
    return HR_OK;
}

hr_status hr_experiment_save_accuracy_csv(const hr_experiment* experiment, const char* path,
                                          const char* comment) {
    if (hr_status s = require(experiment && path, "null argument")) {
        return s;
    }
    return guarded([&] { hr::save_accuracy_csv(experiment->value, path, opt_comment(comment)); });
}

hr_status hr_experiment_save_confusion_csv(const hr_experiment* experiment, const char* path,
                                           const char* comment) {
    if (hr_status s = require(experiment && path, "null argument")) {
        return s;
    }
    return guarded([&] { hr::save_confusion_csv(experiment->value, path, opt_comment(comment)); });
}

hr_status hr_experiment_save_distmap_csv(const hr_experiment* experiment, const char* path,
                                         const char* comment) {
    if (hr_status s = require(experiment && path, "null argument")) {
        return s;
    }
    return guarded([&] { hr::save_distmap_csv(experiment->value, path, opt_comment(comment)); });
}

/* ---- sliced Wasserstein ------------------------------------------------------------------ */

hr_status hr_points_create(int d, int n, const double* data, hr_points** out) {
    if (hr_status s = require(d >= 1 && n >= 1 && data && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::vector<std::vector<double>> points;
        points.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            points.emplace_back(data + static_cast<size_t>(i) * d,
                                data + static_cast<size_t>(i + 1) * d);
        }
        *out = new hr_points{hr::EmpiricalMeasure::from_points(std::move(points))};
    });
}

hr_status hr_points_two_clusters(int n, int d, uint64_t seed, hr_points** out) {
    if (hr_status s = require(out != nullptr, "null argument")) {
        return s;
    }
    return guarded([&] {
        *out = new hr_points{
            hr::EmpiricalMeasure::from_points(hr::sample_two_cluster_cloud(n, d, seed))};
    });
}

void hr_points_free(hr_points* points) { delete points; }

int hr_points_count(const hr_points* points) {
    return points ? static_cast<int>(points->value.points.size()) : 0;
}

int hr_points_dim(const hr_points* points) { return points ? points->value.dim : 0; }

hr_status hr_points_get(const hr_points* points, int index, double* out) {
    if (hr_status s = require(points && out, "null argument")) {
        return s;
    }
    if (index < 0 || index >= hr_points_count(points)) {
        return fail(HR_ERR_INVALID_ARGUMENT, "point index out of range");
    }
    const auto& p = points->value.points[static_cast<size_t>(index)];
    std::memcpy(out, p.data(), sizeof(double) * p.size());
    return HR_OK;
}

hr_status hr_mixture_create(int k, int d, const double* centers, const double* widths,
                            hr_mixture** out) {
    if (hr_status s = require(k >= 1 && d >= 1 && centers && widths && out,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        const size_t n = static_cast<size_t>(k) * static_cast<size_t>(d);
        *out = new hr_mixture{hr::CubeMixture::from_widths(
            k, d, std::vector<double>(centers, centers + n),
            std::vector<double>(widths, widths + n))};
    });
}

void hr_mixture_free(hr_mixture* mixture) { delete mixture; }

int hr_mixture_k(const hr_mixture* mixture) { return mixture ? mixture->value.k : 0; }

int hr_mixture_dim(const hr_mixture* mixture) { return mixture ? mixture->value.dim : 0; }

hr_status hr_mixture_centers(const hr_mixture* mixture, double* out) {
    if (hr_status s = require(mixture && out, "null argument")) {
        return s;
    }
    std::memcpy(out, mixture->value.centers.data(),
                sizeof(double) * mixture->value.centers.size());
    return HR_OK;
}

hr_status hr_mixture_widths(const hr_mixture* mixture, double* out) {
    if (hr_status s = require(mixture && out, "null argument")) {
        return s;
    }
    const auto w = mixture->value.widths();
    std::memcpy(out, w.data(), sizeof(double) * w.size());
    return HR_OK;
}

hr_status hr_mixture_save_json(const hr_mixture* mixture, const double* loss_trace,
                               int trace_len, double initial_loss, const char* meta,
                               const char* path) {
    if (hr_status s = require(mixture && path, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::vector<double> trace;
        if (loss_trace && trace_len > 0) {
            trace.assign(loss_trace, loss_trace + trace_len);
        }
        hr::save_mixture_json(mixture->value, trace, initial_loss, path,
                              meta ? meta : "");
    });
}

hr_status hr_mixture_load_json(const char* path, hr_mixture** out) {
    if (hr_status s = require(path && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_mixture{hr::load_mixture_json(path).mixture}; });
}

hr_status hr_measure_from_image(const hr_image* image, hr_measure** out) {
    if (hr_status s = require(image && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_measure{hr::SWMeasure::from_image(image->value)}; });
}

hr_status hr_measure_from_points(const hr_points* points, hr_measure** out) {
    if (hr_status s = require(points && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_measure{hr::SWMeasure::from_empirical(points->value)}; });
}

hr_status hr_measure_from_mixture(const hr_mixture* mixture, hr_measure** out) {
    if (hr_status s = require(mixture && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = new hr_measure{hr::SWMeasure::from_mixture(mixture->value)}; });
}

void hr_measure_free(hr_measure* measure) { delete measure; }

hr_status hr_measure_sinogram_csv(const hr_measure* measure, const hr_directions* directions,
                                  const double* radii, int num_radii, const char* path,
                                  const char* comment) {
    if (hr_status s = require(measure && directions && radii && path && num_radii >= 1,
                              "null argument")) {
        return s;
    }
    return guarded([&] {
        const auto sino = measure->value.density_sinogram(
            directions->value, std::vector<double>(radii, radii + num_radii));
        hr::save_sinogram_csv(sino, path, opt_comment(comment));
    });
}

void hr_sw_config_default(hr_sw_config* config) {
    if (!config) {
        return;
    }
    config->directions = nullptr;
    config->radii = nullptr;
    config->num_radii = 0;
    config->num_quantiles = 256;
    config->lr = 0.05;
    config->beta1 = 0.9;
    config->beta2 = 0.99;
    config->epochs = 100;
    config->eps_hat = 1e-8;
    config->grad_deadband = 1e-7;
    config->rng_seed = 1;
}

hr_status hr_sw2(const hr_measure* mu, const hr_measure* nu, const hr_sw_config* config,
                 double* out) {
    if (hr_status s = require(mu && nu && out, "null argument")) {
        return s;
    }
    return guarded([&] { *out = hr::sw2_sq(mu->value, nu->value, convert_config(config)); });
}

hr_status hr_fit_mixture(const hr_points* target, int k, const hr_sw_config* config,
                         const hr_mixture* init, hr_fit_callback callback, void* user,
                         hr_mixture** out, double* out_trace, double* out_initial_loss) {
    if (hr_status s = require(target && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::optional<hr::CubeMixture> start;
        if (init) {
            start = init->value;
        }
        const auto result = hr::fit_mixture(target->value, k, convert_config(config), start,
                                            wrap_callback(callback, user));
        export_fit(result, out, out_trace, out_initial_loss);
    });
}

hr_status hr_sw_barycenter(const hr_measure* mu1, const hr_measure* mu2, double lambda,
                           int k, const hr_sw_config* config, const hr_mixture* init,
                           hr_fit_callback callback, void* user, hr_mixture** out,
                           double* out_trace, double* out_initial_loss) {
    if (hr_status s = require(mu1 && mu2 && out, "null argument")) {
        return s;
    }
    return guarded([&] {
        std::optional<hr::CubeMixture> start;
        if (init) {
            start = init->value;
        }
        const auto result = hr::sw_barycenter(mu1->value, mu2->value, lambda, k,
                                              convert_config(config), start,
                                              wrap_callback(callback, user));
        export_fit(result, out, out_trace, out_initial_loss);
    });
}

}  // extern "C"
