// hyperradon command-line interface. Every subcommand is deterministic for a
// fixed --seed, and every output file carries a version comment line
// `# hyperradon v1 <command> <args-hash>`.
#include <hyperradon/hyperradon.h>

#include <CLI11.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail_usage(const std::string& msg) { throw CliError{kExitUsage, msg}; }
[[noreturn]] void fail_data(const std::string& msg) { throw CliError{kExitData, msg}; }

void check(hr_status status) {
    if (status == HR_OK) {
        return;
    }
    const std::string msg = hr_last_error();
    if (status == HR_ERR_INVALID_ARGUMENT || status == HR_ERR_DIMENSION_MISMATCH) {
        fail_usage(msg);
    }
    fail_data(msg);
}

// FNV-1a over the semantic argument vector; identifies the invocation in
// output headers. --threads is an execution knob, not part of the result,
// so it is excluded (outputs must be identical across thread counts).
std::string args_hash(int argc, char** argv) {
    uint64_t h = 1469598103934665603ULL;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--threads", 0) == 0) {
            if (arg == "--threads" && i + 1 < argc) {
                ++i;
            }
            continue;
        }
        for (const char c : arg) {
            h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        }
        h = (h ^ 0x1f) * 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

std::string g_args_hash;

std::string version_comment(const std::string& command) {
    return "hyperradon v1 " + command + " " + g_args_hash;
}

std::vector<double> parse_vector(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stod(tok));
        } catch (const std::exception&) {
            fail_usage("malformed number '" + tok + "' in vector '" + text + "'");
        }
    }
    if (v.empty()) {
        fail_usage("empty vector '" + text + "'");
    }
    return v;
}

// Grid spec `lo:hi:count`.
std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
    char c1 = 0;
    char c2 = 0;
    std::stringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1) {
        fail_usage("malformed grid spec '" + spec + "' (expected lo:hi:count)");
    }
    std::vector<double> g(static_cast<size_t>(count));
    if (count == 1) {
        g[0] = 0.5 * (lo + hi);
        return g;
    }
    for (int i = 0; i < count; ++i) {
        g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return g;
}

struct DirectionsHandle {
    hr_directions* ptr = nullptr;
    ~DirectionsHandle() { hr_directions_free(ptr); }
};

struct ImageHandle {
    hr_image* ptr = nullptr;
    ImageHandle() = default;
    explicit ImageHandle(hr_image* p) : ptr(p) {}
    ImageHandle(ImageHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    ImageHandle& operator=(ImageHandle&& o) noexcept {
        std::swap(ptr, o.ptr);
        return *this;
    }
    ImageHandle(const ImageHandle&) = delete;
    ImageHandle& operator=(const ImageHandle&) = delete;
    ~ImageHandle() { hr_image_free(ptr); }
};

double wall_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- cube-area -------------------------------------------------------------

struct CubeAreaOpts {
    int dim = 0;
    std::string a;
    std::string theta;
    std::optional<double> t;
    std::string t_grid;
    double eps = 0.0;
    bool corollary = false;
    bool normalize = false;
    std::string out;
};

int run_cube_area(const CubeAreaOpts& opt) {
    const std::vector<double> a = parse_vector(opt.a);
    std::vector<double> theta = parse_vector(opt.theta);
    if (static_cast<int>(a.size()) != opt.dim || static_cast<int>(theta.size()) != opt.dim) {
        fail_usage("--a and --theta must have --dim entries");
    }
    if (opt.normalize) {
        double n = 0.0;
        for (double v : theta) {
            n += v * v;
        }
        n = std::sqrt(n);
        if (n == 0.0) {
            fail_usage("--theta must be nonzero");
        }
        for (double& v : theta) {
            v /= n;
        }
    }
    std::vector<double> ts;
    if (opt.t) {
        ts.push_back(*opt.t);
    } else if (!opt.t_grid.empty()) {
        ts = parse_grid(opt.t_grid);
    } else {
        fail_usage("one of --t or --t-grid is required");
    }

    auto evaluate = [&](double t) {
        double value = 0.0;
        if (opt.eps > 0.0) {
            check(hr_cube_plane_area_regularized(opt.dim, a.data(), theta.data(), t, opt.eps,
                                                 &value));
        } else if (opt.corollary && opt.dim == 2) {
            check(hr_cube_plane_area_2d(a.data(), theta.data(), t, &value));
        } else if (opt.corollary && opt.dim == 3) {
            check(hr_cube_plane_area_3d(a.data(), theta.data(), t, &value));
        } else if (opt.corollary) {
            fail_usage("--corollary requires --dim 2 or 3");
        } else {
            check(hr_cube_plane_area(opt.dim, a.data(), theta.data(), t, &value));
        }
        return value;
    };

    if (!opt.out.empty()) {
        std::FILE* f = std::fopen(opt.out.c_str(), "w");
        if (!f) {
            fail_data("cannot open output file " + opt.out);
        }
        std::fprintf(f, "# %s\n", version_comment("cube-area").c_str());
        std::fprintf(f, "t,value\n");
        for (double t : ts) {
            std::fprintf(f, "%.17g,%.17g\n", t, evaluate(t));
        }
        std::fclose(f);
    } else {
        for (double t : ts) {
            std::printf("%.17g\n", evaluate(t));
        }
    }
    return 0;
}

// ---- sinogram ----------------------------------------------------------------

int run_sinogram(const std::string& input, const std::string& dir_spec,
                 const std::string& radii_spec, double eps, const std::string& out) {
    ImageHandle image;
    check(hr_image_load_rvox(input.c_str(), &image.ptr));
    DirectionsHandle dirs;
    check(hr_directions_create(dir_spec.c_str(), &dirs.ptr));
    const std::vector<double> radii = parse_grid(radii_spec);

    const auto t0 = std::chrono::steady_clock::now();
    hr_sinogram* sino = nullptr;
    check(hr_sinogram_compute(image.ptr, dirs.ptr, radii.data(),
                              static_cast<int>(radii.size()), eps, &sino));
    const double elapsed = wall_seconds(t0);
    const hr_status status = hr_sinogram_save_csv(sino, out.c_str(),
                                                  version_comment("sinogram").c_str());
    hr_sinogram_free(sino);
    check(status);
    std::fprintf(stderr, "sinogram: %d directions x %zu radii in %.3f s -> %s\n",
                 hr_directions_count(dirs.ptr), radii.size(), elapsed, out.c_str());
    return 0;
}

// ---- mc-compare -----------------------------------------------------------------

int run_mc_compare(const std::string& dir_spec, const std::string& radii_spec, double eps,
                   const std::string& samples, int repeats, uint64_t seed,
                   const std::string& out) {
    DirectionsHandle dirs;
    check(hr_directions_create(dir_spec.c_str(), &dirs.ptr));
    const std::vector<double> radii = parse_grid(radii_spec);
    std::vector<uint64_t> counts;
    {
        std::stringstream ss(samples);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                counts.push_back(std::stoull(tok));
            } catch (const std::exception&) {
                fail_usage("malformed sample count '" + tok + "'");
            }
        }
    }
    if (counts.empty()) {
        fail_usage("--samples requires at least one count");
    }
    std::vector<double> rows(counts.size() * 5);
    check(hr_mc_compare(dirs.ptr, radii.data(), static_cast<int>(radii.size()), eps,
                        counts.data(), static_cast<int>(counts.size()), repeats, seed,
                        out.empty() ? nullptr : out.c_str(),
                        version_comment("mc-compare").c_str(), rows.data()));
    std::printf("N,mean_abs_diff,norm_mean_abs_diff,mean_time_mc_sec,time_exact_sec\n");
    for (size_t i = 0; i < counts.size(); ++i) {
        std::printf("%" PRIu64 ",%.6g,%.6g,%.4f,%.4f\n",
                    static_cast<uint64_t>(rows[i * 5 + 0]), rows[i * 5 + 1], rows[i * 5 + 2],
                    rows[i * 5 + 3], rows[i * 5 + 4]);
    }
    return 0;
}

// ---- dataset assembly for the classify commands ---------------------------------

struct Dataset {
    std::vector<ImageHandle> images;
    std::vector<int32_t> labels;
};

Dataset load_data_dir(const std::string& root, int grid) {
    Dataset data;
    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            class_dirs.push_back(entry.path());
        }
    }
    std::sort(class_dirs.begin(), class_dirs.end());
    if (class_dirs.size() < 2) {
        fail_data("--data directory needs at least two class subdirectories");
    }
    for (size_t c = 0; c < class_dirs.size(); ++c) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
            if (entry.path().extension() == ".off") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            hr_mesh* mesh = nullptr;
            check(hr_mesh_load_off(file.string().c_str(), &mesh));
            hr_image* img = nullptr;
            const hr_status s = hr_mesh_voxelize(mesh, grid, 1, &img);
            hr_mesh_free(mesh);
            check(s);
            data.images.emplace_back(img);
            data.labels.push_back(static_cast<int32_t>(c));
        }
    }
    return data;
}

Dataset make_synthetic(int instances, int grid, uint64_t seed) {
    static const char* templates[3] = {"box", "ball", "lshape"};
    Dataset data;
    for (int c = 0; c < 3; ++c) {
        ImageHandle base;
        check(hr_image_synth_template(templates[c], grid, &base.ptr));
        for (int i = 0; i < instances; ++i) {
            std::vector<double> matrix(9);
            std::vector<double> shift(3);
            check(hr_affine_random(
                3, seed + static_cast<uint64_t>(c) * 1024 + static_cast<uint64_t>(i),
                "{\"scale_min\":0.8,\"scale_max\":1.25,\"shift_max\":0.05}", matrix.data(),
                shift.data()));
            hr_image* inst = nullptr;
            check(hr_image_apply_affine(base.ptr, matrix.data(), shift.data(), &inst));
            data.images.emplace_back(inst);
            data.labels.push_back(c);
        }
    }
    return data;
}

struct ClassifyOpts {
    std::string data_dir;
    int synthetic = 0;
    int grid = 48;
    int radii_count = 65;
    int train_per_class = 3;
    int repeats = 20;
    std::string norm = "l2";
    uint64_t seed = 0;
    double eps = 0.0;
    std::string out_dir;
    // trace variant
    int angles1 = 20;
    int angles2 = 16;
    // nrcdt variant
    std::string directions = "fibonacci:64";
    int quantiles = 64;
};

int norm_code(const std::string& name) {
    if (name == "l1") {
        return 0;
    }
    if (name == "l2") {
        return 1;
    }
    if (name == "linf") {
        return 2;
    }
    fail_usage("--norm must be one of l1, l2, linf");
}

int run_classify(const ClassifyOpts& opt, bool nrcdt_mode, const std::string& command) {
    if (opt.data_dir.empty() == (opt.synthetic == 0)) {
        fail_usage("exactly one of --data or --synthetic is required");
    }
    fs::create_directories(opt.out_dir);
    Dataset data = opt.data_dir.empty() ? make_synthetic(opt.synthetic, opt.grid, opt.seed)
                                        : load_data_dir(opt.data_dir, opt.grid);

    // Radii on [-sqrt(3)/2, sqrt(3)/2]: the half diagonal of the unit box.
    const double r = 0.5 * std::sqrt(3.0);
    std::vector<double> radii(static_cast<size_t>(opt.radii_count));
    for (int i = 0; i < opt.radii_count; ++i) {
        radii[static_cast<size_t>(i)] =
            -r + 2.0 * r * i / std::max(1, opt.radii_count - 1);
    }

    DirectionsHandle dirs;
    if (nrcdt_mode) {
        check(hr_directions_create(opt.directions.c_str(), &dirs.ptr));
    }

    const int feat_dim = nrcdt_mode ? opt.quantiles : HR_NUM_TRACE_FEATURES;
    std::vector<double> features;
    features.reserve(data.images.size() * static_cast<size_t>(feat_dim));
    int total_skipped = 0;
    for (const auto& image : data.images) {
        ImageHandle prep;
        check(hr_image_preprocess(image.ptr, &prep.ptr, nullptr));
        if (nrcdt_mode) {
            hr_sinogram* sino = nullptr;
            check(hr_sinogram_compute(prep.ptr, dirs.ptr, radii.data(),
                                      static_cast<int>(radii.size()), opt.eps, &sino));
            std::vector<double> profile(static_cast<size_t>(opt.quantiles));
            int skipped = 0;
            const hr_status s =
                hr_sinogram_max_nrcdt(sino, opt.quantiles, profile.data(), &skipped);
            hr_sinogram_free(sino);
            check(s);
            total_skipped += skipped;
            features.insert(features.end(), profile.begin(), profile.end());
        } else {
            double out[HR_NUM_TRACE_FEATURES];
            check(hr_trace_features(prep.ptr, radii.data(), static_cast<int>(radii.size()),
                                    opt.angles1, opt.angles2, opt.eps, out));
            features.insert(features.end(), out, out + HR_NUM_TRACE_FEATURES);
        }
    }
    if (total_skipped > 0) {
        std::fprintf(stderr, "warning: %d degenerate direction rows skipped\n", total_skipped);
    }

    hr_experiment* exp = nullptr;
    check(hr_knn_experiment(static_cast<int>(data.images.size()), feat_dim, features.data(),
                            data.labels.data(), opt.train_per_class, opt.repeats,
                            norm_code(opt.norm), opt.seed, &exp));
    const std::string comment = version_comment(command);
    const fs::path out(opt.out_dir);
    check(hr_experiment_save_accuracy_csv(exp, (out / "accuracy.csv").string().c_str(),
                                          comment.c_str()));
    check(hr_experiment_save_confusion_csv(exp, (out / "confusion.csv").string().c_str(),
                                           comment.c_str()));
    check(hr_experiment_save_distmap_csv(exp, (out / "distmap.csv").string().c_str(),
                                         comment.c_str()));
    std::vector<int32_t> ids(data.images.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<int32_t>(i);
    }
    check(hr_save_features_csv(ids.data(), features.data(),
                               static_cast<int>(data.images.size()), feat_dim,
                               (out / "features.csv").string().c_str(), comment.c_str()));
    std::printf("accuracy: %.4f +- %.4f over %d repeats (%zu samples)\n",
                hr_experiment_mean_accuracy(exp), hr_experiment_std_accuracy(exp),
                hr_experiment_num_repeats(exp), data.images.size());
    hr_experiment_free(exp);
    return 0;
}

// ---- fit-sw ------------------------------------------------------------------------

struct SnapshotContext {
    std::string out_dir;
    std::string comment;
    int every = 10;
};

void snapshot_callback(int epoch, const hr_mixture* snapshot, const double* trace,
                       int trace_len, void* user) {
    auto* ctx = static_cast<SnapshotContext*>(user);
    if (epoch % ctx->every != 0) {
        return;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%04d.json", epoch);
    const std::string path = (fs::path(ctx->out_dir) / name).string();
    hr_mixture_save_json(snapshot, trace, trace_len, trace_len > 0 ? trace[0] : 0.0,
                         ctx->comment.c_str(), path.c_str());
}

int run_fit_sw(int dim, int n_points, int k, int epochs, double lr, uint64_t seed,
               const std::string& out_dir) {
    if (dim != 2 && dim != 3) {
        fail_usage("--dim must be 2 or 3");
    }
    fs::create_directories(out_dir);
    hr_points* cloud = nullptr;
    check(hr_points_two_clusters(n_points, dim, seed, &cloud));

    DirectionsHandle dirs;
    const std::string spec = dim == 2 ? "circle:128" : "fibonacci:128";
    check(hr_directions_create(spec.c_str(), &dirs.ptr));
    const double r = std::sqrt(static_cast<double>(dim));
    std::vector<double> radii(101);
    for (int i = 0; i < 101; ++i) {
        radii[static_cast<size_t>(i)] = -r + 2.0 * r * i / 100.0;
    }

    hr_sw_config cfg;
    hr_sw_config_default(&cfg);
    cfg.directions = dirs.ptr;
    cfg.radii = radii.data();
    cfg.num_radii = static_cast<int>(radii.size());
    cfg.epochs = epochs;
    cfg.lr = lr;
    cfg.rng_seed = seed;

    SnapshotContext ctx{out_dir, version_comment("fit-sw"), 10};
    hr_mixture* fitted = nullptr;
    std::vector<double> trace(static_cast<size_t>(std::max(epochs, 1)));
    double initial_loss = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    check(hr_fit_mixture(cloud, k, &cfg, nullptr, snapshot_callback, &ctx, &fitted,
                         trace.data(), &initial_loss));
    const double elapsed = wall_seconds(t0);

    const fs::path out(out_dir);
    check(hr_mixture_save_json(fitted, trace.data(), epochs, initial_loss,
                               ctx.comment.c_str(), (out / "fit.json").string().c_str()));
    hr_measure* target_measure = nullptr;
    check(hr_measure_from_points(cloud, &target_measure));
    check(hr_measure_sinogram_csv(target_measure, dirs.ptr, radii.data(),
                                  static_cast<int>(radii.size()),
                                  (out / "target_sinogram.csv").string().c_str(),
                                  ctx.comment.c_str()));
    hr_measure_free(target_measure);
    hr_measure* fit_measure = nullptr;
    check(hr_measure_from_mixture(fitted, &fit_measure));
    check(hr_measure_sinogram_csv(fit_measure, dirs.ptr, radii.data(),
                                  static_cast<int>(radii.size()),
                                  (out / "fit_sinogram.csv").string().c_str(),
                                  ctx.comment.c_str()));
    hr_measure_free(fit_measure);
    std::printf("fit-sw: initial loss %.6g, final loss %.6g, %d epochs in %.1f s\n",
                initial_loss, epochs > 0 ? trace[static_cast<size_t>(epochs - 1)] : initial_loss,
                epochs, elapsed);
    hr_mixture_free(fitted);
    hr_points_free(cloud);
    return 0;
}

// ---- barycenter -----------------------------------------------------------------------

ImageHandle make_reference_image(const std::string& spec, int grid) {
    ImageHandle img;
    if (spec.rfind("file:", 0) == 0) {
        check(hr_image_load_rvox(spec.substr(5).c_str(), &img.ptr));
        return img;
    }
    if (spec.rfind("synth:", 0) == 0) {
        check(hr_image_synth(spec.substr(6).c_str(), grid, &img.ptr));
        return img;
    }
    std::string json;
    if (spec == "sphere") {
        json = R"({"kind":"solid_sphere","radius":0.35})";
    } else if (spec == "hemisphere-x") {
        json = R"({"kind":"hemisphere","radius":0.35,"axis":[1,0,0]})";
    } else if (spec == "hemisphere-y") {
        json = R"({"kind":"hemisphere","radius":0.35,"axis":[0,1,0]})";
    } else if (spec == "hemisphere-z") {
        json = R"({"kind":"hemisphere","radius":0.35,"axis":[0,0,1]})";
    } else if (spec == "shell") {
        json = R"({"kind":"shell","radius":0.35,"thickness":0.08})";
    } else {
        fail_usage("unknown reference measure '" + spec +
                   "' (use file:PATH, synth:JSON, or a named preset)");
    }
    check(hr_image_synth(json.c_str(), grid, &img.ptr));
    return img;
}

int run_barycenter(const std::string& mu1_spec, const std::string& mu2_spec, double lambda,
                   int k, int grid, int epochs, uint64_t seed, const std::string& out_dir) {
    if (!(lambda > 0.0) || !(lambda < 1.0)) {
        fail_usage("--lambda must lie strictly between 0 and 1");
    }
    fs::create_directories(out_dir);
    ImageHandle img1 = make_reference_image(mu1_spec, grid);
    ImageHandle img2 = make_reference_image(mu2_spec, grid);

    DirectionsHandle dirs;
    check(hr_directions_create("fibonacci:42", &dirs.ptr));
    std::vector<double> radii(31);
    const double r = 0.5 * std::sqrt(3.0);
    for (int i = 0; i < 31; ++i) {
        radii[static_cast<size_t>(i)] = -r + 2.0 * r * i / 30.0;
    }

    hr_sw_config cfg;
    hr_sw_config_default(&cfg);
    cfg.directions = dirs.ptr;
    cfg.radii = radii.data();
    cfg.num_radii = static_cast<int>(radii.size());
    cfg.epochs = epochs;
    cfg.rng_seed = seed;

    hr_measure* m1 = nullptr;
    hr_measure* m2 = nullptr;
    check(hr_measure_from_image(img1.ptr, &m1));
    check(hr_measure_from_image(img2.ptr, &m2));

    SnapshotContext ctx{out_dir, version_comment("barycenter"), 10};
    hr_mixture* bary = nullptr;
    std::vector<double> trace(static_cast<size_t>(std::max(epochs, 1)));
    double initial_loss = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    const hr_status status = hr_sw_barycenter(m1, m2, lambda, k, &cfg, nullptr,
                                              snapshot_callback, &ctx, &bary, trace.data(),
                                              &initial_loss);
    check(status);
    const double elapsed = wall_seconds(t0);

    const fs::path out(out_dir);
    check(hr_mixture_save_json(bary, trace.data(), epochs, initial_loss, ctx.comment.c_str(),
                               (out / "barycenter.json").string().c_str()));
    hr_measure* mb = nullptr;
    check(hr_measure_from_mixture(bary, &mb));
    check(hr_measure_sinogram_csv(mb, dirs.ptr, radii.data(), static_cast<int>(radii.size()),
                                  (out / "barycenter_sinogram.csv").string().c_str(),
                                  ctx.comment.c_str()));
    check(hr_measure_sinogram_csv(m1, dirs.ptr, radii.data(), static_cast<int>(radii.size()),
                                  (out / "mu1_sinogram.csv").string().c_str(),
                                  ctx.comment.c_str()));
    check(hr_measure_sinogram_csv(m2, dirs.ptr, radii.data(), static_cast<int>(radii.size()),
                                  (out / "mu2_sinogram.csv").string().c_str(),
                                  ctx.comment.c_str()));
    std::printf("barycenter: initial loss %.6g, final loss %.6g, %d epochs in %.1f s\n",
                initial_loss, epochs > 0 ? trace[static_cast<size_t>(epochs - 1)] : initial_loss,
                epochs, elapsed);
    hr_measure_free(mb);
    hr_measure_free(m1);
    hr_measure_free(m2);
    hr_mixture_free(bary);
    return 0;
}

// ---- small utilities ---------------------------------------------------------------------

int run_synth(const std::string& params, const std::string& template_name, int n,
              const std::string& out) {
    if (params.empty() == template_name.empty()) {
        fail_usage("exactly one of --params or --template is required");
    }
    ImageHandle img;
    if (!params.empty()) {
        check(hr_image_synth(params.c_str(), n, &img.ptr));
    } else {
        check(hr_image_synth_template(template_name.c_str(), n, &img.ptr));
    }
    check(hr_image_save_rvox(img.ptr, out.c_str()));
    return 0;
}

int run_voxelize(const std::string& input, int n, bool fill, const std::string& out) {
    hr_mesh* mesh = nullptr;
    check(hr_mesh_load_off(input.c_str(), &mesh));
    hr_image* img = nullptr;
    const hr_status status = hr_mesh_voxelize(mesh, n, fill ? 1 : 0, &img);
    hr_mesh_free(mesh);
    check(status);
    const hr_status save = hr_image_save_rvox(img, out.c_str());
    hr_image_free(img);
    check(save);
    return 0;
}

int run_directions(const std::string& spec, const std::string& out) {
    DirectionsHandle dirs;
    check(hr_directions_create(spec.c_str(), &dirs.ptr));
    const int d = hr_directions_dim(dirs.ptr);
    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) {
        fail_data("cannot open output file " + out);
    }
    std::fprintf(f, "# %s\n", version_comment("directions").c_str());
    std::fprintf(f, "index");
    for (int i = 1; i <= d; ++i) {
        std::fprintf(f, ",x%d", i);
    }
    std::fprintf(f, "\n");
    std::vector<double> p(static_cast<size_t>(d));
    for (int i = 0; i < hr_directions_count(dirs.ptr); ++i) {
        check(hr_directions_get(dirs.ptr, i, p.data()));
        std::fprintf(f, "%d", i);
        for (double v : p) {
            std::fprintf(f, ",%.17g", v);
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_args_hash = args_hash(argc, argv);

    CLI::App app{"hyperradon: exact discrete Radon transforms and downstream pipelines"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = all cores)");

    CubeAreaOpts cube;
    auto* cube_cmd = app.add_subcommand("cube-area", "cube-hyperplane section area");
    cube_cmd->add_option("--dim", cube.dim, "ambient dimension")->required();
    cube_cmd->add_option("--a", cube.a, "half-widths, comma separated")->required();
    cube_cmd->add_option("--theta", cube.theta, "direction, comma separated")->required();
    double cube_t = 0.0;
    auto* t_opt = cube_cmd->add_option("--t", cube_t, "single offset");
    cube_cmd->add_option("--t-grid", cube.t_grid, "offset grid lo:hi:count");
    cube_cmd->add_option("--eps", cube.eps, "slab regularization half-width");
    cube_cmd->add_flag("--corollary", cube.corollary, "force the 2D/3D specialized form");
    cube_cmd->add_flag("--normalize", cube.normalize, "normalize theta to unit length");
    cube_cmd->add_option("--out", cube.out, "write CSV instead of stdout");

    std::string sin_input, sin_dirs, sin_radii, sin_out;
    double sin_eps = 0.0;
    auto* sin_cmd = app.add_subcommand("sinogram", "discrete Radon transform of an RVOX image");
    sin_cmd->add_option("--input", sin_input, "RVOX input path")->required();
    sin_cmd->add_option("--directions", sin_dirs, "direction spec")->required();
    sin_cmd->add_option("--radii", sin_radii, "radius grid lo:hi:count")->required();
    sin_cmd->add_option("--eps", sin_eps, "slab regularization half-width");
    sin_cmd->add_option("--out", sin_out, "CSV output path")->required();

    std::string mc_dirs = "sobol:8", mc_radii = "-2:2:33", mc_samples = "65536,1048576";
    double mc_eps = 1e-3;
    int mc_repeats = 20;
    uint64_t mc_seed = 0;
    std::string mc_out;
    auto* mc_cmd = app.add_subcommand("mc-compare", "exact formula vs Monte Carlo study");
    mc_cmd->add_option("--directions", mc_dirs, "direction spec (default sobol:8)");
    mc_cmd->add_option("--radii", mc_radii, "radius grid lo:hi:count");
    mc_cmd->add_option("--eps", mc_eps, "slab half-width for the MC hit test");
    mc_cmd->add_option("--samples", mc_samples, "comma list of sample counts");
    mc_cmd->add_option("--repeats", mc_repeats, "independent repetitions");
    mc_cmd->add_option("--seed", mc_seed, "RNG seed");
    mc_cmd->add_option("--out", mc_out, "CSV output path");

    ClassifyOpts cls;
    auto add_classify_common = [&](CLI::App* cmd) {
        cmd->add_option("--data", cls.data_dir, "directory of class subdirectories of OFF files");
        cmd->add_option("--synthetic", cls.synthetic,
                        "instances per synthetic class (box/ball/lshape)");
        cmd->add_option("--grid", cls.grid, "voxel grid size N");
        cmd->add_option("--radii-count", cls.radii_count, "number of radii");
        cmd->add_option("--R", cls.train_per_class, "training samples per class");
        cmd->add_option("--repeats", cls.repeats, "number of random splits");
        cmd->add_option("--norm", cls.norm, "distance norm: l1 | l2 | linf");
        cmd->add_option("--seed", cls.seed, "RNG seed");
        cmd->add_option("--eps", cls.eps, "slab regularization half-width");
        cmd->add_option("--out", cls.out_dir, "output directory")->required();
    };
    auto* trace_cmd = app.add_subcommand("classify-trace",
                                         "trace-transform features + 1-NN experiment");
    add_classify_common(trace_cmd);
    trace_cmd->add_option("--angles1", cls.angles1, "azimuthal grid count");
    trace_cmd->add_option("--angles2", cls.angles2, "polar grid count");
    auto* nrcdt_cmd = app.add_subcommand("classify-nrcdt",
                                         "max-normalized Radon CDT + 1-NN experiment");
    add_classify_common(nrcdt_cmd);
    nrcdt_cmd->add_option("--directions", cls.directions, "direction spec");
    nrcdt_cmd->add_option("--quantiles", cls.quantiles, "profile length L");

    int fit_dim = 2, fit_n = 40, fit_k = 2, fit_epochs = 100;
    double fit_lr = 0.05;
    uint64_t fit_seed = 0;
    std::string fit_out;
    auto* fit_cmd = app.add_subcommand("fit-sw", "fit a cube mixture to a two-cluster cloud");
    fit_cmd->add_option("--dim", fit_dim, "2 or 3");
    fit_cmd->add_option("--n", fit_n, "number of sample points (40 for d=2, 60 for d=3)");
    fit_cmd->add_option("--k", fit_k, "mixture components");
    fit_cmd->add_option("--epochs", fit_epochs, "optimizer epochs");
    fit_cmd->add_option("--lr", fit_lr, "learning rate");
    fit_cmd->add_option("--seed", fit_seed, "RNG seed");
    fit_cmd->add_option("--out", fit_out, "output directory")->required();

    std::string bary_mu1 = "hemisphere-x", bary_mu2 = "hemisphere-y", bary_out;
    double bary_lambda = 0.5;
    int bary_k = 200, bary_grid = 32, bary_epochs = 100;
    uint64_t bary_seed = 0;
    auto* bary_cmd = app.add_subcommand("barycenter", "sliced Wasserstein barycenter");
    bary_cmd->add_option("--mu1", bary_mu1, "reference: preset | file:PATH | synth:JSON");
    bary_cmd->add_option("--mu2", bary_mu2, "reference: preset | file:PATH | synth:JSON");
    bary_cmd->add_option("--lambda", bary_lambda, "interpolation weight in (0,1)");
    bary_cmd->add_option("--k", bary_k, "mixture components");
    bary_cmd->add_option("--grid", bary_grid, "voxel grid size for reference images");
    bary_cmd->add_option("--epochs", bary_epochs, "optimizer epochs");
    bary_cmd->add_option("--seed", bary_seed, "RNG seed");
    bary_cmd->add_option("--out", bary_out, "output directory")->required();

    std::string synth_params, synth_template, synth_out;
    int synth_n = 64;
    auto* synth_cmd = app.add_subcommand("synth", "rasterize a synthetic shape to RVOX");
    synth_cmd->add_option("--params", synth_params, "shape JSON");
    synth_cmd->add_option("--template", synth_template, "named template: box | ball | lshape");
    synth_cmd->add_option("--n", synth_n, "grid size");
    synth_cmd->add_option("--out", synth_out, "RVOX output path")->required();

    std::string vox_input, vox_out;
    int vox_n = 64;
    bool vox_fill = false;
    auto* vox_cmd = app.add_subcommand("voxelize", "rasterize an OFF mesh to RVOX");
    vox_cmd->add_option("--input", vox_input, "OFF input path")->required();
    vox_cmd->add_option("--n", vox_n, "grid size");
    vox_cmd->add_flag("--fill", vox_fill, "fill the interior by ray parity");
    vox_cmd->add_option("--out", vox_out, "RVOX output path")->required();

    std::string dir_spec, dir_out;
    auto* dir_cmd = app.add_subcommand("directions", "export a direction set as CSV");
    dir_cmd->add_option("--spec", dir_spec, "direction spec")->required();
    dir_cmd->add_option("--out", dir_out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    hr_set_num_threads(threads);
    try {
        if (cube_cmd->parsed()) {
            if (t_opt->count() > 0) {
                cube.t = cube_t;
            }
            return run_cube_area(cube);
        }
        if (sin_cmd->parsed()) {
            return run_sinogram(sin_input, sin_dirs, sin_radii, sin_eps, sin_out);
        }
        if (mc_cmd->parsed()) {
            return run_mc_compare(mc_dirs, mc_radii, mc_eps, mc_samples, mc_repeats, mc_seed,
                                  mc_out);
        }
        if (trace_cmd->parsed()) {
            return run_classify(cls, false, "classify-trace");
        }
        if (nrcdt_cmd->parsed()) {
            return run_classify(cls, true, "classify-nrcdt");
        }
        if (fit_cmd->parsed()) {
            return run_fit_sw(fit_dim, fit_n, fit_k, fit_epochs, fit_lr, fit_seed, fit_out);
        }
        if (bary_cmd->parsed()) {
            return run_barycenter(bary_mu1, bary_mu2, bary_lambda, bary_k, bary_grid,
                                  bary_epochs, bary_seed, bary_out);
        }
        if (synth_cmd->parsed()) {
            return run_synth(synth_params, synth_template, synth_n, synth_out);
        }
        if (vox_cmd->parsed()) {
            return run_voxelize(vox_input, vox_n, vox_fill, vox_out);
        }
        if (dir_cmd->parsed()) {
            return run_directions(dir_spec, dir_out);
        }
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return 0;
}
