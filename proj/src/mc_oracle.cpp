#include "mc_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace hyperradon {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

McEstimate mc_cube_plane_area(const HalfWidths& a, const Direction& theta, double t,
                              double eps, uint64_t num_samples, uint64_t rng_seed) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("mc_cube_plane_area: eps must be positive");
    }
    if (num_samples < 1) {
        throw std::invalid_argument("mc_cube_plane_area: need at least one sample");
    }
    if (a.dim() != theta.dim()) {
        throw std::invalid_argument("mc_cube_plane_area: dimension mismatch");
    }
    const int d = a.dim();
    Rng rng(rng_seed);
    uint64_t hits = 0;
    for (uint64_t i = 0; i < num_samples; ++i) {
        double proj = 0.0;
        for (int j = 0; j < d; ++j) {
            proj += theta[j] * rng.uniform(-a[j], a[j]);
        }
        if (std::abs(proj - t) <= eps) {
            ++hits;
        }
    }
    const double volume = std::ldexp(product_all(a.values()), d);
    const double scale = volume / (2.0 * eps);
    const double p = static_cast<double>(hits) / static_cast<double>(num_samples);
    McEstimate out;
    out.estimate = p * scale;
    out.std_error = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(num_samples));
    return out;
}

McComparisonReport mc_comparison_report(const DirectionSet& directions,
                                        const std::vector<double>& radii, double eps,
                                        const std::vector<uint64_t>& sample_counts,
                                        int repeats, uint64_t rng_seed) {
    if (repeats < 1) {
        throw std::invalid_argument("mc_comparison_report: repeats must be >= 1");
    }
    if (directions.count() == 0 || radii.empty() || sample_counts.empty()) {
        throw std::invalid_argument("mc_comparison_report: empty grid");
    }
    if (!std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("mc_comparison_report: radii must be sorted");
    }
    const int d = directions.dim;
    const HalfWidths a(std::vector<double>(static_cast<size_t>(d), 1.0));
    const size_t n_dir = static_cast<size_t>(directions.count());
    const size_t n_r = radii.size();
    const double scale_base = std::ldexp(1.0, d) / (2.0 * eps);

    // Exact values on the grid, timed once.
    std::vector<double> exact(n_dir * n_r);
    const auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < n_dir; ++i) {
        const CubeSection section(a, directions.points[i]);
        for (size_t j = 0; j < n_r; ++j) {
            exact[i * n_r + j] = section.area(radii[j]);
        }
    }
    const double time_exact = seconds_since(t0);
    double max_exact = 0.0;
    for (double v : exact) {
        max_exact = std::max(max_exact, v);
    }

    McComparisonReport report;
    report.max_exact = max_exact;
    std::vector<uint64_t> hits(n_r);
    for (size_t ci = 0; ci < sample_counts.size(); ++ci) {
        const uint64_t n = sample_counts[ci];
        if (n < 1) {
            throw std::invalid_argument("mc_comparison_report: sample count must be >= 1");
        }
        double sum_abs_diff = 0.0;
        double time_mc = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            const auto t1 = std::chrono::steady_clock::now();
            for (size_t di = 0; di < n_dir; ++di) {
                const uint64_t batch =
                    (ci * static_cast<size_t>(repeats) + static_cast<size_t>(rep)) * n_dir + di;
                Rng rng(derive_seed(rng_seed, batch));
                const Direction& theta = directions.points[di];
                std::fill(hits.begin(), hits.end(), 0);
                for (uint64_t k = 0; k < n; ++k) {
                    double proj = 0.0;
                    for (int j = 0; j < d; ++j) {
                        proj += theta[j] * rng.uniform(-1.0, 1.0);
                    }
                    // One sample batch serves every radius of this direction.
                    auto it = std::lower_bound(radii.begin(), radii.end(), proj - eps);
                    for (; it != radii.end() && *it - proj <= eps; ++it) {
                        if (std::abs(proj - *it) <= eps) {
                            ++hits[static_cast<size_t>(it - radii.begin())];
                        }
                    }
                }
                for (size_t j = 0; j < n_r; ++j) {
                    const double est = scale_base * static_cast<double>(hits[j]) /
                                       static_cast<double>(n);
                    sum_abs_diff += std::abs(est - exact[di * n_r + j]);
                }
            }
            time_mc += seconds_since(t1);
        }
        McComparisonRow row;
        row.num_samples = n;
        row.mean_abs_diff =
            sum_abs_diff / (static_cast<double>(repeats) * static_cast<double>(n_dir * n_r));
        row.norm_mean_abs_diff = max_exact > 0.0 ? row.mean_abs_diff / max_exact : 0.0;
        row.mean_time_mc_sec = time_mc / repeats;
        row.time_exact_sec = time_exact;
        report.rows.push_back(row);
    }
    return report;
}

void save_mc_report_csv(const McComparisonReport& report, const std::string& path,
                        const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("mc report CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "N,mean_abs_diff,mean_time_mc_sec,time_exact_sec\n");
    for (const auto& row : report.rows) {
        std::fprintf(f, "%llu,%.17g,%.17g,%.17g\n",
                     static_cast<unsigned long long>(row.num_samples), row.mean_abs_diff,
                     row.mean_time_mc_sec, row.time_exact_sec);
    }
    std::fclose(f);
}

}  // namespace hyperradon
