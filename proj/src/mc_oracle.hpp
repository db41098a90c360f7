#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "directions.hpp"
#include "geometry.hpp"

namespace hyperradon {

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of the cube-plane section area: draws x uniform on
/// (-a, a], counts hits |<theta,x> - t| <= eps (closed), and scales by
/// 2^d P(a) / (2 eps). Converges to the slab-regularized area at this eps;
/// the sharp-area bias is O(eps).
McEstimate mc_cube_plane_area(const HalfWidths& a, const Direction& theta, double t,
                              double eps, uint64_t num_samples, uint64_t rng_seed);

struct McComparisonRow {
    uint64_t num_samples = 0;
    double mean_abs_diff = 0.0;        // averaged over the (theta, t) grid and repeats
    double norm_mean_abs_diff = 0.0;   // mean_abs_diff / max exact value on the grid
    double mean_time_mc_sec = 0.0;     // per repeat, full grid
    double time_exact_sec = 0.0;       // full grid, measured once
};

struct McComparisonReport {
    std::vector<McComparisonRow> rows;
    double max_exact = 0.0;
};

/// Error-vs-N study on the unit cube a = e: per sample count, the mean
/// absolute difference between the Monte Carlo estimate and the exact
/// formula over the (theta, t) grid, averaged over independent repeats.
/// Samples are drawn once per (count, repeat, direction) batch and shared
/// across radii; batch streams depend only on (seed, batch index).
McComparisonReport mc_comparison_report(const DirectionSet& directions,
                                        const std::vector<double>& radii, double eps,
                                        const std::vector<uint64_t>& sample_counts,
                                        int repeats, uint64_t rng_seed);

/// CSV with columns `N,mean_abs_diff,mean_time_mc_sec,time_exact_sec`.
void save_mc_report_csv(const McComparisonReport& report, const std::string& path,
                        const std::string& comment = "");

}  // namespace hyperradon
