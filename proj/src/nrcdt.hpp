#pragma once

#include <vector>

#include "voxel.hpp"

namespace hyperradon {

/// Normalized cumulative distribution sampled on a sorted grid;
/// nondecreasing with final value 1.
struct DiscreteCDF {
    std::vector<double> t_grid;
    std::vector<double> cdf;
};

/// Quantile values on an equispaced xi grid in (0, 1); nondecreasing.
struct QuantileProfile {
    std::vector<double> xi_grid;
    std::vector<double> values;
};

/// L midpoints (2i - 1)/(2L), i = 1..L.
std::vector<double> default_xi_grid(int count);

/// Cumulative trapezoidal integral of a nonnegative projection, normalized
/// to total mass 1. Throws std::domain_error when the projection carries no
/// mass (degenerate direction).
DiscreteCDF cdf_from_projection(const std::vector<double>& radii,
                                const std::vector<double>& projection_values);

/// Generalized inverse: smallest grid point s with cdf(s) > xi, linearly
/// interpolated inside the crossing cell; `step` selects the literal
/// step-function inverse instead.
double quantile(const DiscreteCDF& cdf, double xi, bool step = false);

QuantileProfile quantile_profile(const DiscreteCDF& cdf, const std::vector<double>& xi_grid,
                                 bool step = false);

/// Quantile profile of one sinogram row standardized to mean 0 and
/// standard deviation 1 on the xi grid. Throws std::domain_error when the
/// projection is degenerate (no mass or vanishing spread).
QuantileProfile nrcdt(const Sinogram& sinogram, int direction_index,
                      const std::vector<double>& xi_grid);

/// Pointwise supremum of the per-direction profiles; degenerate directions
/// are skipped (their count is reported through skipped_directions).
QuantileProfile max_nrcdt(const Sinogram& sinogram, const std::vector<double>& xi_grid,
                          int* skipped_directions = nullptr);

/// CSV with header `xi,value`.
void save_profile_csv(const QuantileProfile& profile, const std::string& path,
                      const std::string& comment = "");

}  // namespace hyperradon
