#pragma once

#include <optional>
#include <string>
#include <vector>

#include "directions.hpp"
#include "geometry.hpp"

namespace hyperradon {

/// Values F(n) on the centered grid I_{N_1} x ... x I_{N_d} with voxel size
/// s > 0. Voxel n is the cube of side s centered at s*n; indices n are
/// half-integer for even extents. Storage is lexicographic with the last
/// axis fastest.
class VoxelImage {
public:
    VoxelImage(std::vector<int> extents, double voxel_size, std::vector<double> values);
    static VoxelImage zeros(std::vector<int> extents, double voxel_size);

    int dim() const { return static_cast<int>(extents_.size()); }
    const std::vector<int>& extents() const { return extents_; }
    double voxel_size() const { return voxel_size_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    size_t size() const { return values_.size(); }

    /// Centered grid index of array position j on the given axis,
    /// n = j - (N-1)/2 (half-integer for even N).
    double grid_index(int axis, int j) const {
        return j - 0.5 * (extents_[static_cast<size_t>(axis)] - 1);
    }
    /// Physical coordinate of the voxel center, s * n.
    double center_coord(int axis, int j) const { return voxel_size_ * grid_index(axis, j); }

    size_t flat_index(const std::vector<int>& idx) const;
    double sum() const;

private:
    std::vector<int> extents_;
    double voxel_size_;
    std::vector<double> values_;
};

/// Radon values sampled on (direction index, radius index).
struct Sinogram {
    DirectionSet directions;
    std::vector<double> radii;
    std::vector<double> values;  // row-major [directions x radii]

    int num_directions() const { return directions.count(); }
    int num_radii() const { return static_cast<int>(radii.size()); }
    double at(int i, int j) const {
        return values[static_cast<size_t>(i) * radii.size() + static_cast<size_t>(j)];
    }
    /// One direction's row of Radon values.
    std::vector<double> row(int i) const;
};

/// Exact discrete Radon transform sum_n F(n) A(t - s<n,theta>) with the
/// per-voxel cube section area. Summands outside the voxel diagonal window
/// s sqrt(d)/2 vanish and are skipped when prune is set.
double discrete_radon(const VoxelImage& F, const Direction& theta, double t,
                      bool prune = true);

/// Regularized variant with the slab average of half-width eps.
double discrete_radon_regularized(const VoxelImage& F, const Direction& theta,
                                  double t, double eps, bool prune = true);

/// Slab integral of the discrete transform over [t1, t2]; the full range
/// gives exactly s^d sum(F).
double discrete_radon_slab(const VoxelImage& F, const Direction& theta,
                           double t1, double t2);

/// Batch evaluation over a direction set and sorted radius grid. Rows are
/// computed independently per direction (parallel-safe); each cell
/// accumulates voxel contributions in fixed lexicographic order, so the
/// result is identical to the scalar operations and independent of the
/// thread count. eps engages the regularized transform.
Sinogram compute_sinogram(const VoxelImage& F, const DirectionSet& directions,
                          std::vector<double> radii,
                          std::optional<double> eps = std::nullopt);

/// Center-projection binning baseline: per radius t, the sum of F over
/// voxels with |s<n,theta> - t| < b, scaled by s^d/(2b) so the mass matches
/// the exact transform.
std::vector<double> binned_radon(const VoxelImage& F, const Direction& theta,
                                 const std::vector<double>& radii, double bin_halfwidth);

/// Default radius grid: count equispaced points over [-r, r] with
/// r = s sqrt(d) max(N)/2 (odd counts include t = 0).
std::vector<double> default_radius_grid(const VoxelImage& F, int count = 513);

/// Default regularization half-width: half the radius grid spacing.
double default_regularization_eps(const std::vector<double>& radii);

/// Equispaced grid helper, count points covering [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

// --- RVOX binary format and sinogram CSV ---

void save_rvox(const VoxelImage& image, const std::string& path);
VoxelImage load_rvox(const std::string& path);

/// CSV with header `theta_index,t,value`, one row per sinogram cell, floats
/// with 17 significant digits. A nonempty comment is written first as a
/// `# ...` line.
void save_sinogram_csv(const Sinogram& sinogram, const std::string& path,
                       const std::string& comment = "");

}  // namespace hyperradon
