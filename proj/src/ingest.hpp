#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "voxel.hpp"

namespace hyperradon {

struct TriangleMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 3>> faces;
};

/// Parse OFF text (optional "OFF" header, counts line, vertices, faces;
/// '#' comments). Polygon faces are fan-triangulated from the first vertex.
/// Errors carry the offending 1-based line number.
TriangleMesh parse_off(const std::string& text);
TriangleMesh load_off(const std::string& path);
std::string serialize_off(const TriangleMesh& mesh);

/// Rasterize the mesh into an N^3 grid spanning the unit box [-1/2, 1/2]^3
/// (voxel size 1/N); the mesh is scaled uniformly to fit with a 5% margin.
/// Surface voxels are found with a triangle-box separating-axis test; with
/// fill, interior voxels are added by parity counting along axis rays with
/// a majority vote over the three axes.
VoxelImage voxelize(const TriangleMesh& mesh, int n, bool fill);

enum class ShapeKind { solid_box, solid_sphere, hemisphere, shell };

struct ShapeParams {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> half_widths{0.0, 0.0, 0.0};  // solid_box
    double radius = 0.0;                               // sphere/hemisphere/shell
    double thickness = 0.0;                            // shell
    std::array<double, 3> axis{0.0, 0.0, 1.0};         // hemisphere flat-face normal
};

/// Membership-at-voxel-center rasterizer on the N^3 unit-box grid.
VoxelImage synth_shape(ShapeKind kind, const ShapeParams& params, int n);

/// Named experiment templates: "box", "ball", "lshape".
VoxelImage synth_template(const std::string& name, int n);

/// n/2 points uniform on [-1,-1/2]^d and n/2 on [1/2,1]^d.
std::vector<std::vector<double>> sample_two_cluster_cloud(int n, int d, uint64_t seed);

/// Invertible affine map x -> A x + y.
struct AffineMap {
    int dim = 0;
    std::vector<double> matrix;  // row-major d x d
    std::vector<double> shift;

    static AffineMap identity(int d);
    std::vector<double> apply(const std::vector<double>& x) const;
    double det() const;
    AffineMap inverse() const;
};

/// Image transported by the map: out(x) = in(A^{-1}(x - y)) with
/// nearest-neighbor lookup; out-of-grid samples are 0.
VoxelImage apply_affine_voxels(const VoxelImage& image, const AffineMap& map);

struct AffineRanges {
    double shear_max = 0.2;
    double scale_min = 0.7;
    double scale_max = 1.3;
    double shift_max = 0.1;  // absolute, 10% of the unit grid width
    bool rotate = true;

    static AffineRanges none() { return {0.0, 1.0, 1.0, 0.0, false}; }
};

/// A = R * Shear * Scale with R uniform on SO(d) (d in {2,3}), plus a
/// uniform shift; all draws come from the given seed in a fixed order.
AffineMap random_affine(int d, uint64_t seed, const AffineRanges& ranges = {});

/// Eigen-decomposition of a symmetric d x d matrix (row-major) by Jacobi
/// rotations; eigenvalues descending, eigenvectors as matching columns.
void symmetric_eigen(const std::vector<double>& m, int d,
                     std::vector<double>& eigenvalues, std::vector<double>& eigenvectors);

struct PreprocessInfo {
    bool rotation_skipped = false;  // covariance was rank deficient
};

/// Canonicalization chain: centroid to grid center, PCA alignment (principal
/// axis first, signs fixed by the third central moment), uniform rescale of
/// the occupied box into 95% of the grid, nearest-neighbor resampling, and
/// mass normalization so that s^d * sum(F) = 1.
VoxelImage preprocess(const VoxelImage& image, PreprocessInfo* info = nullptr);

/// Labeled dataset of affinely transformed template instances.
struct LabeledImages {
    std::vector<int> labels;
    std::vector<VoxelImage> images;
    std::vector<std::string> class_names;
};

/// Builds `instances` random affine transforms of each named template.
/// The default ranges are chosen so transformed shapes stay inside the grid.
LabeledImages make_affine_class_dataset(const std::vector<std::string>& templates,
                                        int instances, int n, uint64_t seed,
                                        const AffineRanges& ranges = {0.2, 0.8, 1.25, 0.05,
                                                                      true});

}  // namespace hyperradon
