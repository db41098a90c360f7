#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "voxel.hpp"

namespace hyperradon {

/// Radon values on the product grid (t, theta1, theta2); axis order of the
/// flat storage is t slowest, theta2 fastest.
struct SinogramTensor3 {
    std::vector<double> values;
    std::vector<double> t_grid;
    std::vector<double> theta1_grid;
    std::vector<double> theta2_grid;

    int d1() const { return static_cast<int>(t_grid.size()); }
    int d2() const { return static_cast<int>(theta1_grid.size()); }
    int d3() const { return static_cast<int>(theta2_grid.size()); }
    double at(int it, int i1, int i2) const {
        return values[(static_cast<size_t>(it) * theta1_grid.size() + static_cast<size_t>(i1)) *
                          theta2_grid.size() +
                      static_cast<size_t>(i2)];
    }
};

/// One feature extractor: the axis permutation (0 = t, 1 = theta1,
/// 2 = theta2, consumed in order) and the functional triple (values 1..4).
struct ExtractorSpec {
    std::array<int, 3> axes;
    std::array<int, 3> functionals;

    std::string label() const;
};

/// F1 = max, F2 = half total variation, F3 = sum, F4 = max - min.
double functional(int index, std::span<const double> g);

/// The 51 extractor specs in frozen column-major table order.
const std::vector<ExtractorSpec>& extractor_table();

/// Applies every extractor: the tensor axes are reordered to the spec's
/// permutation, then reduced left to right with the functional triple.
std::vector<double> extract_features(const SinogramTensor3& tensor);

/// Radon tensor of an image on the spherical-coordinate grid
/// (n1 azimuthal x n2 polar) and the given radii; pole rows are shared.
SinogramTensor3 trace_sinogram_tensor(const VoxelImage& image,
                                      const std::vector<double>& radii, int n1, int n2,
                                      std::optional<double> eps = std::nullopt);

/// CSV with header `sample_id,f1..f51`.
void save_features_csv(const std::vector<int>& sample_ids,
                       const std::vector<std::vector<double>>& features,
                       const std::string& path, const std::string& comment = "");

}  // namespace hyperradon
