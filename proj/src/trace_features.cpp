#include "trace_features.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "errors.hpp"

namespace hyperradon {

namespace {

constexpr int T = 0;
constexpr int TH1 = 1;
constexpr int TH2 = 2;

std::vector<ExtractorSpec> build_table() {
    std::vector<ExtractorSpec> specs;
    auto add = [&](std::array<int, 3> axes, std::initializer_list<std::array<int, 3>> triples) {
        for (const auto& t : triples) {
            specs.push_back({axes, t});
        }
    };
    // Column (t, th1, th2): 17 triples.
    add({T, TH1, TH2}, {{1, 1, 1}, {1, 1, 2}, {1, 1, 4}, {1, 2, 1}, {1, 3, 1}, {1, 3, 4},
                        {1, 4, 1}, {1, 4, 2}, {2, 1, 1}, {2, 1, 4}, {2, 3, 4}, {2, 4, 1},
                        {2, 4, 2}, {3, 1, 2}, {3, 1, 4}, {3, 2, 1}, {3, 4, 1}});
    // Column (t, th2, th1): 16 triples.
    add({T, TH2, TH1}, {{1, 1, 2}, {1, 1, 3}, {1, 1, 4}, {1, 2, 1}, {1, 2, 4}, {1, 4, 1},
                        {1, 4, 3}, {2, 1, 1}, {2, 1, 3}, {2, 1, 4}, {2, 2, 2}, {2, 4, 1},
                        {2, 4, 3}, {3, 1, 1}, {3, 2, 4}, {3, 4, 4}});
    // Column (th2, t, th1): 10 triples.
    add({TH2, T, TH1}, {{1, 1, 4}, {1, 2, 1}, {1, 2, 4}, {2, 1, 1}, {2, 2, 1}, {3, 1, 1},
                        {3, 1, 2}, {3, 1, 4}, {3, 2, 4}, {3, 3, 4}});
    // Column (th1, t, th2): 8 triples.
    add({TH1, T, TH2}, {{1, 1, 4}, {1, 2, 1}, {1, 3, 1}, {1, 3, 2}, {2, 1, 1}, {2, 2, 1},
                        {3, 1, 1}, {3, 2, 1}});
    return specs;
}

}  // namespace

std::string ExtractorSpec::label() const {
    static const char* names[3] = {"t", "th1", "th2"};
    std::string s;
    for (int i = 0; i < 3; ++i) {
        s += names[axes[static_cast<size_t>(i)]];
        s += i == 2 ? ':' : ',';
    }
    for (int i = 0; i < 3; ++i) {
        s += 'F';
        s += static_cast<char>('0' + functionals[static_cast<size_t>(i)]);
    }
    return s;
}

double functional(int index, std::span<const double> g) {
    if (g.empty()) {
        throw std::invalid_argument("functional: empty input");
    }
    switch (index) {
        case 1:
            return *std::max_element(g.begin(), g.end());
        case 2: {
            double tv = 0.0;
            for (size_t i = 0; i + 1 < g.size(); ++i) {
                tv += 0.5 * std::abs(g[i + 1] - g[i]);
            }
            return tv;
        }
        case 3: {
            double s = 0.0;
            for (double v : g) {
                s += v;
            }
            return s;
        }
        case 4: {
            const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
            return *hi - *lo;
        }
        default:
            throw std::invalid_argument("functional: index must be in 1..4");
    }
}

const std::vector<ExtractorSpec>& extractor_table() {
    static const std::vector<ExtractorSpec> table = build_table();
    return table;
}

std::vector<double> extract_features(const SinogramTensor3& tensor) {
    const int dims[3] = {tensor.d1(), tensor.d2(), tensor.d3()};
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1 ||
        tensor.values.size() != static_cast<size_t>(dims[0]) * static_cast<size_t>(dims[1]) *
                                    static_cast<size_t>(dims[2])) {
        throw std::invalid_argument("extract_features: tensor shape mismatch");
    }
    std::vector<double> features;
    features.reserve(extractor_table().size());

    std::vector<double> vec;
    std::vector<double> stage1;
    std::vector<double> stage2;
    for (const auto& spec : extractor_table()) {
        const int a0 = spec.axes[0];
        const int a1 = spec.axes[1];
        const int a2 = spec.axes[2];
        const int n0 = dims[a0];
        const int n1 = dims[a1];
        const int n2 = dims[a2];

        // Reduce the first permuted axis, leaving a (n1 x n2) array.
        stage1.assign(static_cast<size_t>(n1) * static_cast<size_t>(n2), 0.0);
        int idx[3];
        for (int i1 = 0; i1 < n1; ++i1) {
            for (int i2 = 0; i2 < n2; ++i2) {
                vec.resize(static_cast<size_t>(n0));
                for (int i0 = 0; i0 < n0; ++i0) {
                    idx[a0] = i0;
                    idx[a1] = i1;
                    idx[a2] = i2;
                    vec[static_cast<size_t>(i0)] = tensor.at(idx[0], idx[1], idx[2]);
                }
                stage1[static_cast<size_t>(i1) * static_cast<size_t>(n2) +
                       static_cast<size_t>(i2)] = functional(spec.functionals[0], vec);
            }
        }
        // Reduce the second permuted axis.
        stage2.assign(static_cast<size_t>(n2), 0.0);
        for (int i2 = 0; i2 < n2; ++i2) {
            vec.resize(static_cast<size_t>(n1));
            for (int i1 = 0; i1 < n1; ++i1) {
                vec[static_cast<size_t>(i1)] =
                    stage1[static_cast<size_t>(i1) * static_cast<size_t>(n2) +
                           static_cast<size_t>(i2)];
            }
            stage2[static_cast<size_t>(i2)] = functional(spec.functionals[1], vec);
        }
        features.push_back(functional(spec.functionals[2], stage2));
    }
    return features;
}

SinogramTensor3 trace_sinogram_tensor(const VoxelImage& image,
                                      const std::vector<double>& radii, int n1, int n2,
                                      std::optional<double> eps) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("trace_sinogram_tensor: grid counts must be >= 1");
    }
    const DirectionSet grid = spherical_grid(n1, n2);
    const Sinogram sino = compute_sinogram(image, grid, radii, eps);

    // Unique-direction index for grid cell (i, j); pole rings collapse.
    auto unique_index = [&](int i, int j) -> int {
        if (j == 0) {
            return 0;
        }
        if (n2 > 1 && j == n2 - 1) {
            return 1 + (n2 - 2) * n1;
        }
        return 1 + (j - 1) * n1 + i;
    };

    SinogramTensor3 tensor;
    tensor.t_grid = radii;
    tensor.theta1_grid.resize(static_cast<size_t>(n1));
    for (int i = 0; i < n1; ++i) {
        tensor.theta1_grid[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * i / n1;
    }
    tensor.theta2_grid.resize(static_cast<size_t>(n2));
    for (int j = 0; j < n2; ++j) {
        tensor.theta2_grid[static_cast<size_t>(j)] =
            n2 == 1 ? 0.0 : std::numbers::pi * j / (n2 - 1);
    }
    const size_t n_t = radii.size();
    tensor.values.resize(n_t * static_cast<size_t>(n1) * static_cast<size_t>(n2));
    for (size_t it = 0; it < n_t; ++it) {
        for (int i = 0; i < n1; ++i) {
            for (int j = 0; j < n2; ++j) {
                tensor.values[(it * static_cast<size_t>(n1) + static_cast<size_t>(i)) *
                                  static_cast<size_t>(n2) +
                              static_cast<size_t>(j)] =
                    sino.at(unique_index(i, j), static_cast<int>(it));
            }
        }
    }
    return tensor;
}

void save_features_csv(const std::vector<int>& sample_ids,
                       const std::vector<std::vector<double>>& features,
                       const std::string& path, const std::string& comment) {
    if (sample_ids.size() != features.size()) {
        throw std::invalid_argument("save_features_csv: id/feature count mismatch");
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("features CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "sample_id");
    const size_t n_feat = features.empty() ? 0 : features.front().size();
    for (size_t i = 1; i <= n_feat; ++i) {
        std::fprintf(f, ",f%zu", i);
    }
    std::fprintf(f, "\n");
    for (size_t r = 0; r < features.size(); ++r) {
        std::fprintf(f, "%d", sample_ids[r]);
        for (double v : features[r]) {
            std::fprintf(f, ",%.17g", v);
        }
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace hyperradon
