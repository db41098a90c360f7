#include "voxel.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hyperradon {

namespace {

void check_grid(const VoxelImage& F, const Direction& theta) {
    if (F.dim() != theta.dim()) {
        throw std::invalid_argument("discrete_radon: image/direction dimension mismatch");
    }
}

// Walks all voxels in lexicographic order (last axis fastest) and hands the
// callback the flat index and the projection s<n, theta>. The last axis is
// restricted to a conservative index band around the target window when a
// band is requested; the caller still applies its exact window predicate.
template <typename Fn>
void for_each_voxel(const VoxelImage& F, const Direction& theta,
                    double center, double window, bool band, Fn&& fn) {
    const int d = F.dim();
    const auto& ext = F.extents();
    const double s = F.voxel_size();
    std::vector<int> idx(static_cast<size_t>(d), 0);
    std::vector<double> partial(static_cast<size_t>(d) + 1, 0.0);
    const double theta_last = theta[d - 1];
    const int n_last = ext[static_cast<size_t>(d - 1)];
    size_t flat = 0;
    const size_t stride = static_cast<size_t>(n_last);

    auto axis_term = [&](int axis, int j) {
        return s * F.grid_index(axis, j) * theta[axis];
    };

    for (int i = 0; i < d - 1; ++i) {
        partial[static_cast<size_t>(i + 1)] = partial[static_cast<size_t>(i)] + axis_term(i, 0);
    }

    while (true) {
        const double base = partial[static_cast<size_t>(d - 1)];
        int j0 = 0;
        int j1 = n_last;
        if (band && theta_last != 0.0) {
            // Solve |base + s*n_last(j)*theta_last - center| <= window for j,
            // widened by one index so float rounding cannot drop a voxel.
            const double off = 0.5 * (n_last - 1);
            const double lo = (center - window - base) / (s * theta_last) + off;
            const double hi = (center + window - base) / (s * theta_last) + off;
            const double a = std::min(lo, hi);
            const double b = std::max(lo, hi);
            j0 = std::max(0, static_cast<int>(std::floor(a)) - 1);
            j1 = std::min(n_last, static_cast<int>(std::ceil(b)) + 2);
            if (j0 >= j1) {
                j0 = j1 = 0;
            }
        } else if (band && theta_last == 0.0) {
            if (std::abs(base - center) > window) {
                j0 = j1 = 0;
            }
        }
        for (int j = j0; j < j1; ++j) {
            fn(flat + static_cast<size_t>(j), base + axis_term(d - 1, j));
        }
        // Odometer step over the leading d-1 axes.
        int axis = d - 2;
        while (axis >= 0) {
            if (++idx[static_cast<size_t>(axis)] < ext[static_cast<size_t>(axis)]) {
                break;
            }
            idx[static_cast<size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) {
            break;
        }
        for (int i = axis; i < d - 1; ++i) {
            partial[static_cast<size_t>(i + 1)] =
                partial[static_cast<size_t>(i)] + axis_term(i, idx[static_cast<size_t>(i)]);
        }
        flat = 0;
        for (int i = 0; i < d - 1; ++i) {
            flat = (flat + static_cast<size_t>(idx[static_cast<size_t>(i)])) *
                   static_cast<size_t>(ext[static_cast<size_t>(i + 1)]);
        }
        (void)stride;
    }
}

HalfWidths voxel_halfwidths(const VoxelImage& F) {
    return HalfWidths(std::vector<double>(static_cast<size_t>(F.dim()), 0.5 * F.voxel_size()));
}

void write_u32(std::ofstream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ofstream& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw ParseError("RVOX: truncated file " + path);
    }
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

double read_f64(std::ifstream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) {
        throw ParseError("RVOX: truncated file " + path);
    }
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<uint64_t>(b[i]) << (8 * i);
    }
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

VoxelImage::VoxelImage(std::vector<int> extents, double voxel_size,
                       std::vector<double> values)
    : extents_(std::move(extents)), voxel_size_(voxel_size), values_(std::move(values)) {
    if (extents_.empty()) {
        throw std::invalid_argument("VoxelImage: dimension must be >= 1");
    }
    size_t n = 1;
    for (int e : extents_) {
        if (e < 1) {
            throw std::invalid_argument("VoxelImage: extents must be >= 1");
        }
        n *= static_cast<size_t>(e);
    }
    if (values_.size() != n) {
        throw std::invalid_argument("VoxelImage: value count does not match extents");
    }
    if (!(voxel_size_ > 0.0)) {
        throw std::invalid_argument("VoxelImage: voxel size must be positive");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("VoxelImage: values must be finite");
        }
    }
}

VoxelImage VoxelImage::zeros(std::vector<int> extents, double voxel_size) {
    size_t n = 1;
    for (int e : extents) {
        if (e < 1) {
            throw std::invalid_argument("VoxelImage: extents must be >= 1");
        }
        n *= static_cast<size_t>(e);
    }
    return VoxelImage(std::move(extents), voxel_size, std::vector<double>(n, 0.0));
}

size_t VoxelImage::flat_index(const std::vector<int>& idx) const {
    size_t flat = 0;
    for (int i = 0; i < dim(); ++i) {
        flat = flat * static_cast<size_t>(extents_[static_cast<size_t>(i)]) +
               static_cast<size_t>(idx[static_cast<size_t>(i)]);
    }
    return flat;
}

double VoxelImage::sum() const {
    double s = 0.0;
    for (double v : values_) {
        s += v;
    }
    return s;
}

std::vector<double> Sinogram::row(int i) const {
    const auto begin = values.begin() + static_cast<ptrdiff_t>(i) *
                                            static_cast<ptrdiff_t>(radii.size());
    return std::vector<double>(begin, begin + static_cast<ptrdiff_t>(radii.size()));
}

double discrete_radon(const VoxelImage& F, const Direction& theta, double t, bool prune) {
    check_grid(F, theta);
    const CubeSection cell(voxel_halfwidths(F), theta);
    const double window = 0.5 * F.voxel_size() * std::sqrt(static_cast<double>(F.dim()));
    const auto& vals = F.values();
    double sum = 0.0;
    for_each_voxel(F, theta, t, window, prune, [&](size_t flat, double proj) {
        const double v = vals[flat];
        if (v == 0.0) {
            return;
        }
        const double tau = t - proj;
        if (prune && std::abs(tau) > window) {
            return;
        }
        sum += v * cell.area(tau);
    });
    return sum;
}

double discrete_radon_regularized(const VoxelImage& F, const Direction& theta,
                                  double t, double eps, bool prune) {
    check_grid(F, theta);
    if (!(eps > 0.0)) {
        throw std::invalid_argument("discrete_radon_regularized: eps must be positive");
    }
    const CubeSection cell(voxel_halfwidths(F), theta);
    const double window =
        0.5 * F.voxel_size() * std::sqrt(static_cast<double>(F.dim())) + eps;
    const auto& vals = F.values();
    double sum = 0.0;
    for_each_voxel(F, theta, t, window, prune, [&](size_t flat, double proj) {
        const double v = vals[flat];
        if (v == 0.0) {
            return;
        }
        const double tau = t - proj;
        if (prune && std::abs(tau) > window) {
            return;
        }
        sum += v * cell.area_regularized(tau, eps);
    });
    return sum;
}

double discrete_radon_slab(const VoxelImage& F, const Direction& theta,
                           double t1, double t2) {
    check_grid(F, theta);
    if (!(t1 < t2)) {
        throw std::invalid_argument("discrete_radon_slab: requires t1 < t2");
    }
    const CubeSection cell(voxel_halfwidths(F), theta);
    const auto& vals = F.values();
    double sum = 0.0;
    for_each_voxel(F, theta, 0.0, 0.0, false, [&](size_t flat, double proj) {
        const double v = vals[flat];
        if (v == 0.0) {
            return;
        }
        sum += v * cell.slab_volume(t1 - proj, t2 - proj);
    });
    return sum;
}

Sinogram compute_sinogram(const VoxelImage& F, const DirectionSet& directions,
                          std::vector<double> radii, std::optional<double> eps) {
    if (directions.count() == 0) {
        throw std::invalid_argument("compute_sinogram: empty direction set");
    }
    if (radii.empty()) {
        throw std::invalid_argument("compute_sinogram: empty radius grid");
    }
    if (!std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("compute_sinogram: radii must be sorted ascending");
    }
    if (directions.dim != F.dim()) {
        throw std::invalid_argument("compute_sinogram: image/direction dimension mismatch");
    }
    if (eps && !(*eps > 0.0)) {
        throw std::invalid_argument("compute_sinogram: eps must be positive");
    }

    Sinogram sino;
    sino.directions = directions;
    sino.radii = std::move(radii);
    const size_t n_r = sino.radii.size();
    sino.values.assign(static_cast<size_t>(directions.count()) * n_r, 0.0);
    const auto& vals = F.values();
    const double diag = 0.5 * F.voxel_size() * std::sqrt(static_cast<double>(F.dim()));
    const double window = eps ? diag + *eps : diag;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < directions.count(); ++i) {
        const Direction& theta = directions.points[static_cast<size_t>(i)];
        const CubeSection cell(voxel_halfwidths(F), theta);
        double* row = sino.values.data() + static_cast<size_t>(i) * n_r;
        const double* r0 = sino.radii.data();
        const double* r1 = r0 + n_r;
        // Voxel-driven accumulation: every radius cell receives its voxel
        // contributions in lexicographic voxel order, matching the scalar
        // operations bit for bit.
        for_each_voxel(F, theta, 0.0, 0.0, false, [&](size_t flat, double proj) {
            const double v = vals[flat];
            if (v == 0.0) {
                return;
            }
            const double* lo = std::lower_bound(r0, r1, proj - window);
            if (lo != r0) {
                --lo;
            }
            for (const double* r = lo; r != r1; ++r) {
                const double tau = *r - proj;
                if (tau > window) {
                    break;
                }
                if (std::abs(tau) > window) {
                    continue;
                }
                const size_t j = static_cast<size_t>(r - r0);
                row[j] += v * (eps ? cell.area_regularized(tau, *eps) : cell.area(tau));
            }
        });
    }
    return sino;
}

std::vector<double> binned_radon(const VoxelImage& F, const Direction& theta,
                                 const std::vector<double>& radii, double bin_halfwidth) {
    check_grid(F, theta);
    if (!(bin_halfwidth > 0.0)) {
        throw std::invalid_argument("binned_radon: bin half-width must be positive");
    }
    const double scale =
        std::pow(F.voxel_size(), F.dim()) / (2.0 * bin_halfwidth);
    std::vector<double> out(radii.size(), 0.0);
    const auto& vals = F.values();
    const double* r0 = radii.data();
    const double* r1 = r0 + radii.size();
    for_each_voxel(F, theta, 0.0, 0.0, false, [&](size_t flat, double proj) {
        const double v = vals[flat];
        if (v == 0.0) {
            return;
        }
        const double* lo = std::lower_bound(r0, r1, proj - bin_halfwidth);
        for (const double* r = lo; r != r1 && *r - proj < bin_halfwidth; ++r) {
            if (std::abs(proj - *r) < bin_halfwidth) {
                out[static_cast<size_t>(r - r0)] += v * scale;
            }
        }
    });
    return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) {
        throw std::invalid_argument("linspace: count must be >= 1");
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

std::vector<double> default_radius_grid(const VoxelImage& F, int count) {
    const int max_extent = *std::max_element(F.extents().begin(), F.extents().end());
    const double r = F.voxel_size() * std::sqrt(static_cast<double>(F.dim())) *
                     max_extent / 2.0;
    return linspace(-r, r, count);
}

double default_regularization_eps(const std::vector<double>& radii) {
    if (radii.size() < 2) {
        throw std::invalid_argument("default_regularization_eps: need >= 2 radii");
    }
    return 0.5 * (radii[1] - radii[0]);
}

void save_rvox(const VoxelImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("RVOX: cannot open for writing: " + path);
    }
    out.write("RVOX", 4);
    write_u32(out, 1);
    write_u32(out, static_cast<uint32_t>(image.dim()));
    for (int e : image.extents()) {
        write_u32(out, static_cast<uint32_t>(e));
    }
    write_f64(out, image.voxel_size());
    for (double v : image.values()) {
        write_f64(out, v);
    }
    if (!out) {
        throw IoError("RVOX: write failed: " + path);
    }
}

VoxelImage load_rvox(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("RVOX: cannot open: " + path);
    }
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "RVOX", 4) != 0) {
        throw ParseError("RVOX: bad magic in " + path);
    }
    const uint32_t version = read_u32(in, path);
    if (version != 1) {
        throw ParseError("RVOX: unsupported version in " + path);
    }
    const uint32_t d = read_u32(in, path);
    if (d < 1 || d > 16) {
        throw ParseError("RVOX: implausible dimension in " + path);
    }
    std::vector<int> extents(d);
    size_t n = 1;
    for (uint32_t i = 0; i < d; ++i) {
        const uint32_t e = read_u32(in, path);
        if (e < 1 || e > (1u << 24)) {
            throw ParseError("RVOX: implausible extent in " + path);
        }
        extents[i] = static_cast<int>(e);
        n *= e;
    }
    const double s = read_f64(in, path);
    std::vector<double> values(n);
    for (size_t i = 0; i < n; ++i) {
        values[i] = read_f64(in, path);
    }
    return VoxelImage(std::move(extents), s, std::move(values));
}

void save_sinogram_csv(const Sinogram& sinogram, const std::string& path,
                       const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("sinogram CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "theta_index,t,value\n");
    for (int i = 0; i < sinogram.num_directions(); ++i) {
        for (int j = 0; j < sinogram.num_radii(); ++j) {
            std::fprintf(f, "%d,%.17g,%.17g\n", i, sinogram.radii[static_cast<size_t>(j)],
                         sinogram.at(i, j));
        }
    }
    std::fclose(f);
}

}  // namespace hyperradon
