#include "ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace hyperradon {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw ParseError("OFF parse error at line " + std::to_string(line) + ": " + msg);
}

// Separating-axis overlap test between a triangle and an axis-aligned cube
// centered at c with half extent h. Degenerate triangles (zero normal) fall
// back to the edge-axis tests, which are complete for segments.
bool tri_box_overlap(const Vec3& c, double h, const Vec3& p0, const Vec3& p1,
                     const Vec3& p2) {
    const Vec3 v0 = sub(p0, c);
    const Vec3 v1 = sub(p1, c);
    const Vec3 v2 = sub(p2, c);

    for (int i = 0; i < 3; ++i) {
        const double lo = std::min({v0[i], v1[i], v2[i]});
        const double hi = std::max({v0[i], v1[i], v2[i]});
        if (lo > h || hi < -h) {
            return false;
        }
    }

    const Vec3 f0 = sub(v1, v0);
    const Vec3 f1 = sub(v2, v1);
    const Vec3 f2 = sub(v0, v2);

    const Vec3 n = cross(f0, f1);
    if (n[0] != 0.0 || n[1] != 0.0 || n[2] != 0.0) {
        const double d = dot(n, v0);
        const double r = h * (std::abs(n[0]) + std::abs(n[1]) + std::abs(n[2]));
        if (d > r || d < -r) {
            return false;
        }
    }

    const Vec3 edges[3] = {f0, f1, f2};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Vec3 axis{0.0, 0.0, 0.0};
            // axis = e_i x edge_j
            axis[(i + 1) % 3] = -edges[j][(i + 2) % 3];
            axis[(i + 2) % 3] = edges[j][(i + 1) % 3];
            const double q0 = dot(axis, v0);
            const double q1 = dot(axis, v1);
            const double q2 = dot(axis, v2);
            const double lo = std::min({q0, q1, q2});
            const double hi = std::max({q0, q1, q2});
            const double r = h * (std::abs(axis[0]) + std::abs(axis[1]) + std::abs(axis[2]));
            if (lo > r || hi < -r) {
                return false;
            }
        }
    }
    return true;
}

// Ray-crossing parities along one axis for every voxel column; votes[flat]
// is incremented for voxels an odd crossing count marks as interior. Ray
// origins are jittered off the lattice so shared mesh edges are not hit
// exactly.
void fill_votes_axis(const std::vector<std::array<double, 3>>& verts,
                     const std::vector<std::array<int, 3>>& faces, int n, double s,
                     int axis, std::vector<int>& votes) {
    const int u_axis = (axis + 1) % 3;
    const int v_axis = (axis + 2) % 3;
    const double ju = 1.23456789e-4 * s;
    const double jv = 0.98765432e-4 * s;
    auto center = [&](int j) { return s * (j - 0.5 * (n - 1)); };

    std::vector<std::vector<double>> crossings(static_cast<size_t>(n) * static_cast<size_t>(n));
    for (const auto& f : faces) {
        const Vec3& a = verts[static_cast<size_t>(f[0])];
        const Vec3& b = verts[static_cast<size_t>(f[1])];
        const Vec3& c = verts[static_cast<size_t>(f[2])];
        // Project onto the (u, v) plane and find covered columns.
        const double au = a[u_axis], av = a[v_axis];
        const double bu = b[u_axis], bv = b[v_axis];
        const double cu = c[u_axis], cv = c[v_axis];
        const double area2 = (bu - au) * (cv - av) - (cu - au) * (bv - av);
        if (area2 == 0.0) {
            continue;  // ray parallel to the triangle plane (grazing)
        }
        auto to_index = [&](double w) { return w / s + 0.5 * (n - 1); };
        const int iu0 = std::max(0, static_cast<int>(std::floor(to_index(std::min({au, bu, cu})))));
        const int iu1 = std::min(n - 1, static_cast<int>(std::ceil(to_index(std::max({au, bu, cu})))));
        const int iv0 = std::max(0, static_cast<int>(std::floor(to_index(std::min({av, bv, cv})))));
        const int iv1 = std::min(n - 1, static_cast<int>(std::ceil(to_index(std::max({av, bv, cv})))));
        for (int iu = iu0; iu <= iu1; ++iu) {
            for (int iv = iv0; iv <= iv1; ++iv) {
                const double pu = center(iu) + ju;
                const double pv = center(iv) + jv;
                // Barycentric coordinates of (pu, pv) in the projected triangle.
                const double w0 = ((bu - pu) * (cv - pv) - (cu - pu) * (bv - pv)) / area2;
                const double w1 = ((cu - pu) * (av - pv) - (au - pu) * (cv - pv)) / area2;
                const double w2 = 1.0 - w0 - w1;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) {
                    continue;
                }
                const double x = w0 * a[axis] + w1 * b[axis] + w2 * c[axis];
                crossings[static_cast<size_t>(iu) * static_cast<size_t>(n) +
                          static_cast<size_t>(iv)]
                    .push_back(x);
            }
        }
    }

    std::vector<int> idx(3, 0);
    for (int iu = 0; iu < n; ++iu) {
        for (int iv = 0; iv < n; ++iv) {
            auto& xs = crossings[static_cast<size_t>(iu) * static_cast<size_t>(n) +
                                 static_cast<size_t>(iv)];
            if (xs.empty()) {
                continue;
            }
            std::sort(xs.begin(), xs.end());
            for (int j = 0; j < n; ++j) {
                const double x = center(j);
                const auto behind = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
                if (behind & 1) {
                    idx[static_cast<size_t>(axis)] = j;
                    idx[static_cast<size_t>(u_axis)] = iu;
                    idx[static_cast<size_t>(v_axis)] = iv;
                    const size_t flat =
                        (static_cast<size_t>(idx[0]) * static_cast<size_t>(n) +
                         static_cast<size_t>(idx[1])) *
                            static_cast<size_t>(n) +
                        static_cast<size_t>(idx[2]);
                    ++votes[flat];
                }
            }
        }
    }
}

std::vector<double> mat_vec(const std::vector<double>& m, int d, const std::vector<double>& x) {
    std::vector<double> y(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            y[static_cast<size_t>(i)] +=
                m[static_cast<size_t>(i * d + j)] * x[static_cast<size_t>(j)];
        }
    }
    return y;
}

std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b, int d) {
    std::vector<double> c(static_cast<size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const double aik = a[static_cast<size_t>(i * d + k)];
            for (int j = 0; j < d; ++j) {
                c[static_cast<size_t>(i * d + j)] += aik * b[static_cast<size_t>(k * d + j)];
            }
        }
    }
    return c;
}

// Gauss-Jordan with partial pivoting; throws on singular input.
std::vector<double> mat_inverse(std::vector<double> m, int d) {
    std::vector<double> inv(static_cast<size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i) {
        inv[static_cast<size_t>(i * d + i)] = 1.0;
    }
    for (int col = 0; col < d; ++col) {
        int pivot = col;
        for (int r = col + 1; r < d; ++r) {
            if (std::abs(m[static_cast<size_t>(r * d + col)]) >
                std::abs(m[static_cast<size_t>(pivot * d + col)])) {
                pivot = r;
            }
        }
        if (std::abs(m[static_cast<size_t>(pivot * d + col)]) < 1e-14) {
            throw std::invalid_argument("AffineMap: singular matrix");
        }
        if (pivot != col) {
            for (int j = 0; j < d; ++j) {
                std::swap(m[static_cast<size_t>(col * d + j)], m[static_cast<size_t>(pivot * d + j)]);
                std::swap(inv[static_cast<size_t>(col * d + j)],
                          inv[static_cast<size_t>(pivot * d + j)]);
            }
        }
        const double p = m[static_cast<size_t>(col * d + col)];
        for (int j = 0; j < d; ++j) {
            m[static_cast<size_t>(col * d + j)] /= p;
            inv[static_cast<size_t>(col * d + j)] /= p;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) {
                continue;
            }
            const double f = m[static_cast<size_t>(r * d + col)];
            if (f == 0.0) {
                continue;
            }
            for (int j = 0; j < d; ++j) {
                m[static_cast<size_t>(r * d + j)] -= f * m[static_cast<size_t>(col * d + j)];
                inv[static_cast<size_t>(r * d + j)] -= f * inv[static_cast<size_t>(col * d + j)];
            }
        }
    }
    return inv;
}

}  // namespace

TriangleMesh parse_off(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;  // (line number, content)
    {
        std::istringstream in(text);
        std::string line;
        int num = 0;
        while (std::getline(in, line)) {
            ++num;
            const auto hash = line.find('#');
            if (hash != std::string::npos) {
                line.erase(hash);
            }
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            lines.emplace_back(num, line);
        }
    }
    size_t cursor = 0;
    const int eof_line = lines.empty() ? 1 : lines.back().first + 1;
    auto next_line = [&](const char* what) -> std::pair<int, std::istringstream> {
        if (cursor >= lines.size()) {
            parse_fail(eof_line, std::string("missing ") + what);
        }
        auto& [num, content] = lines[cursor++];
        return {num, std::istringstream(content)};
    };

    if (lines.empty()) {
        parse_fail(1, "empty input");
    }

    // Header: either a bare "OFF" line, or "OFF nv nf ne" combined.
    long nv = -1, nf = -1, ne = 0;
    {
        auto [num, stream] = next_line("header");
        std::string tok;
        stream >> tok;
        if (tok == "OFF") {
            if (stream >> nv) {
                if (!(stream >> nf)) {
                    parse_fail(num, "malformed counts");
                }
                stream >> ne;
            }
        } else {
            std::istringstream retry(tok);
            if (!(retry >> nv)) {
                parse_fail(num, "expected OFF header or counts");
            }
            if (!(stream >> nf)) {
                parse_fail(num, "malformed counts");
            }
            stream >> ne;
        }
    }
    if (nv < 0) {
        auto [num, stream] = next_line("counts line");
        if (!(stream >> nv >> nf)) {
            parse_fail(num, "malformed counts");
        }
        stream >> ne;
    }
    if (nv < 0 || nf < 0) {
        parse_fail(lines[cursor - 1].first, "negative counts");
    }

    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        auto [num, stream] = next_line("vertex line");
        Vec3 v{};
        if (!(stream >> v[0] >> v[1] >> v[2])) {
            parse_fail(num, "non-numeric vertex");
        }
        mesh.vertices.push_back(v);
    }
    for (long i = 0; i < nf; ++i) {
        auto [num, stream] = next_line("face line");
        long k = 0;
        if (!(stream >> k) || k < 3) {
            parse_fail(num, "bad face vertex count");
        }
        std::vector<int> poly;
        poly.reserve(static_cast<size_t>(k));
        for (long j = 0; j < k; ++j) {
            long idx = 0;
            if (!(stream >> idx)) {
                parse_fail(num, "non-numeric face index");
            }
            if (idx < 0 || idx >= nv) {
                parse_fail(num, "vertex index out of range");
            }
            poly.push_back(static_cast<int>(idx));
        }
        for (size_t j = 1; j + 1 < poly.size(); ++j) {
            mesh.faces.push_back({poly[0], poly[j], poly[j + 1]});
        }
    }
    return mesh;
}

TriangleMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("OFF: cannot open: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_off(buf.str());
}

std::string serialize_off(const TriangleMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const auto& v : mesh.vertices) {
        out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
    for (const auto& f : mesh.faces) {
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
    return out.str();
}

VoxelImage voxelize(const TriangleMesh& mesh, int n, bool fill) {
    if (n < 2) {
        throw std::invalid_argument("voxelize: grid size must be >= 2");
    }
    if (mesh.faces.empty()) {
        throw std::invalid_argument("voxelize: mesh has no faces");
    }
    const double s = 1.0 / n;

    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};
    for (const auto& v : mesh.vertices) {
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
    const double scale = extent > 0.0 ? 0.95 / extent : 1.0;
    std::vector<Vec3> verts(mesh.vertices.size());
    for (size_t i = 0; i < verts.size(); ++i) {
        for (int j = 0; j < 3; ++j) {
            verts[i][j] = (mesh.vertices[i][j] - 0.5 * (lo[j] + hi[j])) * scale;
        }
    }

    VoxelImage image = VoxelImage::zeros({n, n, n}, s);
    auto& vals = image.values();
    auto clamp_index = [&](double w) {
        return std::clamp(static_cast<int>(std::floor(w / s + 0.5 * n)), 0, n - 1);
    };
    for (const auto& f : mesh.faces) {
        const Vec3& a = verts[static_cast<size_t>(f[0])];
        const Vec3& b = verts[static_cast<size_t>(f[1])];
        const Vec3& c = verts[static_cast<size_t>(f[2])];
        int i0[3], i1[3];
        for (int ax = 0; ax < 3; ++ax) {
            i0[ax] = clamp_index(std::min({a[ax], b[ax], c[ax]}) - 0.5 * s);
            i1[ax] = clamp_index(std::max({a[ax], b[ax], c[ax]}) + 0.5 * s);
        }
        for (int ix = i0[0]; ix <= i1[0]; ++ix) {
            for (int iy = i0[1]; iy <= i1[1]; ++iy) {
                for (int iz = i0[2]; iz <= i1[2]; ++iz) {
                    const size_t flat = (static_cast<size_t>(ix) * static_cast<size_t>(n) +
                                         static_cast<size_t>(iy)) *
                                            static_cast<size_t>(n) +
                                        static_cast<size_t>(iz);
                    if (vals[flat] != 0.0) {
                        continue;
                    }
                    const Vec3 center{image.center_coord(0, ix), image.center_coord(1, iy),
                                      image.center_coord(2, iz)};
                    if (tri_box_overlap(center, 0.5 * s, a, b, c)) {
                        vals[flat] = 1.0;
                    }
                }
            }
        }
    }

    if (fill) {
        std::vector<int> votes(vals.size(), 0);
        for (int axis = 0; axis < 3; ++axis) {
            fill_votes_axis(verts, mesh.faces, n, s, axis, votes);
        }
        for (size_t i = 0; i < vals.size(); ++i) {
            if (votes[i] >= 2) {
                vals[i] = 1.0;
            }
        }
    }
    return image;
}

VoxelImage synth_shape(ShapeKind kind, const ShapeParams& params, int n) {
    if (n < 2) {
        throw std::invalid_argument("synth_shape: grid size must be >= 2");
    }
    const double s = 1.0 / n;
    const double half = 0.5;

    // Reject shapes whose bounding box leaves the grid.
    double reach = 0.0;
    switch (kind) {
        case ShapeKind::solid_box:
            for (int i = 0; i < 3; ++i) {
                reach = std::max(reach, std::abs(params.center[i]) + params.half_widths[i]);
            }
            break;
        default:
            for (int i = 0; i < 3; ++i) {
                reach = std::max(reach, std::abs(params.center[i]) + params.radius);
            }
            break;
    }
    if (reach > half + 1e-12) {
        throw std::invalid_argument("synth_shape: shape extends outside the grid");
    }

    double axis_norm = 1.0;
    if (kind == ShapeKind::hemisphere) {
        axis_norm = std::sqrt(dot(params.axis, params.axis));
        if (axis_norm == 0.0) {
            throw std::invalid_argument("synth_shape: hemisphere axis is zero");
        }
    }

    VoxelImage image = VoxelImage::zeros({n, n, n}, s);
    auto& vals = image.values();
    size_t flat = 0;
    for (int ix = 0; ix < n; ++ix) {
        for (int iy = 0; iy < n; ++iy) {
            for (int iz = 0; iz < n; ++iz, ++flat) {
                const Vec3 p{image.center_coord(0, ix) - params.center[0],
                             image.center_coord(1, iy) - params.center[1],
                             image.center_coord(2, iz) - params.center[2]};
                bool inside = false;
                switch (kind) {
                    case ShapeKind::solid_box:
                        inside = std::abs(p[0]) <= params.half_widths[0] &&
                                 std::abs(p[1]) <= params.half_widths[1] &&
                                 std::abs(p[2]) <= params.half_widths[2];
                        break;
                    case ShapeKind::solid_sphere:
                        inside = dot(p, p) <= params.radius * params.radius;
                        break;
                    case ShapeKind::hemisphere:
                        inside = dot(p, p) <= params.radius * params.radius &&
                                 dot(p, params.axis) >= 0.0;
                        break;
                    case ShapeKind::shell: {
                        const double r = std::sqrt(dot(p, p));
                        inside = r <= params.radius && r >= params.radius - params.thickness;
                        break;
                    }
                }
                if (inside) {
                    vals[flat] = 1.0;
                }
            }
        }
    }
    return image;
}

VoxelImage synth_template(const std::string& name, int n) {
    if (name == "box") {
        ShapeParams p;
        p.half_widths = {0.25, 0.15, 0.10};
        return synth_shape(ShapeKind::solid_box, p, n);
    }
    if (name == "ball") {
        ShapeParams p;
        p.radius = 0.22;
        return synth_shape(ShapeKind::solid_sphere, p, n);
    }
    if (name == "lshape") {
        ShapeParams leg1;
        leg1.center = {-0.125, 0.0, 0.0};
        leg1.half_widths = {0.10, 0.25, 0.10};
        ShapeParams leg2;
        leg2.center = {0.10, -0.15, 0.0};
        leg2.half_widths = {0.125, 0.10, 0.10};
        VoxelImage a = synth_shape(ShapeKind::solid_box, leg1, n);
        const VoxelImage b = synth_shape(ShapeKind::solid_box, leg2, n);
        for (size_t i = 0; i < a.values().size(); ++i) {
            a.values()[i] = std::max(a.values()[i], b.values()[i]);
        }
        return a;
    }
    throw std::invalid_argument("synth_template: unknown template '" + name + "'");
}

std::vector<std::vector<double>> sample_two_cluster_cloud(int n, int d, uint64_t seed) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("sample_two_cluster_cloud: n must be even and >= 2");
    }
    Rng rng(seed);
    std::vector<std::vector<double>> points;
    points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n / 2; ++i) {
        std::vector<double> p(static_cast<size_t>(d));
        for (int j = 0; j < d; ++j) {
            p[static_cast<size_t>(j)] = rng.uniform(-1.0, -0.5);
        }
        points.push_back(std::move(p));
    }
    for (int i = 0; i < n / 2; ++i) {
        std::vector<double> p(static_cast<size_t>(d));
        for (int j = 0; j < d; ++j) {
            p[static_cast<size_t>(j)] = rng.uniform(0.5, 1.0);
        }
        points.push_back(std::move(p));
    }
    return points;
}

AffineMap AffineMap::identity(int d) {
    AffineMap m;
    m.dim = d;
    m.matrix.assign(static_cast<size_t>(d * d), 0.0);
    m.shift.assign(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        m.matrix[static_cast<size_t>(i * d + i)] = 1.0;
    }
    return m;
}

std::vector<double> AffineMap::apply(const std::vector<double>& x) const {
    auto y = mat_vec(matrix, dim, x);
    for (int i = 0; i < dim; ++i) {
        y[static_cast<size_t>(i)] += shift[static_cast<size_t>(i)];
    }
    return y;
}

double AffineMap::det() const {
    if (dim == 2) {
        return matrix[0] * matrix[3] - matrix[1] * matrix[2];
    }
    if (dim == 3) {
        return matrix[0] * (matrix[4] * matrix[8] - matrix[5] * matrix[7]) -
               matrix[1] * (matrix[3] * matrix[8] - matrix[5] * matrix[6]) +
               matrix[2] * (matrix[3] * matrix[7] - matrix[4] * matrix[6]);
    }
    throw std::invalid_argument("AffineMap: det supports d in {2,3}");
}

AffineMap AffineMap::inverse() const {
    AffineMap inv;
    inv.dim = dim;
    inv.matrix = mat_inverse(matrix, dim);
    inv.shift.assign(static_cast<size_t>(dim), 0.0);
    const auto minus_y = mat_vec(inv.matrix, dim, shift);
    for (int i = 0; i < dim; ++i) {
        inv.shift[static_cast<size_t>(i)] = -minus_y[static_cast<size_t>(i)];
    }
    return inv;
}

VoxelImage apply_affine_voxels(const VoxelImage& image, const AffineMap& map) {
    const int d = image.dim();
    if (map.dim != d) {
        throw std::invalid_argument("apply_affine_voxels: dimension mismatch");
    }
    if (std::abs(map.det()) <= 1e-12) {
        throw std::invalid_argument("apply_affine_voxels: map is not invertible");
    }
    const AffineMap inv = map.inverse();
    const double s = image.voxel_size();
    const auto& ext = image.extents();

    VoxelImage out = VoxelImage::zeros(ext, s);
    auto& dst = out.values();
    const auto& src = image.values();

    std::vector<int> idx(static_cast<size_t>(d), 0);
    std::vector<double> x(static_cast<size_t>(d));
    for (size_t flat = 0; flat < dst.size(); ++flat) {
        for (int i = 0; i < d; ++i) {
            x[static_cast<size_t>(i)] = out.center_coord(i, idx[static_cast<size_t>(i)]);
        }
        const auto p = inv.apply(x);
        size_t src_flat = 0;
        bool in_grid = true;
        for (int i = 0; i < d; ++i) {
            const double fi =
                p[static_cast<size_t>(i)] / s + 0.5 * (ext[static_cast<size_t>(i)] - 1);
            const int j = static_cast<int>(std::lround(fi));
            if (j < 0 || j >= ext[static_cast<size_t>(i)]) {
                in_grid = false;
                break;
            }
            src_flat = src_flat * static_cast<size_t>(ext[static_cast<size_t>(i)]) +
                       static_cast<size_t>(j);
        }
        if (in_grid) {
            dst[flat] = src[src_flat];
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < ext[static_cast<size_t>(i)]) {
                break;
            }
            idx[static_cast<size_t>(i)] = 0;
        }
    }
    return out;
}

AffineMap random_affine(int d, uint64_t seed, const AffineRanges& ranges) {
    if (d != 2 && d != 3) {
        throw std::invalid_argument("random_affine: d must be 2 or 3");
    }
    Rng rng(seed);
    AffineMap rot = AffineMap::identity(d);
    if (ranges.rotate) {
        if (d == 2) {
            const double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            rot.matrix = {std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi)};
        } else {
            // Uniform rotation from a normalized quaternion of Gaussians.
            double q[4];
            double norm = 0.0;
            for (double& qi : q) {
                qi = rng.gaussian();
                norm += qi * qi;
            }
            norm = std::sqrt(norm);
            for (double& qi : q) {
                qi /= norm;
            }
            const double w = q[0], x = q[1], y = q[2], z = q[3];
            rot.matrix = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                          2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                          2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
        }
    }
    AffineMap shear = AffineMap::identity(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            shear.matrix[static_cast<size_t>(i * d + j)] =
                ranges.shear_max == 0.0 ? 0.0 : rng.uniform(-ranges.shear_max, ranges.shear_max);
        }
    }
    AffineMap scale = AffineMap::identity(d);
    for (int i = 0; i < d; ++i) {
        scale.matrix[static_cast<size_t>(i * d + i)] =
            ranges.scale_min == ranges.scale_max
                ? ranges.scale_min
                : rng.uniform(ranges.scale_min, ranges.scale_max);
    }
    AffineMap m;
    m.dim = d;
    m.matrix = mat_mul(mat_mul(rot.matrix, shear.matrix, d), scale.matrix, d);
    m.shift.assign(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        m.shift[static_cast<size_t>(i)] =
            ranges.shift_max == 0.0 ? 0.0 : rng.uniform(-ranges.shift_max, ranges.shift_max);
    }
    return m;
}

void symmetric_eigen(const std::vector<double>& m, int d, std::vector<double>& eigenvalues,
                     std::vector<double>& eigenvectors) {
    std::vector<double> a = m;
    std::vector<double> v(static_cast<size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i) {
        v[static_cast<size_t>(i * d + i)] = 1.0;
    }
    auto at = [&](std::vector<double>& mat, int r, int c) -> double& {
        return mat[static_cast<size_t>(r * d + c)];
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                off += at(a, p, q) * at(a, p, q);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = at(a, p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double diff = at(a, q, q) - at(a, p, p);
                const double phi = 0.5 * std::atan2(2.0 * apq, diff);
                const double c = std::cos(phi);
                const double s = std::sin(phi);
                for (int k = 0; k < d; ++k) {
                    const double akp = at(a, k, p);
                    const double akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = at(a, p, k);
                    const double aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = at(v, k, p);
                    const double vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // Sort eigenvalues descending, permuting the eigenvector columns along.
    std::vector<int> order(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        order[static_cast<size_t>(i)] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return a[static_cast<size_t>(x * d + x)] > a[static_cast<size_t>(y * d + y)];
    });
    eigenvalues.assign(static_cast<size_t>(d), 0.0);
    eigenvectors.assign(static_cast<size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i) {
        const int src = order[static_cast<size_t>(i)];
        eigenvalues[static_cast<size_t>(i)] = a[static_cast<size_t>(src * d + src)];
        for (int k = 0; k < d; ++k) {
            eigenvectors[static_cast<size_t>(k * d + i)] = v[static_cast<size_t>(k * d + src)];
        }
    }
}

VoxelImage preprocess(const VoxelImage& image, PreprocessInfo* info) {
    const int d = image.dim();
    const auto& ext = image.extents();
    const double s = image.voxel_size();
    const auto& vals = image.values();
    const double mass = image.sum();
    if (!(mass > 0.0)) {
        throw std::invalid_argument("preprocess: image has no mass");
    }
    if (info) {
        *info = PreprocessInfo{};
    }

    // Mass centroid and covariance in physical coordinates.
    std::vector<double> centroid(static_cast<size_t>(d), 0.0);
    std::vector<int> idx(static_cast<size_t>(d), 0);
    std::vector<double> x(static_cast<size_t>(d));
    auto step = [&]() {
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < ext[static_cast<size_t>(i)]) {
                return true;
            }
            idx[static_cast<size_t>(i)] = 0;
        }
        return false;
    };
    {
        size_t flat = 0;
        do {
            const double w = vals[flat++];
            if (w == 0.0) {
                continue;
            }
            for (int i = 0; i < d; ++i) {
                centroid[static_cast<size_t>(i)] +=
                    w * image.center_coord(i, idx[static_cast<size_t>(i)]);
            }
        } while (step());
        for (double& c : centroid) {
            c /= mass;
        }
    }

    std::vector<double> cov(static_cast<size_t>(d * d), 0.0);
    {
        std::fill(idx.begin(), idx.end(), 0);
        size_t flat = 0;
        do {
            const double w = vals[flat++];
            if (w == 0.0) {
                continue;
            }
            for (int i = 0; i < d; ++i) {
                x[static_cast<size_t>(i)] = image.center_coord(i, idx[static_cast<size_t>(i)]) -
                                            centroid[static_cast<size_t>(i)];
            }
            for (int i = 0; i < d; ++i) {
                for (int j = i; j < d; ++j) {
                    cov[static_cast<size_t>(i * d + j)] +=
                        w * x[static_cast<size_t>(i)] * x[static_cast<size_t>(j)];
                }
            }
        } while (step());
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                cov[static_cast<size_t>(i * d + j)] /= mass;
                cov[static_cast<size_t>(j * d + i)] = cov[static_cast<size_t>(i * d + j)];
            }
        }
    }

    std::vector<double> eigval;
    std::vector<double> basis;  // columns are the principal axes
    symmetric_eigen(cov, d, eigval, basis);
    const double lead = std::abs(eigval[0]);
    if (!(lead > 0.0) || eigval[static_cast<size_t>(d - 1)] <= 1e-12 * lead) {
        if (info) {
            info->rotation_skipped = true;
        }
        basis.assign(static_cast<size_t>(d * d), 0.0);
        for (int i = 0; i < d; ++i) {
            basis[static_cast<size_t>(i * d + i)] = 1.0;
        }
        for (int i = 0; i < d; ++i) {
            eigval[static_cast<size_t>(i)] = std::max(lead, 1e-300);
        }
    } else {
        // Fix each axis sign by the third central moment of the projected
        // mass (ties resolved towards a positive leading component).
        for (int j = 0; j < d; ++j) {
            double m3 = 0.0;
            std::fill(idx.begin(), idx.end(), 0);
            size_t flat = 0;
            do {
                const double w = vals[flat++];
                if (w == 0.0) {
                    continue;
                }
                double proj = 0.0;
                for (int i = 0; i < d; ++i) {
                    proj += basis[static_cast<size_t>(i * d + j)] *
                            (image.center_coord(i, idx[static_cast<size_t>(i)]) -
                             centroid[static_cast<size_t>(i)]);
                }
                m3 += w * proj * proj * proj;
            } while (step());
            const double sigma = std::sqrt(std::max(eigval[static_cast<size_t>(j)], 0.0));
            const double tol = 1e-9 * mass * sigma * sigma * sigma;
            bool flip = false;
            if (std::abs(m3) > tol) {
                flip = m3 < 0.0;
            } else {
                for (int i = 0; i < d; ++i) {
                    const double b = basis[static_cast<size_t>(i * d + j)];
                    if (b != 0.0) {
                        flip = b < 0.0;
                        break;
                    }
                }
            }
            if (flip) {
                for (int i = 0; i < d; ++i) {
                    basis[static_cast<size_t>(i * d + j)] *= -1.0;
                }
            }
        }
    }

    // Extent of the occupied box in the aligned frame u = V^T (x - centroid).
    double reach = 0.0;
    {
        std::fill(idx.begin(), idx.end(), 0);
        size_t flat = 0;
        do {
            const double w = vals[flat++];
            if (w == 0.0) {
                continue;
            }
            for (int j = 0; j < d; ++j) {
                double u = 0.0;
                for (int i = 0; i < d; ++i) {
                    u += basis[static_cast<size_t>(i * d + j)] *
                         (image.center_coord(i, idx[static_cast<size_t>(i)]) -
                          centroid[static_cast<size_t>(i)]);
                }
                reach = std::max(reach, std::abs(u));
            }
        } while (step());
    }
    const int max_extent = *std::max_element(ext.begin(), ext.end());
    const double grid_half = 0.5 * s * max_extent;
    const double alpha = reach > 0.0 ? 0.95 * grid_half / reach : 1.0;

    // Resample: output center x' pulls from x = centroid + V (x'/alpha).
    VoxelImage out = VoxelImage::zeros(ext, s);
    auto& dst = out.values();
    {
        std::fill(idx.begin(), idx.end(), 0);
        size_t flat = 0;
        do {
            bool in_grid = true;
            size_t src_flat = 0;
            for (int i = 0; i < d && in_grid; ++i) {
                double xi = centroid[static_cast<size_t>(i)];
                for (int j = 0; j < d; ++j) {
                    xi += basis[static_cast<size_t>(i * d + j)] *
                          out.center_coord(j, idx[static_cast<size_t>(j)]) / alpha;
                }
                const double fi = xi / s + 0.5 * (ext[static_cast<size_t>(i)] - 1);
                const int jj = static_cast<int>(std::lround(fi));
                if (jj < 0 || jj >= ext[static_cast<size_t>(i)]) {
                    in_grid = false;
                    break;
                }
                src_flat = src_flat * static_cast<size_t>(ext[static_cast<size_t>(i)]) +
                           static_cast<size_t>(jj);
            }
            if (in_grid) {
                dst[flat] = vals[src_flat];
            }
            ++flat;
        } while (step());
    }

    const double new_mass = out.sum();
    if (!(new_mass > 0.0)) {
        throw std::runtime_error("preprocess: resampling lost all mass");
    }
    const double norm = std::pow(s, d) * new_mass;
    for (double& v : dst) {
        v /= norm;
    }
    return out;
}

LabeledImages make_affine_class_dataset(const std::vector<std::string>& templates,
                                        int instances, int n, uint64_t seed,
                                        const AffineRanges& ranges) {
    if (templates.empty() || instances < 1) {
        throw std::invalid_argument("make_affine_class_dataset: empty configuration");
    }
    LabeledImages out;
    out.class_names = templates;
    for (int c = 0; c < static_cast<int>(templates.size()); ++c) {
        const VoxelImage base = synth_template(templates[static_cast<size_t>(c)], n);
        for (int i = 0; i < instances; ++i) {
            const AffineMap map = random_affine(
                3, derive_seed(seed, static_cast<uint64_t>(c) * 1024 + static_cast<uint64_t>(i)),
                ranges);
            out.labels.push_back(c);
            out.images.push_back(apply_affine_voxels(base, map));
        }
    }
    return out;
}

}  // namespace hyperradon
