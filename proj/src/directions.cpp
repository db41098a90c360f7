#include "directions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hyperradon {

namespace {

// theta(v1, v2) = (sin v1 sin v2, cos v1 sin v2, cos v2).
std::vector<double> spherical_point(double v1, double v2) {
    const double s2 = std::sin(v2);
    return {std::sin(v1) * s2, std::cos(v1) * s2, std::cos(v2)};
}

std::vector<double> normalized(std::vector<double> x) {
    double n = 0.0;
    for (double v : x) {
        n += v * v;
    }
    n = std::sqrt(n);
    for (double& v : x) {
        v /= n;
    }
    return x;
}

// 32-bit Sobol direction numbers for dimensions 1..4, from the first
// primitive polynomials of the Joe-Kuo table:
//   dim 2: s=1, a=0, m=(1); dim 3: s=2, a=1, m=(1,3); dim 4: s=3, a=1,
//   m=(1,3,1). Dimension 1 is the van der Corput sequence.
struct Sobol4Table {
    uint32_t v[4][32];

    Sobol4Table() {
        for (int k = 0; k < 32; ++k) {
            v[0][k] = 1u << (31 - k);
        }
        init(1, 1, 0, {1});
        init(2, 2, 1, {1, 3});
        init(3, 3, 1, {1, 3, 1});
    }

    void init(int dim, int s, uint32_t a, std::array<uint32_t, 3> m_init) {
        std::array<uint32_t, 32> m{};
        for (int k = 0; k < s; ++k) {
            m[static_cast<size_t>(k)] = m_init[static_cast<size_t>(k)];
        }
        for (int k = s; k < 32; ++k) {
            uint32_t mk = m[static_cast<size_t>(k - s)] ^ (m[static_cast<size_t>(k - s)] << s);
            for (int i = 1; i < s; ++i) {
                const uint32_t ai = (a >> (s - 1 - i)) & 1u;
                if (ai) {
                    mk ^= m[static_cast<size_t>(k - i)] << i;
                }
            }
            m[static_cast<size_t>(k)] = mk;
        }
        for (int k = 0; k < 32; ++k) {
            v[dim][k] = m[static_cast<size_t>(k)] << (31 - k);
        }
    }
};

const Sobol4Table& sobol_table() {
    static const Sobol4Table table;
    return table;
}

}  // namespace

void sobol4(uint64_t index, double out[4]) {
    const auto& tab = sobol_table();
    for (int d = 0; d < 4; ++d) {
        uint32_t x = 0;
        uint64_t i = index;
        int bit = 0;
        while (i != 0) {
            if (i & 1) {
                x ^= tab.v[d][bit];
            }
            i >>= 1;
            ++bit;
        }
        out[d] = static_cast<double>(x) * 0x1.0p-32;
    }
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");
    }
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against the erfc-based CDF. The residual is
    // formed on whichever tail is small so it keeps full relative accuracy.
    const double e = p < 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                             : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (density > 1e-280) {
        const double u = e / density;
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

DirectionSet circle_equispaced(int n) {
    if (n < 1) {
        throw std::invalid_argument("circle_equispaced: n must be >= 1");
    }
    DirectionSet set;
    set.dim = 2;
    set.scheme = DirectionScheme::circle_equispaced;
    set.points.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double phi = std::numbers::pi * i / n;
        set.points.push_back(Direction::unit({std::cos(phi), std::sin(phi)}));
    }
    return set;
}

DirectionSet spherical_grid(int n1, int n2) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("spherical_grid: counts must be >= 1");
    }
    DirectionSet set;
    set.dim = 3;
    set.scheme = DirectionScheme::spherical_grid;
    for (int j = 0; j < n2; ++j) {
        const double v2 = n2 == 1 ? 0.0 : std::numbers::pi * j / (n2 - 1);
        const bool pole = j == 0 || (n2 > 1 && j == n2 - 1);
        const int m = pole ? 1 : n1;
        for (int i = 0; i < m; ++i) {
            const double v1 = 2.0 * std::numbers::pi * i / n1;
            auto p = spherical_point(v1, v2);
            if (pole) {
                p = {0.0, 0.0, j == 0 ? 1.0 : -1.0};
            }
            set.points.push_back(Direction::unit(std::move(p)));
        }
    }
    return set;
}

DirectionSet fibonacci_sphere(int n) {
    if (n < 1) {
        throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    DirectionSet set;
    set.dim = 3;
    set.scheme = DirectionScheme::fibonacci;
    set.points.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const double v1 = golden * i;
        const double z = 1.0 - (2.0 * i - 1.0) / n;  // exactly cos(v2)
        const double s2 = std::sqrt(std::max(0.0, 1.0 - z * z));
        set.points.push_back(Direction::unit({std::sin(v1) * s2, std::cos(v1) * s2, z}));
    }
    return set;
}

DirectionSet sobol_sphere_s3(int n, uint64_t seed_skip) {
    if (n < 1) {
        throw std::invalid_argument("sobol_sphere_s3: n must be >= 1");
    }
    if (seed_skip < 1) {
        throw std::invalid_argument("sobol_sphere_s3: seed_skip must be >= 1");
    }
    DirectionSet set;
    set.dim = 4;
    set.scheme = DirectionScheme::sobol_gaussian;
    set.points.reserve(static_cast<size_t>(n));
    uint64_t index = seed_skip;
    while (set.count() < n) {
        double u[4];
        sobol4(index++, u);
        std::vector<double> g(4);
        double norm = 0.0;
        bool valid = true;
        for (int d = 0; d < 4; ++d) {
            if (u[d] <= 0.0 || u[d] >= 1.0) {
                valid = false;
                break;
            }
            g[static_cast<size_t>(d)] = inverse_normal_cdf(u[d]);
            norm += g[static_cast<size_t>(d)] * g[static_cast<size_t>(d)];
        }
        if (!valid || norm == 0.0) {
            continue;  // degenerate point, retry with the next Sobol index
        }
        set.points.push_back(Direction::unit(normalized(std::move(g))));
    }
    return set;
}

DirectionSet explicit_directions(int dim, const std::vector<std::vector<double>>& points) {
    if (points.empty()) {
        throw std::invalid_argument("explicit_directions: empty set");
    }
    DirectionSet set;
    set.dim = dim;
    set.scheme = DirectionScheme::explicit_set;
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != dim) {
            throw std::invalid_argument("explicit_directions: dimension mismatch");
        }
        set.points.push_back(Direction::unit(p));
    }
    return set;
}

DirectionSet parse_direction_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("direction spec: expected '<scheme>:<counts>'");
    }
    const std::string scheme = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    try {
        if (scheme == "circle") {
            return circle_equispaced(std::stoi(args));
        }
        if (scheme == "fibonacci") {
            return fibonacci_sphere(std::stoi(args));
        }
        if (scheme == "sobol") {
            return sobol_sphere_s3(std::stoi(args));
        }
        if (scheme == "grid") {
            const auto comma = args.find(',');
            if (comma == std::string::npos) {
                throw std::invalid_argument("grid spec needs n1,n2");
            }
            return spherical_grid(std::stoi(args.substr(0, comma)),
                                  std::stoi(args.substr(comma + 1)));
        }
    } catch (const std::logic_error&) {
        throw std::invalid_argument("direction spec: malformed counts in '" + spec + "'");
    }
    throw std::invalid_argument("direction spec: unknown scheme '" + scheme + "'");
}

}  // namespace hyperradon
