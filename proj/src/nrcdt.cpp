#include "nrcdt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "errors.hpp"

namespace hyperradon {

std::vector<double> default_xi_grid(int count) {
    if (count < 1) {
        throw std::invalid_argument("default_xi_grid: count must be >= 1");
    }
    std::vector<double> xi(static_cast<size_t>(count));
    for (int i = 1; i <= count; ++i) {
        xi[static_cast<size_t>(i - 1)] = (2.0 * i - 1.0) / (2.0 * count);
    }
    return xi;
}

DiscreteCDF cdf_from_projection(const std::vector<double>& radii,
                                const std::vector<double>& projection_values) {
    if (radii.size() != projection_values.size() || radii.size() < 2) {
        throw std::invalid_argument("cdf_from_projection: grid/value mismatch");
    }
    for (double v : projection_values) {
        if (v < -1e-9) {
            throw std::invalid_argument("cdf_from_projection: negative projection value");
        }
    }
    DiscreteCDF out;
    out.t_grid = radii;
    out.cdf.assign(radii.size(), 0.0);
    double acc = 0.0;
    for (size_t i = 1; i < radii.size(); ++i) {
        const double v0 = std::max(projection_values[i - 1], 0.0);
        const double v1 = std::max(projection_values[i], 0.0);
        acc += 0.5 * (radii[i] - radii[i - 1]) * (v0 + v1);
        out.cdf[i] = acc;
    }
    if (!(acc > 0.0)) {
        throw std::domain_error("cdf_from_projection: projection carries no mass");
    }
    double prev = 0.0;
    for (double& c : out.cdf) {
        c = std::clamp(c / acc, 0.0, 1.0);
        c = std::max(c, prev);
        prev = c;
    }
    out.cdf.back() = 1.0;
    return out;
}

double quantile(const DiscreteCDF& cdf, double xi, bool step) {
    if (!(xi > 0.0) || !(xi < 1.0)) {
        throw std::invalid_argument("quantile: xi must lie in (0,1)");
    }
    const auto it = std::upper_bound(cdf.cdf.begin(), cdf.cdf.end(), xi);
    if (it == cdf.cdf.end()) {
        return cdf.t_grid.back();
    }
    const size_t j = static_cast<size_t>(it - cdf.cdf.begin());
    if (j == 0 || step) {
        return cdf.t_grid[j];
    }
    const double c0 = cdf.cdf[j - 1];
    const double c1 = cdf.cdf[j];
    const double t0 = cdf.t_grid[j - 1];
    const double t1 = cdf.t_grid[j];
    return t0 + (xi - c0) / (c1 - c0) * (t1 - t0);
}

QuantileProfile quantile_profile(const DiscreteCDF& cdf, const std::vector<double>& xi_grid,
                                 bool step) {
    QuantileProfile p;
    p.xi_grid = xi_grid;
    p.values.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        p.values.push_back(quantile(cdf, xi, step));
    }
    return p;
}

QuantileProfile nrcdt(const Sinogram& sinogram, int direction_index,
                      const std::vector<double>& xi_grid) {
    if (direction_index < 0 || direction_index >= sinogram.num_directions()) {
        throw std::invalid_argument("nrcdt: direction index out of range");
    }
    if (xi_grid.empty()) {
        throw std::invalid_argument("nrcdt: empty xi grid");
    }
    const DiscreteCDF cdf = cdf_from_projection(sinogram.radii, sinogram.row(direction_index));
    QuantileProfile p = quantile_profile(cdf, xi_grid);

    // Standardize with midpoint-rule mean/std over the xi grid.
    const double n = static_cast<double>(p.values.size());
    double mean = 0.0;
    for (double v : p.values) {
        mean += v;
    }
    mean /= n;
    double var = 0.0;
    for (double v : p.values) {
        var += (v - mean) * (v - mean);
    }
    var /= n;
    const double std_dev = std::sqrt(var);
    if (std_dev < 1e-12) {
        throw std::domain_error("nrcdt: projection support is a single hyperplane");
    }
    for (double& v : p.values) {
        v = (v - mean) / std_dev;
    }
    return p;
}

QuantileProfile max_nrcdt(const Sinogram& sinogram, const std::vector<double>& xi_grid,
                          int* skipped_directions) {
    QuantileProfile sup;
    int skipped = 0;
    bool any = false;
    for (int i = 0; i < sinogram.num_directions(); ++i) {
        QuantileProfile p;
        try {
            p = nrcdt(sinogram, i, xi_grid);
        } catch (const std::domain_error&) {
            ++skipped;
            continue;
        }
        if (!any) {
            sup = std::move(p);
            any = true;
        } else {
            for (size_t j = 0; j < sup.values.size(); ++j) {
                sup.values[j] = std::max(sup.values[j], p.values[j]);
            }
        }
    }
    if (skipped_directions) {
        *skipped_directions = skipped;
    }
    if (!any) {
        throw std::domain_error("max_nrcdt: every direction is degenerate");
    }
    return sup;
}

void save_profile_csv(const QuantileProfile& profile, const std::string& path,
                      const std::string& comment) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        throw IoError("profile CSV: cannot open for writing: " + path);
    }
    if (!comment.empty()) {
        std::fprintf(f, "# %s\n", comment.c_str());
    }
    std::fprintf(f, "xi,value\n");
    for (size_t i = 0; i < profile.xi_grid.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g\n", profile.xi_grid[i], profile.values[i]);
    }
    std::fclose(f);
}

}  // namespace hyperradon
