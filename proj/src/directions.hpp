#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace hyperradon {

enum class DirectionScheme {
    circle_equispaced,
    spherical_grid,
    fibonacci,
    sobol_gaussian,
    explicit_set,
};

/// A set of unit directions on S^{d-1}.
struct DirectionSet {
    int dim = 0;
    DirectionScheme scheme = DirectionScheme::explicit_set;
    std::vector<Direction> points;

    int count() const { return static_cast<int>(points.size()); }
};

/// n directions on the half circle, theta_i = (cos(pi i/n), sin(pi i/n)).
/// The Radon symmetry R_{-theta}(-t) = R_theta(t) makes the full circle
/// redundant.
DirectionSet circle_equispaced(int n);

/// Uniform grid in spherical coordinates on S^2 with poles deduplicated.
DirectionSet spherical_grid(int n1, int n2);

/// Fibonacci points on S^2 via the golden angle; z-coordinates are exactly
/// 1 - (2i - 1)/n.
DirectionSet fibonacci_sphere(int n);

/// Quasi-uniform points on S^3: Sobol points in [0,1]^4 mapped through the
/// inverse standard-normal CDF and normalized. Degenerate all-zero vectors
/// are skipped. seed_skip >= 1 skips the leading Sobol indices (the first
/// point of the sequence is the origin).
DirectionSet sobol_sphere_s3(int n, uint64_t seed_skip = 1);

/// Explicit direction set from raw unit vectors.
DirectionSet explicit_directions(int dim, const std::vector<std::vector<double>>& points);

/// Parse a direction-set spec: "circle:n", "grid:n1,n2", "fibonacci:n",
/// "sobol:n". Throws std::invalid_argument for malformed specs.
DirectionSet parse_direction_spec(const std::string& spec);

/// Inverse standard-normal CDF (quantile function), accurate to ~1e-15 via
/// a rational approximation with one Halley refinement.
double inverse_normal_cdf(double p);

/// i-th point (0-based) of the 4-dimensional Sobol sequence; point 0 is the
/// origin.
void sobol4(uint64_t index, double out[4]);

}  // namespace hyperradon
