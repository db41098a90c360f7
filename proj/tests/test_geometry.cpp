#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace hyperradon;

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt3 = std::numbers::sqrt3;

Direction unit_direction(std::vector<double> v) {
    double n = 0.0;
    for (double x : v) {
        n += x * x;
    }
    n = std::sqrt(n);
    for (double& x : v) {
        x /= n;
    }
    return Direction::unit(std::move(v));
}

Direction random_unit(Rng& rng, int d, int zeros = 0) {
    std::vector<double> v(static_cast<size_t>(d));
    for (double& x : v) {
        x = rng.gaussian();
    }
    for (int i = 0; i < zeros; ++i) {
        v[static_cast<size_t>(rng.uniform_index(static_cast<uint64_t>(d)))] = 0.0;
    }
    bool all_zero = true;
    for (double x : v) {
        all_zero &= x == 0.0;
    }
    if (all_zero) {
        v[0] = 1.0;
    }
    double n = 0.0;
    for (double x : v) {
        n += x * x;
    }
    n = std::sqrt(n);
    for (double& x : v) {
        x /= n;
    }
    return Direction::unit(std::move(v));
}

HalfWidths random_halfwidths(Rng& rng, int d) {
    std::vector<double> a(static_cast<size_t>(d));
    for (double& x : a) {
        x = rng.uniform(0.2, 2.0);
    }
    return HalfWidths(std::move(a));
}

}  // namespace

TEST_CASE("product_all") {
    CHECK(product_all(std::vector<double>{2, 3}) == 6.0);
    CHECK(product_all(std::vector<double>{}) == 1.0);
    CHECK(product_all(std::vector<double>{1, -1, 5}) == -5.0);
}

TEST_CASE("restrict_to_support") {
    CHECK(restrict_to_support(std::vector<double>{0, 3, 0, -2}) ==
          std::vector<double>{3, -2});
    CHECK(restrict_to_support(std::vector<double>{0, 0}).empty());
    CHECK(restrict_to_support(std::vector<double>{1, 2}) == std::vector<double>{1, 2});
}

TEST_CASE("snap_tolerance") {
    const auto snapped = snap_tolerance({1e-13, 0.5, -1e-13}, 1e-12);
    CHECK(snapped[0] == 0.0);
    CHECK(snapped[1] == 0.5);
    CHECK(snapped[2] == 0.0);
    // default tolerance 0 keeps everything
    CHECK(snap_tolerance({1e-300})[0] == 1e-300);
}

TEST_CASE("type invariants") {
    CHECK_THROWS_AS(HalfWidths({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(HalfWidths({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(HalfWidths({}), std::invalid_argument);
    CHECK_THROWS_AS(Direction::raw({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Direction::unit({0.5, 0.5}), std::invalid_argument);
    const auto d = Direction::unit({1.0, 0.0});
    CHECK(d.ell() == 1);
    CHECK(d.support() == std::vector<int>{0});
}

TEST_CASE("cube_plane_area axis and diagonal cases") {
    const HalfWidths square({1.0, 1.0});
    CHECK(cube_plane_area(square, Direction::unit({1.0, 0.0}), 0.0) == doctest::Approx(2.0));
    CHECK(cube_plane_area(square, unit_direction({1.0, 1.0}), 0.0) ==
          doctest::Approx(2.0 * kSqrt2).epsilon(1e-12));

    const HalfWidths half_cube({0.5, 0.5, 0.5});
    CHECK(cube_plane_area(half_cube, unit_direction({1.0, 1.0, 0.0}), 0.0) ==
          doctest::Approx(kSqrt2).epsilon(1e-12));

    // Hyperplane past the support misses the cube entirely.
    const auto theta = unit_direction({0.3, -0.4, 0.5});
    double reach = 0.0;
    for (int i = 0; i < 3; ++i) {
        reach += half_cube[i] * std::abs(theta[i]);
    }
    CHECK(cube_plane_area(half_cube, theta, 2.0 * reach) == 0.0);
}

TEST_CASE("cube_plane_area_2d explicit branches") {
    const HalfWidths square({1.0, 1.0});
    const auto diag = unit_direction({1.0, 1.0});
    CHECK(cube_plane_area_2d(square, diag, kSqrt2) == 0.0);
    CHECK(cube_plane_area_2d(square, diag, -1.0 / kSqrt2) ==
          doctest::Approx(kSqrt2).epsilon(1e-12));
    const HalfWidths rect({2.0, 1.0});
    CHECK(cube_plane_area_2d(rect, Direction::unit({0.0, 1.0}), 0.5) == doctest::Approx(4.0));
    CHECK_THROWS_AS(cube_plane_area_2d(HalfWidths({1.0, 1.0, 1.0}),
                                       Direction::unit({1.0, 0.0, 0.0}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("cube_plane_area_3d explicit branches") {
    const HalfWidths half_cube({0.5, 0.5, 0.5});
    const auto diag = unit_direction({1.0, 1.0, 1.0});
    // Corner projection: the section degenerates to a point. Evaluate at the
    // corner computed the same way the breakpoints are (the analytic
    // sqrt(3)/2 differs by one ulp and lands on the 1e-31 quadratic tail).
    const double corner = 0.5 * (diag[0] + diag[1] + diag[2]);
    CHECK(cube_plane_area_3d(half_cube, diag, corner) == 0.0);
    CHECK(cube_plane_area_3d(half_cube, diag, kSqrt3 / 2.0) <= 1e-30);
    CHECK(cube_plane_area_3d(half_cube, diag, 0.0) ==
          doctest::Approx(3.0 * kSqrt3 / 4.0).epsilon(1e-12));
    CHECK(cube_plane_area_3d(half_cube, Direction::unit({0.0, 0.0, 1.0}), 0.2) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(cube_plane_area_3d(HalfWidths({1.0, 1.0}), Direction::unit({1.0, 0.0}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("cube_slab_volume basics") {
    CHECK(cube_slab_volume(HalfWidths({1.0}), Direction::unit({1.0}), {0.0, 0.5}) ==
          doctest::Approx(0.5).epsilon(1e-12));
    const HalfWidths half_cube({0.5, 0.5, 0.5});
    Rng rng(7);
    for (int i = 0; i < 5; ++i) {
        const auto theta = random_unit(rng, 3);
        CHECK(cube_slab_volume(half_cube, theta, {-2.0, 2.0}) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(cube_slab_volume(HalfWidths({1.0, 1.0}), unit_direction({1.0, 1.0}),
                           {-kSqrt2, kSqrt2}) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(cube_slab_volume(HalfWidths({1.0}), Direction::unit({1.0}), {0.5, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("regularized area") {
    const HalfWidths square({1.0, 1.0});
    CHECK(cube_plane_area_regularized(square, Direction::unit({1.0, 0.0}), 0.0, 0.1) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(cube_plane_area_regularized(square, Direction::unit({1.0, 0.0}), 0.0, 0.0),
                    std::invalid_argument);

    // First-order convergence (halving error) holds at kinks of the area
    // profile; the 2D diagonal square has one at t = 0.
    const auto diag2 = unit_direction({1.0, 1.0});
    const double exact2 = cube_plane_area(square, diag2, 0.0);
    const double k1 = std::abs(cube_plane_area_regularized(square, diag2, 0.0, 0.2) - exact2);
    const double k2 = std::abs(cube_plane_area_regularized(square, diag2, 0.0, 0.1) - exact2);
    CHECK(k1 / k2 == doctest::Approx(2.0).epsilon(0.15));

    // Inside a C^1 parabolic piece (3D diagonal at the center) the slab
    // average converges at second order instead.
    const HalfWidths half_cube({0.5, 0.5, 0.5});
    const auto diag = unit_direction({1.0, 1.0, 1.0});
    const double exact = cube_plane_area(half_cube, diag, 0.0);
    const double e1 = std::abs(cube_plane_area_regularized(half_cube, diag, 0.0, 0.1) - exact);
    const double e2 = std::abs(cube_plane_area_regularized(half_cube, diag, 0.0, 0.05) - exact);
    CHECK(e2 < e1);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));

    // A slab covering the entire support averages the full volume.
    const double reach = 3.0 * 0.5 / kSqrt3;
    const double eps = 2.0 * reach;
    CHECK(cube_plane_area_regularized(half_cube, diag, 0.0, eps) ==
          doctest::Approx(1.0 / (2.0 * eps)).epsilon(1e-12));
}

TEST_CASE("indicator_convolution base cases") {
    CHECK(indicator_convolution(std::vector<double>{1.0}, 0.0) == 1.0);
    CHECK(indicator_convolution(std::vector<double>{1.0}, 1.0) == 1.0);   // half-open right edge
    CHECK(indicator_convolution(std::vector<double>{1.0}, -1.0) == 0.0);  // open left edge
    CHECK(indicator_convolution(std::vector<double>{1.0, 1.0}, 0.0) ==
          doctest::Approx(2.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(indicator_convolution(std::vector<double>{1.0, 1.0}, 3.0) == 0.0);
    CHECK_THROWS_AS(indicator_convolution(std::vector<double>{}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(indicator_convolution(std::vector<double>{1.0, -1.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("indicator_convolution matches the midpoint-rule oracle") {
    const double delta = std::ldexp(1.0, -12);
    Rng rng(2024);
    for (int k = 2; k <= 4; ++k) {
        for (int chain = 0; chain < 2; ++chain) {
            std::vector<double> b(static_cast<size_t>(k));
            for (double& v : b) {
                // Half-integer lattice multiples keep the midpoint rule exact
                // at the indicator edges.
                const long steps = static_cast<long>(rng.uniform(800.0, 3200.0));
                v = (static_cast<double>(steps) + 0.5) * delta;
            }
            const testing::IndicatorConvolutionOracle oracle(b, delta);
            double reach = 0.0;
            for (double v : b) {
                reach += v;
            }
            for (int probe = 0; probe < 17; ++probe) {
                const long i = static_cast<long>(
                    rng.uniform(-reach / delta - 10.0, reach / delta + 10.0));
                const double t = static_cast<double>(i) * delta;
                CHECK(std::abs(indicator_convolution(b, t) - oracle.at_index(i)) < 1e-6);
            }
        }
    }
}

TEST_CASE("corollaries agree with the general formula") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = trial % 2 == 0 ? 2 : 3;
        const int zeros = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(d)));
        const auto theta = random_unit(rng, d, zeros);
        const auto a = random_halfwidths(rng, d);
        double reach = 0.0;
        for (int i = 0; i < d; ++i) {
            reach += a[i] * std::abs(theta[i]);
        }
        const double t = rng.uniform(-1.2 * reach, 1.2 * reach);
        const double general = cube_plane_area(a, theta, t);
        const double special =
            d == 2 ? cube_plane_area_2d(a, theta, t) : cube_plane_area_3d(a, theta, t);
        CHECK(std::abs(special - general) <= 1e-12 * std::max(1.0, std::abs(general)));
    }
}

TEST_CASE("symmetry in (theta, t)") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng.uniform_index(3));
        const auto theta = random_unit(rng, d);
        const auto a = random_halfwidths(rng, d);
        std::vector<double> neg = theta.values();
        for (double& v : neg) {
            v = -v;
        }
        const auto minus_theta = Direction::unit(std::move(neg));
        const double t = rng.uniform(-2.0, 2.0);
        const double lhs = cube_plane_area(a, theta, t);
        CHECK(std::abs(lhs - cube_plane_area(a, minus_theta, -t)) <=
              1e-12 * std::max(1.0, lhs));
        CHECK(std::abs(lhs - cube_plane_area(a, theta, -t)) <= 1e-12 * std::max(1.0, lhs));
    }
}

TEST_CASE("support bound is exact") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(4));
        const auto theta = random_unit(rng, d);
        const auto a = random_halfwidths(rng, d);
        double reach = 0.0;
        for (int i = 0; i < d; ++i) {
            reach += a[i] * std::abs(theta[i]);
        }
        const double outside = reach + 1e-9 + rng.uniform(0.0, 1.0);
        CHECK(cube_plane_area(a, theta, outside) == 0.0);
        CHECK(cube_plane_area(a, theta, -outside) == 0.0);
        CHECK(cube_plane_area(a, theta, rng.uniform(-0.99, 0.99) * reach) > 0.0);
    }
}

TEST_CASE("mass conservation") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(5));
        const auto theta = random_unit(rng, d);
        const auto a = random_halfwidths(rng, d);
        const CubeSection section(a, theta);
        const double volume = section.box_volume();
        const double reach = section.support_radius();
        CHECK(section.slab_volume(-reach - 5.0, reach + 5.0) ==
              doctest::Approx(volume).epsilon(1e-12));
    }

    // Trapezoidal integral of the area profile recovers the volume.
    Rng rng2(23);
    const auto theta = random_unit(rng2, 3);
    const auto a = random_halfwidths(rng2, 3);
    const CubeSection section(a, theta);
    const double reach = section.support_radius();
    const int n = 10000;
    double integral = 0.0;
    double prev = section.area(-reach);
    for (int i = 1; i < n; ++i) {
        const double t = -reach + 2.0 * reach * i / (n - 1);
        const double cur = section.area(t);
        integral += 0.5 * (prev + cur) * (2.0 * reach / (n - 1));
        prev = cur;
    }
    CHECK(integral == doctest::Approx(section.box_volume()).epsilon(1e-4));
}

TEST_CASE("scaling identity for raw directions") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform_index(4));
        std::vector<double> a_vals(static_cast<size_t>(d));
        for (double& v : a_vals) {
            v = rng.uniform(0.2, 2.0);
        }
        const HalfWidths a(a_vals);
        const HalfWidths e_box(std::vector<double>(static_cast<size_t>(d), 1.0));
        const auto e_dir = Direction::raw(std::vector<double>(static_cast<size_t>(d), 1.0));
        const auto a_dir = Direction::raw(a_vals);
        const double t = rng.uniform(-3.0, 3.0);
        const double lhs = cube_plane_area(a, e_dir, t);
        const double rhs = product_all(a_vals) * cube_plane_area(e_box, a_dir, t);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("smoothness across breakpoints for full-support 3D directions") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto theta = random_unit(rng, 3);
        const auto a = random_halfwidths(rng, 3);
        const CubeSection section(a, theta);
        // Breakpoints are the corner projections.
        std::vector<double> corners;
        for (int k = 0; k < 8; ++k) {
            double t = 0.0;
            for (int i = 0; i < 3; ++i) {
                t += ((k >> i) & 1 ? 1.0 : -1.0) * a[i] * theta[i];
            }
            corners.push_back(t);
        }
        const double h = 1e-6;
        for (double t : corners) {
            const double left = (section.area(t) - section.area(t - h)) / h;
            const double right = (section.area(t + h) - section.area(t)) / h;
            CHECK(std::abs(left - right) < 1e-3);
        }
    }
}

TEST_CASE("diagonal-adjacent directions do not beat the 3D central maximum") {
    const HalfWidths half_cube({0.5, 0.5, 0.5});
    const double best = cube_plane_area(half_cube, unit_direction({1.0, 1.0, 0.0}), 0.0);
    for (double eps : {0.05, 0.1}) {
        CHECK(best > cube_plane_area(half_cube, unit_direction({1.0, 1.0, eps}), 0.0));
    }
    CHECK(best > cube_plane_area(half_cube, Direction::unit({0.0, 0.0, 1.0}), 0.0));
}

TEST_CASE("large support count uses compensated summation and stays exact") {
    Rng rng(37);
    const int d = 12;
    const auto theta = random_unit(rng, d);
    const auto a = random_halfwidths(rng, d);
    const CubeSection section(a, theta);
    CHECK(section.slab_volume(-section.support_radius() - 1.0,
                              section.support_radius() + 1.0) ==
          doctest::Approx(section.box_volume()).epsilon(1e-12));
    const double t = 0.1;
    const double sharp = section.area(t);
    const double reg = section.area_regularized(t, 1e-6);
    CHECK(reg == doctest::Approx(sharp).epsilon(1e-4));
}

TEST_CASE("prepared evaluator matches the one-shot functions") {
    Rng rng(41);
    const auto theta = random_unit(rng, 3);
    const auto a = random_halfwidths(rng, 3);
    const CubeSection section(a, theta);
    for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(-2.0, 2.0);
        CHECK(section.area(t) == cube_plane_area(a, theta, t));
        CHECK(section.area_regularized(t, 0.01) ==
              cube_plane_area_regularized(a, theta, t, 0.01));
    }
}
