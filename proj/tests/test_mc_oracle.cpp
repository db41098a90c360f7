#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mc_oracle.hpp"
#include "voxel.hpp"

using namespace hyperradon;

TEST_CASE("analytic one-dimensional hit probability") {
    // Interval (-0.5, 0.5] inside (-1, 1]: hit probability 1/2, scale
    // 2/(2*0.5) = 2, so the estimate converges to 1.
    const HalfWidths a({1.0});
    const auto theta = Direction::unit({1.0});
    const auto est = mc_cube_plane_area(a, theta, 0.0, 0.5, 1 << 18, 42);
    CHECK(est.estimate == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.estimate - 1.0) < 4.0 * est.std_error);
}

TEST_CASE("no hits far outside the support") {
    const HalfWidths a({1.0, 1.0});
    const auto theta = Direction::unit({1.0, 0.0});
    const auto est = mc_cube_plane_area(a, theta, 100.0, 0.1, 1024, 7);
    CHECK(est.estimate == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("d=4 estimate brackets the exact area") {
    const HalfWidths a(std::vector<double>(4, 1.0));
    const auto theta = Direction::unit({0.5, 0.5, 0.5, 0.5});
    const double exact = cube_plane_area(a, theta, 0.0);
    const auto est = mc_cube_plane_area(a, theta, 0.0, 1e-3, 1 << 20, 123);
    CHECK(std::abs(est.estimate - exact) < 3.0 * est.std_error + 1e-6);
}

TEST_CASE("estimator is unbiased for the regularized area, not the sharp one") {
    // At a kink the eps-average differs from the sharp value by a fixed,
    // deterministic amount; the MC estimate tracks the former.
    const HalfWidths a({1.0, 1.0});
    const auto theta = Direction::unit({std::sqrt(0.5), std::sqrt(0.5)});
    const double t = 0.0;
    const double eps = 0.4;
    const double regularized = cube_plane_area_regularized(a, theta, t, eps);
    const double sharp = cube_plane_area(a, theta, t);
    REQUIRE(std::abs(regularized - sharp) > 0.1);
    const auto est = mc_cube_plane_area(a, theta, t, eps, 1 << 20, 99);
    CHECK(std::abs(est.estimate - regularized) < 3.0 * est.std_error);
    CHECK(std::abs(est.estimate - sharp) > 6.0 * est.std_error);
}

TEST_CASE("reproducibility") {
    const HalfWidths a({1.0, 1.0, 1.0});
    const auto theta = Direction::unit({0.0, 0.6, 0.8});
    const auto e1 = mc_cube_plane_area(a, theta, 0.3, 0.01, 4096, 2024);
    const auto e2 = mc_cube_plane_area(a, theta, 0.3, 0.01, 4096, 2024);
    CHECK(e1.estimate == e2.estimate);
    CHECK(e1.std_error == e2.std_error);
    CHECK_THROWS_AS(mc_cube_plane_area(a, theta, 0.0, 0.0, 16, 1), std::invalid_argument);
    CHECK_THROWS_AS(mc_cube_plane_area(a, theta, 0.0, 0.1, 0, 1), std::invalid_argument);
}

TEST_CASE("comparison report smoke and rate") {
    const auto dirs = sobol_sphere_s3(4);
    const auto radii = linspace(-1.5, 1.5, 17);

    const auto smoke = mc_comparison_report(dirs, radii, 1e-2, {1}, 1, 3);
    REQUIRE(smoke.rows.size() == 1);
    CHECK(smoke.rows[0].mean_abs_diff >= 0.0);
    CHECK(std::isfinite(smoke.rows[0].mean_abs_diff));

    // Monte Carlo rate: fit the slope of log error against log N.
    const std::vector<uint64_t> counts{1 << 8, 1 << 10, 1 << 12, 1 << 14, 1 << 16};
    const auto report = mc_comparison_report(dirs, radii, 5e-2, counts, 6, 7);
    REQUIRE(report.rows.size() == counts.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& row : report.rows) {
        const double x = std::log(static_cast<double>(row.num_samples));
        const double y = std::log(row.mean_abs_diff);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(report.rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.3));

    // Deterministic given the seed.
    const auto again = mc_comparison_report(dirs, radii, 5e-2, counts, 6, 7);
    for (size_t i = 0; i < counts.size(); ++i) {
        CHECK(again.rows[i].mean_abs_diff == report.rows[i].mean_abs_diff);
    }
    CHECK_THROWS_AS(mc_comparison_report(dirs, radii, 1e-2, {16}, 0, 1),
                    std::invalid_argument);
}
