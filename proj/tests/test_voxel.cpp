#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"
#include "voxel.hpp"

using namespace hyperradon;

namespace {

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

VoxelImage random_image(Rng& rng, std::vector<int> extents, double s) {
    VoxelImage img = VoxelImage::zeros(std::move(extents), s);
    for (double& v : img.values()) {
        v = rng.uniform(0.0, 1.0);
    }
    return img;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("VoxelImage invariants") {
    CHECK_THROWS_AS(VoxelImage({2, 2}, 1.0, std::vector<double>(3, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(VoxelImage({2}, 0.0, std::vector<double>(2, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(VoxelImage({0}, 1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(VoxelImage({1}, 1.0, std::vector<double>{1e308 * 10}),
                    std::invalid_argument);
    const VoxelImage img = VoxelImage::zeros({4, 3}, 0.5);
    CHECK(img.size() == 12);
    // half-integer centered indices
    CHECK(img.grid_index(0, 0) == -1.5);
    CHECK(img.grid_index(1, 2) == 1.0);
    CHECK(img.center_coord(0, 3) == doctest::Approx(0.75));
}

TEST_CASE("single voxel reduces to the cube section") {
    VoxelImage img = VoxelImage::zeros({3, 3}, 1.0);
    img.values()[img.flat_index({1, 1})] = 1.0;  // center voxel at the origin
    CHECK(discrete_radon(img, Direction::unit({1.0, 0.0}), 0.0) == doctest::Approx(1.0));
    // beyond every projection the transform vanishes
    CHECK(discrete_radon(img, Direction::unit({1.0, 0.0}), 10.0) == 0.0);
}

TEST_CASE("all-ones 2x2 image matches the brute-force per-voxel sum") {
    VoxelImage img = VoxelImage::zeros({2, 2}, 1.0);
    for (double& v : img.values()) {
        v = 1.0;
    }
    const auto e1 = Direction::unit({1.0, 0.0});
    // Brute force: two columns of voxels centered at x = -1/2 and 1/2.
    const HalfWidths cell({0.5, 0.5});
    const CubeSection section(cell, e1);
    const double expected = 2.0 * section.area(0.25 - (-0.5)) + 2.0 * section.area(0.25 - 0.5);
    CHECK(discrete_radon(img, e1, 0.25) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(discrete_radon(img, e1, 0.25) == doctest::Approx(2.0));
}

TEST_CASE("linearity") {
    Rng rng(5);
    const VoxelImage f = random_image(rng, {4, 4, 4}, 0.25);
    const VoxelImage g = random_image(rng, {4, 4, 4}, 0.25);
    VoxelImage combo = VoxelImage::zeros({4, 4, 4}, 0.25);
    const double alpha = 0.7;
    const double beta = -1.3;
    for (size_t i = 0; i < combo.size(); ++i) {
        combo.values()[i] = alpha * f.values()[i] + beta * g.values()[i];
    }
    const auto theta = unit_direction({0.3, -0.5, 0.8});
    for (double t : {-0.3, 0.0, 0.2}) {
        const double lhs = discrete_radon(combo, theta, t);
        const double rhs =
            alpha * discrete_radon(f, theta, t) + beta * discrete_radon(g, theta, t);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("shift covariance") {
    Rng rng(7);
    VoxelImage f = VoxelImage::zeros({6, 6}, 0.5);
    for (int x = 1; x < 5; ++x) {
        for (int y = 1; y < 5; ++y) {
            f.values()[f.flat_index({x, y})] = rng.uniform(0.0, 1.0);
        }
    }
    // translate by one voxel along axis 0
    VoxelImage shifted = VoxelImage::zeros({6, 6}, 0.5);
    for (int x = 0; x < 5; ++x) {
        for (int y = 0; y < 6; ++y) {
            shifted.values()[shifted.flat_index({x + 1, y})] = f.values()[f.flat_index({x, y})];
        }
    }
    const auto theta = unit_direction({0.6, 0.8});
    for (double t : {-0.4, 0.1, 0.5}) {
        CHECK(discrete_radon(shifted, theta, t + 0.5 * theta[0]) ==
              doctest::Approx(discrete_radon(f, theta, t)).epsilon(1e-12));
    }
}

TEST_CASE("mass identities") {
    Rng rng(11);
    const VoxelImage f = random_image(rng, {5, 4, 3}, 0.3);
    const auto theta = unit_direction({0.2, -0.9, 0.4});
    const double mass = std::pow(0.3, 3) * f.sum();
    CHECK(discrete_radon_slab(f, theta, -10.0, 10.0) ==
          doctest::Approx(mass).epsilon(1e-12));

    // Trapezoidal integration of a sinogram row approximates the mass.
    const auto radii = default_radius_grid(f, 513);
    DirectionSet one;
    one.dim = 3;
    one.points.push_back(theta);
    const Sinogram sino = compute_sinogram(f, one, radii);
    double integral = 0.0;
    for (size_t j = 1; j < radii.size(); ++j) {
        integral += 0.5 * (sino.values[j - 1] + sino.values[j]) * (radii[j] - radii[j - 1]);
    }
    CHECK(integral == doctest::Approx(mass).epsilon(1e-3));
}

TEST_CASE("whole-voxel box reproduces the analytic cube section") {
    // 4x4x4 all-ones image with s = 1/2 is the box (-1,1]^3.
    VoxelImage img = VoxelImage::zeros({4, 4, 4}, 0.5);
    for (double& v : img.values()) {
        v = 1.0;
    }
    const HalfWidths box({1.0, 1.0, 1.0});
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(3);
        for (double& x : v) {
            x = rng.gaussian();
        }
        const auto theta = unit_direction(v);
        const double t = rng.uniform(-1.5, 1.5);
        CHECK(discrete_radon(img, theta, t) ==
              doctest::Approx(cube_plane_area(box, theta, t)).epsilon(1e-12));
    }
}

TEST_CASE("pruning soundness") {
    Rng rng(17);
    const VoxelImage f = random_image(rng, {4, 5, 6}, 0.21);
    const auto theta = unit_direction({-0.3, 0.6, 0.75});
    for (double t : {-0.9, -0.2, 0.0, 0.4, 1.1}) {
        const double pruned = discrete_radon(f, theta, t, true);
        const double full = discrete_radon(f, theta, t, false);
        CHECK(std::abs(pruned - full) <= 1e-15);
    }
}

TEST_CASE("sinogram equals the scalar operations cell by cell") {
    Rng rng(19);
    const VoxelImage f = random_image(rng, {6, 6}, 0.4);
    DirectionSet dirs = circle_equispaced(7);
    const auto radii = default_radius_grid(f, 33);
    const Sinogram sino = compute_sinogram(f, dirs, radii);
    for (int i = 0; i < sino.num_directions(); ++i) {
        for (int j = 0; j < sino.num_radii(); ++j) {
            CHECK(sino.at(i, j) ==
                  discrete_radon(f, dirs.points[static_cast<size_t>(i)],
                                 radii[static_cast<size_t>(j)]));
        }
    }
    // regularized variant
    const double eps = default_regularization_eps(radii);
    const Sinogram reg = compute_sinogram(f, dirs, radii, eps);
    for (int i = 0; i < reg.num_directions(); ++i) {
        for (int j = 0; j < reg.num_radii(); ++j) {
            CHECK(reg.at(i, j) ==
                  discrete_radon_regularized(f, dirs.points[static_cast<size_t>(i)],
                                             radii[static_cast<size_t>(j)], eps));
        }
    }
    // zero image -> all-zero matrix
    const VoxelImage zero = VoxelImage::zeros({6, 6}, 0.4);
    const Sinogram zs = compute_sinogram(zero, dirs, radii);
    for (double v : zs.values) {
        CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(compute_sinogram(f, DirectionSet{}, radii), std::invalid_argument);
    CHECK_THROWS_AS(compute_sinogram(f, dirs, {}), std::invalid_argument);
    CHECK_THROWS_AS(compute_sinogram(f, dirs, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("regularized transform converges to the exact one") {
    VoxelImage img = VoxelImage::zeros({2, 2}, 1.0);
    for (double& v : img.values()) {
        v = 1.0;
    }
    const auto diag = unit_direction({1.0, 1.0});
    const double exact = discrete_radon(img, diag, 0.0);
    const double e1 = std::abs(discrete_radon_regularized(img, diag, 0.0, 1e-2) - exact);
    const double e2 = std::abs(discrete_radon_regularized(img, diag, 0.0, 1e-3) - exact);
    CHECK(e2 < e1);
    CHECK(e2 < 0.15 * e1);  // at least first order

    // single voxel on a plateau
    VoxelImage one = VoxelImage::zeros({3, 3}, 1.0);
    one.values()[one.flat_index({1, 1})] = 1.0;
    CHECK(discrete_radon_regularized(one, Direction::unit({1.0, 0.0}), 0.0, 0.1) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // eps spanning the full voxel support averages mass/(2 eps)
    const double eps = std::sqrt(2.0);
    CHECK(discrete_radon_regularized(one, diag, 0.0, eps) ==
          doctest::Approx(1.0 / (2.0 * eps)).epsilon(1e-12));
    CHECK_THROWS_AS(discrete_radon_regularized(one, diag, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("binned baseline") {
    VoxelImage one = VoxelImage::zeros({3, 3}, 0.5);
    one.values()[one.flat_index({1, 1})] = 1.0;
    const auto e1 = Direction::unit({1.0, 0.0});
    const auto row = binned_radon(one, e1, {0.0}, 0.25);
    // s^{d-1} * (s/(2b)) with one voxel in the bin: 0.5 * (0.5/0.5) = 0.5
    CHECK(row[0] == doctest::Approx(0.5));
    const auto empty = binned_radon(one, e1, {5.0}, 0.25);
    CHECK(empty[0] == 0.0);
    CHECK_THROWS_AS(binned_radon(one, e1, {0.0}, 0.0), std::invalid_argument);

    // Mass comparability: summed bins times spacing track the exact mass.
    Rng rng(23);
    const VoxelImage f = random_image(rng, {32, 32}, 1.0 / 32);
    const auto radii = default_radius_grid(f, 129);
    const double b = 0.5 * (radii[1] - radii[0]);
    const auto theta = unit_direction({0.6, 0.8});
    const auto bins = binned_radon(f, theta, radii, b);
    double mass = 0.0;
    for (double v : bins) {
        mass += v * (radii[1] - radii[0]);
    }
    const double exact_mass = std::pow(1.0 / 32, 2) * f.sum();
    CHECK(mass == doctest::Approx(exact_mass).epsilon(0.02));

    // Deviation from the exact transform is a benchmark metric, not a
    // correctness gate; it just has to be finite and nonzero here.
    const Sinogram sino = compute_sinogram(f, DirectionSet{2, DirectionScheme::explicit_set,
                                                           {theta}},
                                           radii);
    double mad = 0.0;
    for (size_t j = 0; j < radii.size(); ++j) {
        mad += std::abs(bins[j] - sino.values[j]) / static_cast<double>(radii.size());
    }
    CHECK(mad > 0.0);
    CHECK(std::isfinite(mad));
}

TEST_CASE("default radius grid covers every projection") {
    const VoxelImage f = VoxelImage::zeros({8, 8, 8}, 0.125);
    const auto radii = default_radius_grid(f);
    CHECK(radii.size() == 513);
    CHECK(radii.front() == -radii.back());
    CHECK(radii[256] == 0.0);
    const double rmax = 0.125 * std::numbers::sqrt3 * 8.0 / 2.0;
    CHECK(radii.back() == doctest::Approx(rmax));
}

TEST_CASE("RVOX round trip") {
    Rng rng(29);
    const VoxelImage f = random_image(rng, {3, 4, 5}, 0.37);
    const std::string path = temp_path("hyperradon_test.rvox");
    save_rvox(f, path);
    const VoxelImage g = load_rvox(path);
    CHECK(g.extents() == f.extents());
    CHECK(g.voxel_size() == f.voxel_size());
    CHECK(g.values() == f.values());
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_rvox("/nonexistent/file.rvox"), IoError);
    const std::string bad = temp_path("hyperradon_bad.rvox");
    {
        std::FILE* h = std::fopen(bad.c_str(), "wb");
        std::fwrite("JUNKJUNK", 1, 8, h);
        std::fclose(h);
    }
    CHECK_THROWS_AS(load_rvox(bad), ParseError);
    std::filesystem::remove(bad);
}

TEST_CASE("sinogram CSV format") {
    VoxelImage img = VoxelImage::zeros({2, 2}, 1.0);
    img.values()[0] = 1.0;
    DirectionSet dirs = circle_equispaced(2);
    const Sinogram sino = compute_sinogram(img, dirs, {-1.0, 0.0, 1.0});
    const std::string path = temp_path("hyperradon_test_sino.csv");
    save_sinogram_csv(sino, path, "hyperradon v1 test deadbeef");
    std::FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f);
    char line[256];
    REQUIRE(std::fgets(line, sizeof(line), f));
    CHECK(std::string(line) == "# hyperradon v1 test deadbeef\n");
    REQUIRE(std::fgets(line, sizeof(line), f));
    CHECK(std::string(line) == "theta_index,t,value\n");
    int rows = 0;
    while (std::fgets(line, sizeof(line), f)) {
        ++rows;
    }
    std::fclose(f);
    CHECK(rows == 6);
    std::filesystem::remove(path);
}
