#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "ingest.hpp"
#include "rng.hpp"
#include "sliced_wasserstein.hpp"

using namespace hyperradon;

namespace {

CubeMixture random_mixture(Rng& rng, int k, int dim) {
    std::vector<double> centers(static_cast<size_t>(k) * dim);
    std::vector<double> widths(centers.size());
    for (double& c : centers) {
        c = rng.uniform(-0.5, 0.5);
    }
    for (double& w : widths) {
        w = rng.uniform(0.05, 0.4);
    }
    return CubeMixture::from_widths(k, dim, std::move(centers), widths);
}

SWConfig small_config(int dim, int dirs = 32, int radii_count = 101, int quantiles = 128) {
    SWConfig cfg;
    cfg.directions = dim == 2 ? circle_equispaced(dirs) : fibonacci_sphere(dirs);
    const double r = std::sqrt(static_cast<double>(dim));
    cfg.radii = linspace(-r, r, radii_count);
    cfg.num_quantiles = quantiles;
    return cfg;
}

QuantileProfile make_profile(std::vector<double> xi, std::vector<double> values) {
    QuantileProfile p;
    p.xi_grid = std::move(xi);
    p.values = std::move(values);
    return p;
}

}  // namespace

TEST_CASE("wasserstein1d_sq golden values") {
    const auto xi = default_xi_grid(256);
    // identical profiles
    std::vector<double> q(xi.size(), 0.3);
    CHECK(wasserstein1d_sq(make_profile(xi, q), make_profile(xi, q)) == 0.0);
    // Dirac at 0 vs Dirac at 1: constant quantiles 0 and 1
    std::vector<double> zero(xi.size(), 0.0);
    std::vector<double> one(xi.size(), 1.0);
    CHECK(wasserstein1d_sq(make_profile(xi, zero), make_profile(xi, one)) == 1.0);
    // Uniform[0,1] vs Dirac at 1/2: integral of (s - 1/2)^2 = 1/12
    std::vector<double> uniform(xi.begin(), xi.end());
    std::vector<double> half(xi.size(), 0.5);
    const double w = wasserstein1d_sq(make_profile(xi, uniform), make_profile(xi, half));
    CHECK(std::abs(w - 1.0 / 12.0) < 2.0 / (256.0 * 256.0));
    CHECK_THROWS_AS(wasserstein1d_sq(make_profile(xi, q), make_profile(default_xi_grid(16),
                                                                       std::vector<double>(16))),
                    std::invalid_argument);
}

TEST_CASE("radon_empirical snapping and order statistics") {
    const auto radii = linspace(-2.0, 2.0, 81);
    EmpiricalMeasure one = EmpiricalMeasure::from_points({{0.0, 0.0}});
    const auto e1 = Direction::unit({1.0, 0.0});
    const DiscreteCDF step = radon_empirical(one, e1, radii);
    const double cell0 = radii[1] - radii[0];
    CHECK(std::abs(quantile(step, 0.5)) <= cell0);

    EmpiricalMeasure pair = EmpiricalMeasure::from_points({{0.75, 0.0}, {-0.75, 0.0}});
    const DiscreteCDF two = radon_empirical(pair, e1, radii);
    CHECK(quantile(two, 0.25) == doctest::Approx(-0.75).epsilon(0.05));
    CHECK(quantile(two, 0.80) == doctest::Approx(0.75).epsilon(0.05));

    // random cloud: quantiles track sorted projections within one grid cell
    Rng rng(3);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 17; ++i) {
        pts.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
    const EmpiricalMeasure cloud = EmpiricalMeasure::from_points(pts);
    const auto theta = Direction::unit({0.6, 0.8});
    const DiscreteCDF cdf = radon_empirical(cloud, theta, radii);
    std::vector<double> proj;
    for (const auto& p : pts) {
        proj.push_back(0.6 * p[0] + 0.8 * p[1]);
    }
    std::sort(proj.begin(), proj.end());
    const double cell = radii[1] - radii[0];
    for (int i = 1; i <= 9; ++i) {
        const double xi = i / 10.0;
        const double order_stat = proj[static_cast<size_t>(std::floor(xi * 17.0))];
        // half a cell of snapping plus interpolation inside the crossing cell
        CHECK(std::abs(quantile(cdf, xi) - order_stat) <= 2.0 * cell + 1e-12);
    }

    // projection outside the grid is an error
    EmpiricalMeasure far = EmpiricalMeasure::from_points({{5.0, 0.0}});
    CHECK_THROWS_AS(radon_empirical(far, e1, radii), std::domain_error);
}

TEST_CASE("mixture_cdf basics") {
    const CubeMixture single =
        CubeMixture::from_widths(1, 1, {0.0}, std::vector<double>{1.0});
    const auto e1 = Direction::unit({1.0});
    CHECK(mixture_cdf(single, e1, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mixture_cdf(single, e1, -5.0) == 0.0);
    CHECK(mixture_cdf(single, e1, 5.0) == doctest::Approx(1.0).epsilon(1e-12));

    // two equal cubes: the CDF is the average of two shifted single-cube
    // CDFs; cross-check against brute-force numerical integration of the
    // projected density.
    const CubeMixture two = CubeMixture::from_widths(
        2, 2, {-0.4, 0.0, 0.4, 0.0}, std::vector<double>{0.2, 0.2, 0.2, 0.2});
    const auto ex = Direction::unit({1.0, 0.0});
    for (double t : {-0.5, -0.3, 0.0, 0.3, 0.55}) {
        const CubeMixture a =
            CubeMixture::from_widths(1, 2, {-0.4, 0.0}, std::vector<double>{0.2, 0.2});
        const CubeMixture b =
            CubeMixture::from_widths(1, 2, {0.4, 0.0}, std::vector<double>{0.2, 0.2});
        const double avg = 0.5 * (mixture_cdf(a, ex, t) + mixture_cdf(b, ex, t));
        CHECK(mixture_cdf(two, ex, t) == doctest::Approx(avg).epsilon(1e-12));
    }
    // numerical quadrature of the projected density (uniform on [-0.6,-0.2]
    // union [0.2, 0.6] with equal mass)
    auto density = [](double x) {
        if (x > -0.6 && x <= -0.2) {
            return 0.5 / 0.4;
        }
        if (x > 0.2 && x <= 0.6) {
            return 0.5 / 0.4;
        }
        return 0.0;
    };
    for (double t : {-0.4, 0.0, 0.35}) {
        double integral = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double x = -1.0 + 2.0 * (i + 0.5) / n;
            if (x <= t) {
                integral += density(x) * (2.0 / n);
            }
        }
        CHECK(mixture_cdf(two, ex, t) == doctest::Approx(integral).epsilon(1e-3));
    }
}

TEST_CASE("MixtureProjection matches mixture_cdf and is monotone") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 3;
        const CubeMixture mix = random_mixture(rng, 1 + static_cast<int>(rng.uniform_index(4)),
                                               dim);
        std::vector<double> v(static_cast<size_t>(dim));
        for (double& x : v) {
            x = rng.gaussian();
        }
        double n = 0.0;
        for (double x : v) {
            n += x * x;
        }
        for (double& x : v) {
            x /= std::sqrt(n);
        }
        const auto theta = Direction::unit(v);
        const MixtureProjection proj(mix, theta);
        double prev = -0.1;
        for (int i = 0; i <= 60; ++i) {
            const double t = -1.5 + 3.0 * i / 60.0;
            const double reference = mixture_cdf(mix, theta, t);
            const double fast = proj.cdf(t);
            CHECK(std::abs(fast - reference) < 1e-9);
            CHECK(fast >= prev - 1e-12);
            prev = fast;
        }
        // quantile inverts the cdf
        for (double xi : {0.05, 0.3, 0.5, 0.7, 0.95}) {
            const double q = proj.quantile(xi);
            CHECK(std::abs(proj.cdf(q) - xi) < 0.02);
        }
        // density integrates to ~1 (trapezoid over the support)
        const auto grid = linspace(-2.0, 2.0, 2001);
        double mass = 0.0;
        for (size_t i = 1; i < grid.size(); ++i) {
            mass += 0.5 * (proj.density(grid[i - 1]) + proj.density(grid[i])) *
                    (grid[i] - grid[i - 1]);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("sw2_sq properties") {
    Rng rng(29);
    const SWConfig cfg = small_config(2);
    const CubeMixture m = random_mixture(rng, 3, 2);
    const auto mm = SWMeasure::from_mixture(m);
    CHECK(sw2_sq(mm, mm, cfg) <= 1e-10);

    // two Diracs: SW2^2 -> |p - q|^2 / d for dense direction sets
    const std::vector<double> p{0.4, -0.2};
    const std::vector<double> q{-0.3, 0.5};
    const SWConfig dense = small_config(2, 128, 513, 64);
    const auto mp = SWMeasure::from_empirical(EmpiricalMeasure::from_points({p}));
    const auto mq = SWMeasure::from_empirical(EmpiricalMeasure::from_points({q}));
    const double dist2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]);
    CHECK(sw2_sq(mp, mq, dense) == doctest::Approx(dist2 / 2.0).epsilon(0.05));

    // triangle inequality for sqrt(SW2^2) on three random mixtures
    const CubeMixture a = random_mixture(rng, 2, 2);
    const CubeMixture b = random_mixture(rng, 2, 2);
    const CubeMixture c = random_mixture(rng, 2, 2);
    const double ab = std::sqrt(sw2_sq(SWMeasure::from_mixture(a), SWMeasure::from_mixture(b), cfg));
    const double bc = std::sqrt(sw2_sq(SWMeasure::from_mixture(b), SWMeasure::from_mixture(c), cfg));
    const double ac = std::sqrt(sw2_sq(SWMeasure::from_mixture(a), SWMeasure::from_mixture(c), cfg));
    CHECK(ac <= ab + bc + 1e-9);
}

TEST_CASE("adam_step") {
    AdamParams cfg;
    cfg.lr = 0.05;
    AdamState state;
    std::vector<double> params{1.0, -2.0};
    adam_step(params, {0.0, 0.0}, state, cfg);
    CHECK(params == std::vector<double>{1.0, -2.0});  // zero gradient: no move

    // constant gradient: the bias-corrected first step is ~ lr * sign(g)
    AdamState s2;
    std::vector<double> p2{0.0};
    adam_step(p2, {3.0}, s2, cfg);
    CHECK(p2[0] == doctest::Approx(-cfg.lr).epsilon(1e-6));

    AdamState s3;
    std::vector<double> p3{0.0};
    adam_step(p3, {3.0}, s3, cfg);
    CHECK(p3[0] == p2[0]);  // determinism
    CHECK_THROWS_AS(adam_step(p3, {1.0, 2.0}, s3, cfg), std::invalid_argument);
}

TEST_CASE("finite-difference gradient consistency of the SW loss") {
    // Validate the FD gradient assembly: directional derivative along a
    // random unit vector matches the assembled gradient's projection. The
    // probe mixture is two nested cubes: gapped components create genuine
    // quantile-plateau jumps where the loss is not differentiable at all.
    Rng rng(31);
    const SWConfig cfg = small_config(2, 16, 101, 64);
    const EmpiricalMeasure target =
        EmpiricalMeasure::from_points(sample_two_cluster_cloud(16, 2, 9));
    const auto target_m = SWMeasure::from_empirical(target);
    const CubeMixture mix = CubeMixture::from_widths(
        2, 2, {0.05, -0.03, 0.0, 0.02}, std::vector<double>{0.45, 0.5, 0.2, 0.25});
    auto loss_at = [&](const CubeMixture& m) {
        return sw2_sq(SWMeasure::from_mixture(m), target_m, cfg);
    };

    const size_t n_params = mix.centers.size() + mix.log_widths.size();
    std::vector<double> grad(n_params);
    auto perturbed = [&](size_t i, double h) {
        CubeMixture m = mix;
        if (i < mix.centers.size()) {
            m.centers[i] += h;
        } else {
            m.log_widths[i - mix.centers.size()] += h;
        }
        return m;
    };
    for (size_t i = 0; i < n_params; ++i) {
        const double base =
            i < mix.centers.size() ? mix.centers[i] : mix.log_widths[i - mix.centers.size()];
        const double h = 1e-4 * (1.0 + std::abs(base));
        grad[i] = (loss_at(perturbed(i, h)) - loss_at(perturbed(i, -h))) / (2.0 * h);
    }
    std::vector<double> u(n_params);
    double norm = 0.0;
    for (double& v : u) {
        v = rng.gaussian();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : u) {
        v /= norm;
    }
    const double h = 1e-4;
    CubeMixture up = mix;
    CubeMixture down = mix;
    for (size_t i = 0; i < mix.centers.size(); ++i) {
        up.centers[i] += h * u[i];
        down.centers[i] -= h * u[i];
    }
    for (size_t i = 0; i < mix.log_widths.size(); ++i) {
        up.log_widths[i] += h * u[mix.centers.size() + i];
        down.log_widths[i] -= h * u[mix.centers.size() + i];
    }
    const double directional = (loss_at(up) - loss_at(down)) / (2.0 * h);
    double dot = 0.0;
    for (size_t i = 0; i < n_params; ++i) {
        dot += grad[i] * u[i];
    }
    CHECK(directional == doctest::Approx(dot).epsilon(1e-3));
}

TEST_CASE("fit_mixture single point target") {
    SWConfig cfg = small_config(2, 32, 201, 64);
    cfg.adam.epochs = 60;
    const EmpiricalMeasure target = EmpiricalMeasure::from_points({{0.3, -0.2}});
    const auto init = CubeMixture::from_widths(1, 2, {0.0, 0.0}, std::vector<double>{0.1, 0.1});
    const FitResult fit = fit_mixture(target, 1, cfg, init);
    CHECK(std::abs(fit.mixture.center(0, 0) - 0.3) < 0.05);
    CHECK(std::abs(fit.mixture.center(0, 1) + 0.2) < 0.05);
    // widths shrink in trend towards the degenerate optimum
    CHECK(fit.mixture.width(0, 0) < 0.1);
    CHECK(fit.mixture.width(0, 1) < 0.1);
    // loss decreases and stays finite
    CHECK(fit.loss_trace.back() < fit.initial_loss);
    for (double v : fit.loss_trace) {
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("fit_mixture zero epochs returns the init") {
    SWConfig cfg = small_config(2, 8, 51, 32);
    cfg.adam.epochs = 0;
    const EmpiricalMeasure target = EmpiricalMeasure::from_points({{0.5, 0.5}});
    const auto init =
        CubeMixture::from_widths(1, 2, {-0.1, 0.2}, std::vector<double>{0.3, 0.25});
    const FitResult fit = fit_mixture(target, 1, cfg, init);
    CHECK(fit.mixture.centers == init.centers);
    CHECK(fit.mixture.log_widths == init.log_widths);
    CHECK(fit.loss_trace.empty());
    CHECK(fit.initial_loss > 0.0);
}

TEST_CASE("barycenter of symmetric Diracs lands near the midpoint") {
    SWConfig cfg = small_config(2, 32, 201, 64);
    cfg.adam.epochs = 60;
    const auto mu1 = SWMeasure::from_empirical(EmpiricalMeasure::from_points({{0.6, 0.0}}));
    const auto mu2 = SWMeasure::from_empirical(EmpiricalMeasure::from_points({{-0.6, 0.0}}));
    const auto init =
        CubeMixture::from_widths(1, 2, {0.25, 0.1}, std::vector<double>{0.05, 0.05});
    const FitResult fit = sw_barycenter(mu1, mu2, 0.5, 1, cfg, init);
    CHECK(std::abs(fit.mixture.center(0, 0)) < 0.1);
    CHECK(std::abs(fit.mixture.center(0, 1)) < 0.1);
    CHECK_THROWS_AS(sw_barycenter(mu1, mu2, 0.0, 1, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sw_barycenter(mu1, mu2, 1.0, 1, cfg), std::invalid_argument);
}

TEST_CASE("mixture JSON round trip") {
    Rng rng(41);
    const CubeMixture mix = random_mixture(rng, 3, 3);
    const std::string path =
        (std::filesystem::temp_directory_path() / "hyperradon_mixture.json").string();
    save_mixture_json(mix, {0.5, 0.25, 0.1}, 0.9, path, "unit test");
    const FitResult loaded = load_mixture_json(path);
    CHECK(loaded.mixture.k == 3);
    CHECK(loaded.mixture.dim == 3);
    for (size_t i = 0; i < mix.centers.size(); ++i) {
        CHECK(loaded.mixture.centers[i] == doctest::Approx(mix.centers[i]).epsilon(1e-15));
        CHECK(loaded.mixture.log_widths[i] ==
              doctest::Approx(mix.log_widths[i]).epsilon(1e-12));
    }
    CHECK(loaded.loss_trace == std::vector<double>{0.5, 0.25, 0.1});
    CHECK(loaded.initial_loss == 0.9);
    std::filesystem::remove(path);
}

TEST_CASE("image-backed measures project through the discrete transform") {
    ShapeParams ball;
    ball.radius = 0.3;
    const VoxelImage img = synth_shape(ShapeKind::solid_sphere, ball, 24);
    const auto m = SWMeasure::from_image(img);
    SWConfig cfg = small_config(3, 12, 65, 48);
    cfg.radii = linspace(-0.9, 0.9, 65);
    // the measure is its own nearest neighbor
    CHECK(sw2_sq(m, m, cfg) == 0.0);
    // and a concentric mixture cube is close in SW distance compared with a
    // far-away one
    const auto near_mix = SWMeasure::from_mixture(
        CubeMixture::from_widths(1, 3, {0.0, 0.0, 0.0}, std::vector<double>{0.24, 0.24, 0.24}));
    const auto far_mix = SWMeasure::from_mixture(
        CubeMixture::from_widths(1, 3, {0.3, 0.3, 0.2}, std::vector<double>{0.05, 0.05, 0.05}));
    CHECK(sw2_sq(m, near_mix, cfg) < sw2_sq(m, far_mix, cfg));
}

TEST_CASE("weights are uniform over components") {
    const CubeMixture mix = CubeMixture::from_widths(
        2, 2, {0.0, 0.0, 0.5, 0.5}, std::vector<double>{0.1, 0.1, 0.2, 0.2});
    const auto w = mix.weights();
    CHECK(w[0] == 0.5);
    CHECK(w[1] == 0.5);
    CHECK_THROWS_AS(CubeMixture::from_widths(1, 2, {0.0, 0.0}, std::vector<double>{0.1, 0.0}),
                    std::invalid_argument);
}
