#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "directions.hpp"
#include "geometry.hpp"
#include "nrcdt.hpp"
#include "voxel.hpp"

namespace hyperradon {

/// Free-support mixture of uniform cube probability measures with equal
/// weights 1/k. Widths are carried as logarithms so the optimizer stays
/// unconstrained.
struct CubeMixture {
    int k = 0;
    int dim = 0;
    std::vector<double> centers;     // [k x dim] row-major
    std::vector<double> log_widths;  // [k x dim]

    static CubeMixture from_widths(int k, int dim, std::vector<double> centers,
                                   const std::vector<double>& widths);

    double center(int j, int i) const {
        return centers[static_cast<size_t>(j) * static_cast<size_t>(dim) +
                       static_cast<size_t>(i)];
    }
    double width(int j, int i) const;
    std::vector<double> widths() const;
    std::vector<double> weights() const;
};

struct EmpiricalMeasure {
    int dim = 0;
    std::vector<std::vector<double>> points;

    static EmpiricalMeasure from_points(std::vector<std::vector<double>> points);
};

struct AdamParams {
    double lr = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.99;
    int epochs = 100;
    double eps_hat = 1e-8;
    /// Finite-difference gradients below this magnitude are treated as
    /// exact zeros; they sit under the FD noise floor and would otherwise
    /// drive ADAM steps of order lr.
    double grad_deadband = 1e-7;
};

struct SWConfig {
    DirectionSet directions;
    std::vector<double> radii;
    int num_quantiles = 256;
    AdamParams adam;
    uint64_t rng_seed = 1;  // seeds default initializations only
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    int step = 0;
};

/// Bias-corrected ADAM update in place.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const AdamParams& cfg);

/// Exact piecewise-polynomial CDF of the mixture pushed forward along one
/// direction. Built once per (mixture, direction); evaluation is O(log k)
/// in the breakpoint count, so quantile bisection stays cheap even for
/// large mixtures.
class MixtureProjection {
public:
    MixtureProjection(const CubeMixture& mixture, const Direction& theta);

    double cdf(double t) const;
    /// Density, the Radon transform of the mixture at offset t.
    double density(double t) const;
    /// Generalized inverse by bisection (10 iterations) inside the
    /// bracketing polynomial piece.
    double quantile(double xi) const;
    std::vector<double> quantiles(const std::vector<double>& xi_grid) const;

private:
    int degree_ = 0;
    std::vector<double> positions_;   // breakpoints, ascending
    std::vector<double> coeffs_;      // [piece x (degree+1)], local basis u = t - x_left
    std::vector<double> cdf_at_;      // CDF at each breakpoint, nondecreasing
    double piece_value(size_t piece, double t) const;
};

/// Midpoint-rule average of the squared quantile difference over xi.
double wasserstein1d_sq(const QuantileProfile& qa, const QuantileProfile& qb);

/// Projected empirical measure with point masses snapped to the nearest
/// radius grid point. Throws std::domain_error when a projection falls
/// outside the grid range.
DiscreteCDF radon_empirical(const EmpiricalMeasure& mu, const Direction& theta,
                            const std::vector<double>& radii);

/// Exact pushforward CDF of the mixture at offset t along theta.
double mixture_cdf(const CubeMixture& mixture, const Direction& theta, double t);

/// Measure that can be projected to 1D: a cube mixture, an empirical
/// measure, or a voxel image (projected with the discrete Radon transform).
class SWMeasure {
public:
    static SWMeasure from_mixture(CubeMixture m);
    static SWMeasure from_empirical(EmpiricalMeasure m);
    static SWMeasure from_image(VoxelImage image);

    int dim() const;
    const CubeMixture* mixture() const { return mixture_ ? &*mixture_ : nullptr; }

    /// Per-direction quantile profiles on the xi grid.
    std::vector<std::vector<double>> quantile_table(const DirectionSet& directions,
                                                    const std::vector<double>& radii,
                                                    const std::vector<double>& xi_grid) const;
    /// Per-direction Radon density rows for plot exports.
    Sinogram density_sinogram(const DirectionSet& directions,
                              const std::vector<double>& radii) const;

private:
    SWMeasure() = default;
    std::optional<CubeMixture> mixture_;
    std::optional<EmpiricalMeasure> empirical_;
    std::optional<VoxelImage> image_;
};

/// Sliced Wasserstein-2 squared between two projectable measures: the
/// average over cfg.directions of the 1D squared Wasserstein distance.
double sw2_sq(const SWMeasure& mu, const SWMeasure& nu, const SWConfig& cfg);

struct FitResult {
    CubeMixture mixture;
    std::vector<double> loss_trace;  // one value per epoch, after the update
    double initial_loss = 0.0;
};

using FitCallback =
    std::function<void(int epoch, const CubeMixture&, const std::vector<double>& trace)>;

/// ADAM minimization of SW2^2(mixture, target) over centers and log-widths
/// with central finite-difference gradients. Without an explicit init, k=2
/// starts at centers +-1/4 e with widths 1/10 e; other k draw seeded
/// centers near the origin.
FitResult fit_mixture(const EmpiricalMeasure& target, int k, const SWConfig& cfg,
                      std::optional<CubeMixture> init = std::nullopt,
                      const FitCallback& callback = nullptr);

/// ADAM minimization of lambda SW2^2(mu1, Y) + (1-lambda) SW2^2(mu2, Y).
FitResult sw_barycenter(const SWMeasure& mu1, const SWMeasure& mu2, double lambda, int k,
                        const SWConfig& cfg, std::optional<CubeMixture> init = std::nullopt,
                        const FitCallback& callback = nullptr);

/// JSON round trip: {"centers": [[...]], "widths": [[...]], "loss_trace":
/// [...], "initial_loss": x, "meta": {...}}.
void save_mixture_json(const CubeMixture& mixture, const std::vector<double>& loss_trace,
                       double initial_loss, const std::string& path,
                       const std::string& meta = "");
FitResult load_mixture_json(const std::string& path);

}  // namespace hyperradon
