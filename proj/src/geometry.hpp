#pragma once

#include <span>
#include <vector>

namespace hyperradon {

/// Half-widths a of the centered axis-aligned box (-a, a].
class HalfWidths {
public:
    explicit HalfWidths(std::vector<double> a);

    int dim() const { return static_cast<int>(a_.size()); }
    double operator[](int i) const { return a_[static_cast<size_t>(i)]; }
    const std::vector<double>& values() const { return a_; }

private:
    std::vector<double> a_;
};

/// A direction vector with cached support (indices of structurally nonzero
/// entries). An entry counts as zero only if it is exactly 0.0; use
/// snap_tolerance() first if snapping is wanted.
class Direction {
public:
    /// Unit-norm direction; rejects |‖theta‖₂ − 1| > 1e-12.
    static Direction unit(std::vector<double> theta);
    /// Raw (possibly non-unit) direction vector; rejects the zero vector.
    static Direction raw(std::vector<double> theta);

    int dim() const { return static_cast<int>(theta_.size()); }
    int ell() const { return static_cast<int>(support_.size()); }
    const std::vector<int>& support() const { return support_; }
    const std::vector<double>& values() const { return theta_; }
    double operator[](int i) const { return theta_[static_cast<size_t>(i)]; }
    double norm() const;

private:
    explicit Direction(std::vector<double> theta);

    std::vector<double> theta_;
    std::vector<int> support_;
};

/// Offset interval [t1, t2] along a direction.
struct SlabInterval {
    double t1;
    double t2;
};

/// Product of all entries; empty vector gives 1.
double product_all(std::span<const double> x);

/// Subvector of nonzero entries in original order (x°).
std::vector<double> restrict_to_support(std::span<const double> x);

/// Copy of x with entries |x_j| <= tol replaced by exact 0.0.
std::vector<double> snap_tolerance(std::vector<double> x, double tol = 0.0);

/// Prepared evaluator for sections and slabs of one (box, direction) pair.
/// Precomputes the corner projections of the vertex sum so that repeated
/// evaluation over t is cheap. All evaluations use a fixed summation order,
/// so results are bitwise reproducible.
class CubeSection {
public:
    CubeSection(const HalfWidths& a, const Direction& theta);

    /// Section area A(t) of the box with the hyperplane <x,theta> = t.
    double area(double t) const;
    /// Volume of the box intersected with the slab t1 <= <x,theta> <= t2.
    double slab_volume(double t1, double t2) const;
    /// Slab average (1/(2 eps)) * V(t - eps, t + eps).
    double area_regularized(double t, double eps) const;

    /// Support radius sum_j a_j |theta_j|; area(t) == 0 for |t| > radius.
    double support_radius() const { return support_radius_; }
    /// Full box volume 2^d P(a).
    double box_volume() const { return box_volume_; }
    int ell() const { return ell_; }

private:
    double signed_power_sum(double t, int exponent) const;

    int ell_;
    double factor_area_;       // 2^{d-l} P(a) / (prod b * (l-1)!)
    double factor_slab_;       // 2^{d-l} P(a) / (prod b * l!)
    double support_radius_;
    double box_volume_;
    std::vector<double> b_;    // |a_j theta_j| over the support of theta
    std::vector<double> corner_;  // <k, b> for k in {-1,1}^l, empty if l large
    std::vector<signed char> sign_;
};

/// Section area of the box (-a, a] with the hyperplane <x,theta> = t.
/// theta may be non-unit; the value then measures the section scaled by
/// 1/|theta| (the formula stays valid for raw vectors).
double cube_plane_area(const HalfWidths& a, const Direction& theta, double t);

/// Explicit 2D piecewise-linear form; must agree with cube_plane_area.
double cube_plane_area_2d(const HalfWidths& a, const Direction& theta, double t);

/// Explicit 3D quadratic-spline form; must agree with cube_plane_area.
double cube_plane_area_3d(const HalfWidths& a, const Direction& theta, double t);

/// Volume of the box intersected with the slab [t1, t2] along theta.
double cube_slab_volume(const HalfWidths& a, const Direction& theta, SlabInterval slab);

/// (1/(2 eps)) * V(t - eps, t + eps); converges to the sharp area as eps -> 0.
double cube_plane_area_regularized(const HalfWidths& a, const Direction& theta,
                                   double t, double eps);

/// k-fold convolution of interval indicators 1_{b_1} * ... * 1_{b_k}
/// under the (2 pi)^{-1/2}-normalized convolution.
double indicator_convolution(std::span<const double> b, double t);

}  // namespace hyperradon
