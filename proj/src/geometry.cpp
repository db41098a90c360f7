#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace hyperradon {

namespace {

constexpr int kMaxSupport = 170;     // (l-1)! overflows double beyond this
constexpr int kCornerCacheBits = 20; // precompute corner sums up to 2^20
constexpr int kKahanThreshold = 10;  // compensated summation for l >= 10

const double* factorial_table() {
    static const auto table = [] {
        std::array<double, kMaxSupport> t{};
        t[0] = 1.0;
        for (int i = 1; i < kMaxSupport; ++i) {
            t[static_cast<size_t>(i)] = t[static_cast<size_t>(i - 1)] * i;
        }
        return t;
    }();
    return table.data();
}

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) {
        r *= x;
    }
    return r;
}

void check_finite(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + " has non-finite entry");
        }
    }
}

// Alternating vertex sum sum_k P(k) (t + <k,b>)_+^e over k in {-1,1}^l with
// all-positive b, accumulated in fixed lexicographic k order. The 0^0 := 0
// convention is realized by the strict u > 0 test.
double power_sum(std::span<const double> b, std::span<const double> corner,
                 std::span<const signed char> sign, double t, int e) {
    const int ell = static_cast<int>(b.size());
    const uint64_t n = uint64_t(1) << ell;
    const bool kahan = ell >= kKahanThreshold;
    double sum = 0.0;
    double comp = 0.0;
    for (uint64_t m = 0; m < n; ++m) {
        double u;
        if (!corner.empty()) {
            u = t + corner[m];
        } else {
            double dot = 0.0;
            for (int j = 0; j < ell; ++j) {
                dot += (m >> j) & 1 ? b[static_cast<size_t>(j)] : -b[static_cast<size_t>(j)];
            }
            u = t + dot;
        }
        if (u <= 0.0) {
            continue;
        }
        double s;
        if (!sign.empty()) {
            s = sign[m];
        } else {
            s = ((ell - std::popcount(m)) & 1) ? -1.0 : 1.0;
        }
        const double term = s * ipow(u, e);
        if (kahan) {
            const double y = term - comp;
            const double tmp = sum + y;
            comp = (tmp - sum) - y;
            sum = tmp;
        } else {
            sum += term;
        }
    }
    return sum;
}

// Axis-aligned case l = 1: indicator of (-b, b] in t/sign scaled by the
// remaining box faces (the paper's degenerate formula).
double area_axis_case(const HalfWidths& a, const Direction& theta, double t) {
    const int i = theta.support()[0];
    const double b = a[i] * std::abs(theta[i]);
    const double height = std::ldexp(product_all(a.values()), a.dim() - 1) / b;
    return (t > -b && t <= b) ? height : 0.0;
}

}  // namespace

HalfWidths::HalfWidths(std::vector<double> a) : a_(std::move(a)) {
    if (a_.empty()) {
        throw std::invalid_argument("HalfWidths: dimension must be >= 1");
    }
    for (double v : a_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("HalfWidths: entries must be strictly positive");
        }
    }
}

Direction::Direction(std::vector<double> theta) : theta_(std::move(theta)) {
    if (theta_.empty()) {
        throw std::invalid_argument("Direction: dimension must be >= 1");
    }
    check_finite(theta_, "Direction");
    for (int i = 0; i < static_cast<int>(theta_.size()); ++i) {
        if (theta_[static_cast<size_t>(i)] != 0.0) {
            support_.push_back(i);
        }
    }
    if (support_.empty()) {
        throw std::invalid_argument("Direction: zero vector");
    }
}

Direction Direction::unit(std::vector<double> theta) {
    Direction d(std::move(theta));
    if (std::abs(d.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("Direction::unit: vector is not unit norm");
    }
    return d;
}

Direction Direction::raw(std::vector<double> theta) {
    return Direction(std::move(theta));
}

double Direction::norm() const {
    double s = 0.0;
    for (double v : theta_) {
        s += v * v;
    }
    return std::sqrt(s);
}

double product_all(std::span<const double> x) {
    double p = 1.0;
    for (double v : x) {
        p *= v;
    }
    return p;
}

std::vector<double> restrict_to_support(std::span<const double> x) {
    std::vector<double> r;
    for (double v : x) {
        if (v != 0.0) {
            r.push_back(v);
        }
    }
    return r;
}

std::vector<double> snap_tolerance(std::vector<double> x, double tol) {
    for (double& v : x) {
        if (std::abs(v) <= tol) {
            v = 0.0;
        }
    }
    return x;
}

CubeSection::CubeSection(const HalfWidths& a, const Direction& theta)
    : ell_(theta.ell()) {
    if (a.dim() != theta.dim()) {
        throw std::invalid_argument("CubeSection: dimension mismatch");
    }
    if (ell_ >= kMaxSupport) {
        throw std::invalid_argument("CubeSection: direction support too large");
    }
    b_.reserve(static_cast<size_t>(ell_));
    double prod_b = 1.0;
    support_radius_ = 0.0;
    for (int i : theta.support()) {
        const double b = a[i] * std::abs(theta[i]);
        b_.push_back(b);
        prod_b *= b;
        support_radius_ += b;
    }
    const double pa = product_all(a.values());
    box_volume_ = std::ldexp(pa, a.dim());
    const double common = std::ldexp(pa, a.dim() - ell_) / prod_b;
    factor_area_ = common / factorial_table()[ell_ - 1];
    factor_slab_ = common / factorial_table()[ell_];

    if (ell_ <= kCornerCacheBits) {
        const uint64_t n = uint64_t(1) << ell_;
        corner_.resize(n);
        sign_.resize(n);
        for (uint64_t m = 0; m < n; ++m) {
            double dot = 0.0;
            for (int j = 0; j < ell_; ++j) {
                dot += (m >> j) & 1 ? b_[static_cast<size_t>(j)] : -b_[static_cast<size_t>(j)];
            }
            corner_[m] = dot;
            sign_[m] = ((ell_ - std::popcount(m)) & 1) ? -1 : 1;
        }
    }
}

double CubeSection::signed_power_sum(double t, int exponent) const {
    return power_sum(b_, corner_, sign_, t, exponent);
}

double CubeSection::area(double t) const {
    if (std::abs(t) > support_radius_) {
        return 0.0;
    }
    if (ell_ >= 2) {
        // A(t) = A(-t) for the centered box; evaluating the canonical side
        // makes the symmetry hold bitwise. (For l = 1 the half-open
        // indicator boundary must stay as printed.)
        t = -std::abs(t);
    }
    const double v = factor_area_ * signed_power_sum(t, ell_ - 1);
    return std::max(v, 0.0);
}

double CubeSection::slab_volume(double t1, double t2) const {
    if (!(t1 < t2)) {
        throw std::invalid_argument("slab_volume: requires t1 < t2");
    }
    // The area vanishes outside [-R, R]; clamping keeps wide slabs exact.
    const double lo = std::clamp(t1, -support_radius_, support_radius_);
    const double hi = std::clamp(t2, -support_radius_, support_radius_);
    if (!(lo < hi)) {
        return 0.0;
    }
    if (lo == -support_radius_ && hi == support_radius_) {
        return box_volume_;  // full coverage, exact by construction
    }
    const double v =
        factor_slab_ * (signed_power_sum(hi, ell_) - signed_power_sum(lo, ell_));
    return std::max(v, 0.0);
}

double CubeSection::area_regularized(double t, double eps) const {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("area_regularized: requires eps > 0");
    }
    return slab_volume(t - eps, t + eps) / (2.0 * eps);
}

double cube_plane_area(const HalfWidths& a, const Direction& theta, double t) {
    return CubeSection(a, theta).area(t);
}

double cube_plane_area_2d(const HalfWidths& a, const Direction& theta, double t) {
    if (a.dim() != 2 || theta.dim() != 2) {
        throw std::invalid_argument("cube_plane_area_2d: requires d = 2");
    }
    if (theta.ell() == 1) {
        return area_axis_case(a, theta, t);
    }
    // Corner projections <theta, a o k> sorted ascending.
    std::array<double, 4> ti{};
    int idx = 0;
    for (int k0 : {-1, 1}) {
        for (int k1 : {-1, 1}) {
            ti[static_cast<size_t>(idx++)] = k0 * a[0] * theta[0] + k1 * a[1] * theta[1];
        }
    }
    std::sort(ti.begin(), ti.end());
    const double inv = 1.0 / std::abs(theta[0] * theta[1]);
    double v = 0.0;
    if (t <= ti[0] || t >= ti[3]) {
        v = 0.0;
    } else if (t <= ti[1]) {
        v = (t - ti[0]) * inv;
    } else if (t <= ti[2]) {
        v = (ti[1] - ti[0]) * inv;
    } else {
        v = (ti[3] - t) * inv;
    }
    return std::max(v, 0.0);
}

double cube_plane_area_3d(const HalfWidths& a, const Direction& theta, double t) {
    if (a.dim() != 3 || theta.dim() != 3) {
        throw std::invalid_argument("cube_plane_area_3d: requires d = 3");
    }
    const int ell = theta.ell();
    if (ell == 1) {
        return area_axis_case(a, theta, t);
    }
    if (ell == 2) {
        // Degenerate direction: section factorizes into the spanned 2D
        // section times the full extent 2 a_j of the zero axis.
        int j = 0;
        while (theta[j] != 0.0) {
            ++j;
        }
        std::vector<double> a2;
        std::vector<double> th2;
        for (int i = 0; i < 3; ++i) {
            if (i != j) {
                a2.push_back(a[i]);
                th2.push_back(theta[i]);
            }
        }
        return 2.0 * a[j] * cube_plane_area_2d(HalfWidths(a2), Direction::raw(th2), t);
    }
    std::array<double, 8> ti{};
    int idx = 0;
    for (int k0 : {-1, 1}) {
        for (int k1 : {-1, 1}) {
            for (int k2 : {-1, 1}) {
                ti[static_cast<size_t>(idx++)] =
                    k0 * a[0] * theta[0] + k1 * a[1] * theta[1] + k2 * a[2] * theta[2];
            }
        }
    }
    std::sort(ti.begin(), ti.end());
    const double t1 = ti[0];
    const double t2 = ti[1];
    const double t3 = ti[2];
    const double t4 = ti[3];
    const double den = 2.0 * std::abs(theta[0] * theta[1] * theta[2]);
    const double u = t > 0.0 ? -t : t;  // A(t) = A(-t) for the centered cube
    double v = 0.0;
    if (u <= t1) {
        v = 0.0;
    } else if (u <= t2) {
        v = (u - t1) * (u - t1) / den;
    } else if (u <= t3) {
        v = (t2 - t1) * (2.0 * u - t2 - t1) / den;
    } else if (u <= t4) {
        // Three active corner terms with signs +,-,-.
        v = (-u * u + 2.0 * u * (t2 + t3 - t1) + t1 * t1 - t2 * t2 - t3 * t3) / den;
    } else {
        // Central branch (t4, 0]. The sign of the fourth activated corner
        // term depends on whether one side projection dominates the other
        // two: below the threshold the profile is a parabolic cap, above it
        // a constant plateau. (t1 + t4 == t2 + t3 holds identically in the
        // plateau case, so the t-values cannot discriminate robustly.)
        const double b0 = a[0] * std::abs(theta[0]);
        const double b1b = a[1] * std::abs(theta[1]);
        const double b2b = a[2] * std::abs(theta[2]);
        if (2.0 * std::max({b0, b1b, b2b}) < b0 + b1b + b2b) {
            v = (t1 * t1 - t2 * t2 - t3 * t3 - t4 * t4 - 2.0 * u * u) / den;
        } else {
            v = (t1 * t1 - t2 * t2 - t3 * t3 + t4 * t4) / den;
        }
    }
    return std::max(v, 0.0);
}

double cube_slab_volume(const HalfWidths& a, const Direction& theta, SlabInterval slab) {
    return CubeSection(a, theta).slab_volume(slab.t1, slab.t2);
}

double cube_plane_area_regularized(const HalfWidths& a, const Direction& theta,
                                   double t, double eps) {
    return CubeSection(a, theta).area_regularized(t, eps);
}

double indicator_convolution(std::span<const double> b, double t) {
    const int k = static_cast<int>(b.size());
    if (k < 1) {
        throw std::invalid_argument("indicator_convolution: empty widths");
    }
    if (k >= kMaxSupport) {
        throw std::invalid_argument("indicator_convolution: too many factors");
    }
    for (double v : b) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("indicator_convolution: widths must be positive");
        }
    }
    const double factor =
        std::pow(2.0 * std::numbers::pi, 0.5 * (1 - k)) / factorial_table()[k - 1];
    return factor * power_sum(b, {}, {}, t, k - 1);
}

}  // namespace hyperradon
