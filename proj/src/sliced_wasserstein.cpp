#include "sliced_wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace hyperradon {

namespace {

std::vector<double> default_xi(const SWConfig& cfg) {
    return default_xi_grid(cfg.num_quantiles);
}

std::vector<double> pack_params(const CubeMixture& m) {
    std::vector<double> p;
    p.reserve(m.centers.size() + m.log_widths.size());
    p.insert(p.end(), m.centers.begin(), m.centers.end());
    p.insert(p.end(), m.log_widths.begin(), m.log_widths.end());
    return p;
}

CubeMixture unpack_params(const std::vector<double>& p, int k, int dim) {
    CubeMixture m;
    m.k = k;
    m.dim = dim;
    const size_t half = static_cast<size_t>(k) * static_cast<size_t>(dim);
    m.centers.assign(p.begin(), p.begin() + static_cast<ptrdiff_t>(half));
    m.log_widths.assign(p.begin() + static_cast<ptrdiff_t>(half), p.end());
    return m;
}

struct TargetSet {
    double weight = 1.0;
    std::vector<std::vector<double>> quantiles;  // [direction][xi]
};

double mixture_loss(const CubeMixture& mixture, const std::vector<TargetSet>& targets,
                    const DirectionSet& directions, const std::vector<double>& xi_grid) {
    const int n_dir = directions.count();
    std::vector<double> per_dir(static_cast<size_t>(n_dir), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_dir; ++i) {
        const MixtureProjection proj(mixture, directions.points[static_cast<size_t>(i)]);
        const std::vector<double> q = proj.quantiles(xi_grid);
        double acc = 0.0;
        for (const auto& target : targets) {
            const auto& qt = target.quantiles[static_cast<size_t>(i)];
            double w = 0.0;
            for (size_t l = 0; l < q.size(); ++l) {
                const double diff = q[l] - qt[l];
                w += diff * diff;
            }
            acc += target.weight * w / static_cast<double>(q.size());
        }
        per_dir[static_cast<size_t>(i)] = acc;
    }
    double total = 0.0;
    for (double v : per_dir) {
        total += v;
    }
    return total / static_cast<double>(n_dir);
}

FitResult optimize_mixture(const std::vector<TargetSet>& targets, CubeMixture init,
                           const SWConfig& cfg, const FitCallback& callback) {
    const int k = init.k;
    const int dim = init.dim;
    std::vector<double> params = pack_params(init);
    const size_t n_params = params.size();
    const std::vector<double> xi = default_xi(cfg);

    FitResult result;
    result.initial_loss = mixture_loss(init, targets, cfg.directions, xi);

    AdamState state;
    std::vector<double> grads(n_params, 0.0);
    for (int epoch = 1; epoch <= cfg.adam.epochs; ++epoch) {
#pragma omp parallel for schedule(dynamic)
        for (int pi = 0; pi < static_cast<int>(n_params); ++pi) {
            std::vector<double> probe = params;
            const double h = 1e-4 * (1.0 + std::abs(params[static_cast<size_t>(pi)]));
            probe[static_cast<size_t>(pi)] = params[static_cast<size_t>(pi)] + h;
            const double up =
                mixture_loss(unpack_params(probe, k, dim), targets, cfg.directions, xi);
            probe[static_cast<size_t>(pi)] = params[static_cast<size_t>(pi)] - h;
            const double down =
                mixture_loss(unpack_params(probe, k, dim), targets, cfg.directions, xi);
            double g = (up - down) / (2.0 * h);
            if (std::abs(g) < cfg.adam.grad_deadband) {
                g = 0.0;
            }
            grads[static_cast<size_t>(pi)] = g;
        }
        adam_step(params, grads, state, cfg.adam);
        const CubeMixture current = unpack_params(params, k, dim);
        result.loss_trace.push_back(mixture_loss(current, targets, cfg.directions, xi));
        if (callback) {
            callback(epoch, current, result.loss_trace);
        }
    }
    result.mixture = unpack_params(params, k, dim);
    return result;
}

}  // namespace

CubeMixture CubeMixture::from_widths(int k, int dim, std::vector<double> centers,
                                     const std::vector<double>& widths) {
    if (k < 1 || dim < 1) {
        throw std::invalid_argument("CubeMixture: k and dim must be >= 1");
    }
    const size_t n = static_cast<size_t>(k) * static_cast<size_t>(dim);
    if (centers.size() != n || widths.size() != n) {
        throw std::invalid_argument("CubeMixture: parameter size mismatch");
    }
    CubeMixture m;
    m.k = k;
    m.dim = dim;
    m.centers = std::move(centers);
    m.log_widths.resize(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(widths[i] > 0.0)) {
            throw std::invalid_argument("CubeMixture: widths must be positive");
        }
        m.log_widths[i] = std::log(widths[i]);
    }
    return m;
}

double CubeMixture::width(int j, int i) const {
    return std::exp(log_widths[static_cast<size_t>(j) * static_cast<size_t>(dim) +
                               static_cast<size_t>(i)]);
}

std::vector<double> CubeMixture::widths() const {
    std::vector<double> w(log_widths.size());
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_widths[i]);
    }
    return w;
}

std::vector<double> CubeMixture::weights() const {
    // Components are uniform probability measures on their cubes, so the
    // normalized masses are all equal. (Tying the weights to cube volume
    // instead couples the inter-component CDF plateau level to the widths,
    // which riddles the sliced Wasserstein loss with quantile jumps and
    // stalls the finite-difference optimizer.)
    return std::vector<double>(static_cast<size_t>(k), 1.0 / static_cast<double>(k));
}

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<std::vector<double>> points) {
    if (points.empty()) {
        throw std::invalid_argument("EmpiricalMeasure: need at least one point");
    }
    EmpiricalMeasure m;
    m.dim = static_cast<int>(points.front().size());
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != m.dim) {
            throw std::invalid_argument("EmpiricalMeasure: inconsistent point dimensions");
        }
    }
    m.points = std::move(points);
    return m;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const AdamParams& cfg) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient size mismatch");
    }
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: state size mismatch");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
    const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps_hat);
    }
}

MixtureProjection::MixtureProjection(const CubeMixture& mixture, const Direction& theta) {
    if (mixture.dim != theta.dim()) {
        throw std::invalid_argument("MixtureProjection: dimension mismatch");
    }
    const int ell = theta.ell();
    degree_ = ell;
    const std::vector<double> weights = mixture.weights();

    struct Event {
        double pos;
        double coeff;  // truncated-power coefficient
        int cube;
    };
    std::vector<Event> events;
    events.reserve(static_cast<size_t>(mixture.k) << ell);
    std::vector<double> b(static_cast<size_t>(ell));
    std::vector<double> cube_gamma(static_cast<size_t>(mixture.k));

    for (int j = 0; j < mixture.k; ++j) {
        double mu = 0.0;
        double prod_b = 1.0;
        for (int r = 0; r < ell; ++r) {
            const int axis = theta.support()[static_cast<size_t>(r)];
            b[static_cast<size_t>(r)] = mixture.width(j, axis) * std::abs(theta[axis]);
            prod_b *= b[static_cast<size_t>(r)];
        }
        for (int i = 0; i < mixture.dim; ++i) {
            mu += mixture.center(j, i) * theta[i];
        }
        const double gamma = weights[static_cast<size_t>(j)];
        cube_gamma[static_cast<size_t>(j)] = gamma;
        // Per-cube CDF = base * sum_sigma P(sigma) (t - (mu - <sigma,b>))_+^ell
        // with base = 1 / (2^ell prod(b) ell!).
        double fact = 1.0;
        for (int r = 2; r <= ell; ++r) {
            fact *= r;
        }
        const double base = gamma / (std::ldexp(prod_b, ell) * fact);
        const uint64_t corners = uint64_t(1) << ell;
        for (uint64_t m = 0; m < corners; ++m) {
            double dot = 0.0;
            int neg = 0;
            for (int r = 0; r < ell; ++r) {
                if ((m >> r) & 1) {
                    dot += b[static_cast<size_t>(r)];
                } else {
                    dot -= b[static_cast<size_t>(r)];
                    ++neg;
                }
            }
            const double sign = (neg & 1) ? -1.0 : 1.0;
            events.push_back({mu - dot, sign * base, j});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b2) {
        return a.pos < b2.pos || (a.pos == b2.pos && a.cube < b2.cube);
    });

    // Sweep in a local polynomial basis u = t - x_left per piece. Completed
    // cubes are retired to an exact constant so their (large, cancelling)
    // coefficients do not pollute later pieces.
    constexpr int kMaxDegree = 20;
    if (degree_ > kMaxDegree) {
        throw std::invalid_argument("MixtureProjection: dimension too large");
    }
    static const auto binom_table = [] {
        std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> t{};
        for (int r = 0; r <= kMaxDegree; ++r) {
            t[static_cast<size_t>(r)][0] = 1.0;
            for (int c = 1; c <= r; ++c) {
                t[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                    t[static_cast<size_t>(r - 1)][static_cast<size_t>(c - 1)] +
                    (c <= r - 1 ? t[static_cast<size_t>(r - 1)][static_cast<size_t>(c)] : 0.0);
            }
        }
        return t;
    }();
    const int nc = degree_ + 1;
    double acc[kMaxDegree + 1] = {0.0};
    double scratch[kMaxDegree + 1];
    auto taylor_shift = [&](double delta) {
        // acc(u) -> acc(u + delta): re-express at a left endpoint moved by
        // delta to the right.
        for (int c = 0; c < nc; ++c) {
            scratch[c] = 0.0;
        }
        for (int r = 0; r < nc; ++r) {
            double p = 1.0;
            const auto& row = binom_table[static_cast<size_t>(r)];
            for (int c = r; c >= 0; --c) {
                scratch[c] += acc[r] * row[static_cast<size_t>(c)] * p;
                p *= delta;
            }
        }
        for (int c = 0; c < nc; ++c) {
            acc[c] = scratch[c];
        }
    };

    // Track how many events of each cube are still pending, with a
    // cube-grouped index for the retirement pass.
    std::vector<int> pending(static_cast<size_t>(mixture.k),
                             static_cast<int>(uint64_t(1) << ell));
    const size_t n_events = events.size();
    const size_t per_cube = uint64_t(1) << ell;
    std::vector<uint32_t> by_cube(n_events);
    {
        std::vector<uint32_t> fill(static_cast<size_t>(mixture.k), 0);
        for (size_t i = 0; i < n_events; ++i) {
            const size_t c = static_cast<size_t>(events[i].cube);
            by_cube[c * per_cube + fill[c]++] = static_cast<uint32_t>(i);
        }
    }
    positions_.reserve(n_events);
    cdf_at_.reserve(n_events);
    coeffs_.reserve(n_events * static_cast<size_t>(nc));
    const auto& brow = binom_table[static_cast<size_t>(degree_)];

    double x_cur = events.front().pos;
    size_t idx = 0;
    while (idx < n_events) {
        const double x_new = events[idx].pos;
        if (idx > 0) {
            taylor_shift(x_new - x_cur);
        }
        x_cur = x_new;
        positions_.push_back(x_new);
        cdf_at_.push_back(acc[0]);
        // Apply all events at this position.
        while (idx < n_events && events[idx].pos == x_new) {
            const Event& e = events[idx];
            acc[degree_] += e.coeff;
            if (--pending[static_cast<size_t>(e.cube)] == 0) {
                // Subtract the cube's exact expansion in the current basis
                // and fold it into the constant term.
                const uint32_t* members =
                    by_cube.data() + static_cast<size_t>(e.cube) * per_cube;
                for (size_t m = 0; m < per_cube; ++m) {
                    const Event& ev = events[members[m]];
                    const double shift = x_new - ev.pos;  // >= 0
                    double p = 1.0;
                    for (int c = degree_; c >= 0; --c) {
                        acc[c] -= ev.coeff * brow[static_cast<size_t>(c)] * p;
                        p *= shift;
                    }
                }
                acc[0] += cube_gamma[static_cast<size_t>(e.cube)];
            }
            ++idx;
        }
        coeffs_.insert(coeffs_.end(), acc, acc + nc);
    }
    // Monotone cleanup of the breakpoint CDF values (roundoff can dip).
    double run = 0.0;
    for (double& c : cdf_at_) {
        run = std::max(run, std::min(std::max(c, 0.0), 1.0));
        c = run;
    }
}

double MixtureProjection::piece_value(size_t piece, double t) const {
    const int nc = degree_ + 1;
    const double u = t - positions_[piece];
    const double* a = coeffs_.data() + piece * static_cast<size_t>(nc);
    double v = a[degree_];
    for (int c = degree_ - 1; c >= 0; --c) {
        v = v * u + a[c];
    }
    return std::min(std::max(v, 0.0), 1.0);
}

double MixtureProjection::cdf(double t) const {
    if (t < positions_.front()) {
        return 0.0;
    }
    if (t >= positions_.back()) {
        return 1.0;
    }
    const auto it = std::upper_bound(positions_.begin(), positions_.end(), t);
    const size_t piece = static_cast<size_t>(it - positions_.begin()) - 1;
    return piece_value(piece, t);
}

double MixtureProjection::density(double t) const {
    if (t < positions_.front() || t >= positions_.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(positions_.begin(), positions_.end(), t);
    const size_t piece = static_cast<size_t>(it - positions_.begin()) - 1;
    const int nc = degree_ + 1;
    const double u = t - positions_[piece];
    const double* a = coeffs_.data() + piece * static_cast<size_t>(nc);
    double v = degree_ * a[degree_];
    for (int c = degree_ - 1; c >= 1; --c) {
        v = v * u + c * a[c];
    }
    return std::max(v, 0.0);
}

double MixtureProjection::quantile(double xi) const {
    if (!(xi > 0.0) || !(xi < 1.0)) {
        throw std::invalid_argument("MixtureProjection::quantile: xi must lie in (0,1)");
    }
    const auto it = std::upper_bound(cdf_at_.begin(), cdf_at_.end(), xi);
    if (it == cdf_at_.begin()) {
        return positions_.front();
    }
    if (it == cdf_at_.end()) {
        return positions_.back();
    }
    const size_t hi_idx = static_cast<size_t>(it - cdf_at_.begin());
    const size_t piece = hi_idx - 1;
    double lo = positions_[piece];
    double hi = positions_[hi_idx];
    for (int iter = 0; iter < 10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (piece_value(piece, mid) > xi) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Final secant step inside the bracket keeps the quantile a continuous
    // function of the mixture parameters (a plain midpoint would make the
    // finite-difference loss gradients a staircase).
    const double flo = piece_value(piece, lo);
    const double fhi = piece_value(piece, hi);
    if (fhi > flo) {
        const double w = std::clamp((xi - flo) / (fhi - flo), 0.0, 1.0);
        return lo + w * (hi - lo);
    }
    return 0.5 * (lo + hi);
}

std::vector<double> MixtureProjection::quantiles(const std::vector<double>& xi_grid) const {
    std::vector<double> q;
    q.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        q.push_back(quantile(xi));
    }
    return q;
}

double wasserstein1d_sq(const QuantileProfile& qa, const QuantileProfile& qb) {
    if (qa.xi_grid.size() != qb.xi_grid.size() || qa.xi_grid.empty()) {
        throw std::invalid_argument("wasserstein1d_sq: xi grid mismatch");
    }
    double acc = 0.0;
    for (size_t i = 0; i < qa.values.size(); ++i) {
        const double d = qa.values[i] - qb.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(qa.values.size());
}

DiscreteCDF radon_empirical(const EmpiricalMeasure& mu, const Direction& theta,
                            const std::vector<double>& radii) {
    if (mu.dim != theta.dim()) {
        throw std::invalid_argument("radon_empirical: dimension mismatch");
    }
    if (radii.size() < 2) {
        throw std::invalid_argument("radon_empirical: need at least two radii");
    }
    std::vector<double> counts(radii.size(), 0.0);
    for (const auto& p : mu.points) {
        double proj = 0.0;
        for (int i = 0; i < mu.dim; ++i) {
            proj += p[static_cast<size_t>(i)] * theta[i];
        }
        if (proj < radii.front() || proj > radii.back()) {
            throw std::domain_error("radon_empirical: projection outside the radius range");
        }
        auto it = std::lower_bound(radii.begin(), radii.end(), proj);
        size_t j = static_cast<size_t>(it - radii.begin());
        if (j > 0 && (j == radii.size() || proj - radii[j - 1] <= radii[j] - proj)) {
            --j;  // nearest grid point; ties towards the lower index
        }
        counts[j] += 1.0;
    }
    DiscreteCDF out;
    out.t_grid = radii;
    out.cdf.resize(radii.size());
    const double n = static_cast<double>(mu.points.size());
    double acc = 0.0;
    for (size_t i = 0; i < counts.size(); ++i) {
        acc += counts[i] / n;
        out.cdf[i] = std::min(acc, 1.0);
    }
    out.cdf.back() = 1.0;
    return out;
}

double mixture_cdf(const CubeMixture& mixture, const Direction& theta, double t) {
    const std::vector<double> weights = mixture.weights();
    double acc = 0.0;
    for (int j = 0; j < mixture.k; ++j) {
        std::vector<double> w(static_cast<size_t>(mixture.dim));
        double mu = 0.0;
        for (int i = 0; i < mixture.dim; ++i) {
            w[static_cast<size_t>(i)] = mixture.width(j, i);
            mu += mixture.center(j, i) * theta[i];
        }
        const CubeSection section(HalfWidths(w), theta);
        const double tau = t - mu;
        const double lo = -section.support_radius();
        if (tau <= lo) {
            continue;
        }
        acc += weights[static_cast<size_t>(j)] *
               section.slab_volume(lo - 1.0, tau) / section.box_volume();
    }
    return std::min(acc, 1.0);
}

SWMeasure SWMeasure::from_mixture(CubeMixture m) {
    SWMeasure s;
    s.mixture_ = std::move(m);
    return s;
}

SWMeasure SWMeasure::from_empirical(EmpiricalMeasure m) {
    SWMeasure s;
    s.empirical_ = std::move(m);
    return s;
}

SWMeasure SWMeasure::from_image(VoxelImage image) {
    SWMeasure s;
    s.image_ = std::move(image);
    return s;
}

int SWMeasure::dim() const {
    if (mixture_) {
        return mixture_->dim;
    }
    if (empirical_) {
        return empirical_->dim;
    }
    return image_->dim();
}

std::vector<std::vector<double>> SWMeasure::quantile_table(
    const DirectionSet& directions, const std::vector<double>& radii,
    const std::vector<double>& xi_grid) const {
    const int n_dir = directions.count();
    std::vector<std::vector<double>> table(static_cast<size_t>(n_dir));
    if (image_) {
        const Sinogram sino = compute_sinogram(*image_, directions, radii);
        for (int i = 0; i < n_dir; ++i) {
            const DiscreteCDF cdf = cdf_from_projection(radii, sino.row(i));
            table[static_cast<size_t>(i)] = quantile_profile(cdf, xi_grid).values;
        }
        return table;
    }
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_dir; ++i) {
        const Direction& theta = directions.points[static_cast<size_t>(i)];
        if (mixture_) {
            table[static_cast<size_t>(i)] = MixtureProjection(*mixture_, theta).quantiles(xi_grid);
        } else {
            const DiscreteCDF cdf = radon_empirical(*empirical_, theta, radii);
            table[static_cast<size_t>(i)] = quantile_profile(cdf, xi_grid).values;
        }
    }
    return table;
}

Sinogram SWMeasure::density_sinogram(const DirectionSet& directions,
                                     const std::vector<double>& radii) const {
    if (image_) {
        return compute_sinogram(*image_, directions, radii);
    }
    Sinogram sino;
    sino.directions = directions;
    sino.radii = radii;
    sino.values.assign(static_cast<size_t>(directions.count()) * radii.size(), 0.0);
    for (int i = 0; i < directions.count(); ++i) {
        const Direction& theta = directions.points[static_cast<size_t>(i)];
        double* row = sino.values.data() + static_cast<size_t>(i) * radii.size();
        if (mixture_) {
            const MixtureProjection proj(*mixture_, theta);
            for (size_t j = 0; j < radii.size(); ++j) {
                row[j] = proj.density(radii[j]);
            }
        } else {
            // Snapped point masses as a normalized histogram.
            const DiscreteCDF cdf = radon_empirical(*empirical_, theta, radii);
            const double spacing = radii.size() > 1 ? radii[1] - radii[0] : 1.0;
            double prev = 0.0;
            for (size_t j = 0; j < radii.size(); ++j) {
                row[j] = (cdf.cdf[j] - prev) / spacing;
                prev = cdf.cdf[j];
            }
        }
    }
    return sino;
}

double sw2_sq(const SWMeasure& mu, const SWMeasure& nu, const SWConfig& cfg) {
    if (cfg.directions.count() == 0) {
        throw std::invalid_argument("sw2_sq: empty direction set");
    }
    const std::vector<double> xi = default_xi(cfg);
    const auto qa = mu.quantile_table(cfg.directions, cfg.radii, xi);
    const auto qb = nu.quantile_table(cfg.directions, cfg.radii, xi);
    double acc = 0.0;
    for (size_t i = 0; i < qa.size(); ++i) {
        double w = 0.0;
        for (size_t l = 0; l < xi.size(); ++l) {
            const double d = qa[i][l] - qb[i][l];
            w += d * d;
        }
        acc += w / static_cast<double>(xi.size());
    }
    return acc / static_cast<double>(qa.size());
}

FitResult fit_mixture(const EmpiricalMeasure& target, int k, const SWConfig& cfg,
                      std::optional<CubeMixture> init, const FitCallback& callback) {
    if (k < 1 || k > 10000) {
        throw std::invalid_argument("fit_mixture: k out of range");
    }
    const int dim = target.dim;
    CubeMixture start;
    if (init) {
        start = *init;
        if (start.k != k || start.dim != dim) {
            throw std::invalid_argument("fit_mixture: init shape mismatch");
        }
    } else if (k == 2) {
        std::vector<double> centers(static_cast<size_t>(2 * dim));
        std::vector<double> widths(static_cast<size_t>(2 * dim), 0.1);
        for (int i = 0; i < dim; ++i) {
            centers[static_cast<size_t>(i)] = 0.25;
            centers[static_cast<size_t>(dim + i)] = -0.25;
        }
        start = CubeMixture::from_widths(2, dim, std::move(centers), widths);
    } else {
        Rng rng(cfg.rng_seed);
        std::vector<double> centers(static_cast<size_t>(k) * static_cast<size_t>(dim));
        std::vector<double> widths(centers.size(), 0.1);
        for (double& c : centers) {
            c = rng.uniform(-0.25, 0.25);
        }
        start = CubeMixture::from_widths(k, dim, std::move(centers), widths);
    }

    const std::vector<double> xi = default_xi(cfg);
    TargetSet set;
    set.weight = 1.0;
    set.quantiles =
        SWMeasure::from_empirical(target).quantile_table(cfg.directions, cfg.radii, xi);
    return optimize_mixture({set}, std::move(start), cfg, callback);
}

FitResult sw_barycenter(const SWMeasure& mu1, const SWMeasure& mu2, double lambda, int k,
                        const SWConfig& cfg, std::optional<CubeMixture> init,
                        const FitCallback& callback) {
    if (!(lambda > 0.0) || !(lambda < 1.0)) {
        throw std::invalid_argument("sw_barycenter: lambda must lie in (0,1)");
    }
    if (k < 1 || k > 10000) {
        throw std::invalid_argument("sw_barycenter: k out of range");
    }
    const int dim = mu1.dim();
    if (mu2.dim() != dim) {
        throw std::invalid_argument("sw_barycenter: measure dimension mismatch");
    }
    CubeMixture start;
    if (init) {
        start = *init;
        if (start.k != k || start.dim != dim) {
            throw std::invalid_argument("sw_barycenter: init shape mismatch");
        }
    } else {
        Rng rng(cfg.rng_seed);
        std::vector<double> centers(static_cast<size_t>(k) * static_cast<size_t>(dim));
        std::vector<double> widths(centers.size(), 0.05);
        for (double& c : centers) {
            c = rng.uniform(-0.3, 0.3);
        }
        start = CubeMixture::from_widths(k, dim, std::move(centers), widths);
    }

    const std::vector<double> xi = default_xi(cfg);
    TargetSet a;
    a.weight = lambda;
    a.quantiles = mu1.quantile_table(cfg.directions, cfg.radii, xi);
    TargetSet b;
    b.weight = 1.0 - lambda;
    b.quantiles = mu2.quantile_table(cfg.directions, cfg.radii, xi);
    return optimize_mixture({a, b}, std::move(start), cfg, callback);
}

void save_mixture_json(const CubeMixture& mixture, const std::vector<double>& loss_trace,
                       double initial_loss, const std::string& path,
                       const std::string& meta) {
    nlohmann::json j;
    auto to_rows = [&](const std::vector<double>& flat) {
        std::vector<std::vector<double>> rows;
        for (int r = 0; r < mixture.k; ++r) {
            rows.emplace_back(flat.begin() + static_cast<ptrdiff_t>(r) * mixture.dim,
                              flat.begin() + static_cast<ptrdiff_t>(r + 1) * mixture.dim);
        }
        return rows;
    };
    j["centers"] = to_rows(mixture.centers);
    j["widths"] = to_rows(mixture.widths());
    j["loss_trace"] = loss_trace;
    j["initial_loss"] = initial_loss;
    if (!meta.empty()) {
        j["meta"] = meta;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("mixture JSON: cannot open for writing: " + path);
    }
    out << j.dump(2) << '\n';
}

FitResult load_mixture_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("mixture JSON: cannot open: " + path);
    }
    nlohmann::json j;
    in >> j;
    const auto& jc = j.at("centers");
    const auto& jw = j.at("widths");
    const int k = static_cast<int>(jc.size());
    if (k < 1 || jw.size() != jc.size()) {
        throw ParseError("mixture JSON: malformed centers/widths in " + path);
    }
    const int dim = static_cast<int>(jc.at(0).size());
    std::vector<double> centers;
    std::vector<double> widths;
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < dim; ++c) {
            centers.push_back(jc.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>());
            widths.push_back(jw.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>());
        }
    }
    FitResult result;
    result.mixture = CubeMixture::from_widths(k, dim, std::move(centers), widths);
    if (j.contains("loss_trace")) {
        result.loss_trace = j["loss_trace"].get<std::vector<double>>();
    }
    if (j.contains("initial_loss")) {
        result.initial_loss = j["initial_loss"].get<double>();
    }
    return result;
}

}  // namespace hyperradon
