#include "sollab/w_minus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"

namespace sollab {

namespace {

using profile::kCW;

struct OdePoint {
    double y;
    double p;
};

OdePoint rk4_step(double r, OdePoint s, double h) {
    const auto f = [](double rr, OdePoint v) { return OdePoint{v.p, -5.0 * v.p / rr - v.y * v.y}; };
    const OdePoint k1 = f(r, s);
    const OdePoint k2 = f(r + h / 2, {s.y + h / 2 * k1.y, s.p + h / 2 * k1.p});
    const OdePoint k3 = f(r + h / 2, {s.y + h / 2 * k2.y, s.p + h / 2 * k2.p});
    const OdePoint k4 = f(r + h, {s.y + h * k3.y, s.p + h * k3.p});
    return {s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y), s.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

struct Picard {
    std::vector<double> f;
    std::vector<double> inner; // int_r^inf f^2 s^5 ds
    int iterations = 0;
    double difference = 0.0;
    bool converged = false;
};

Picard picard(const RadialGrid& grid, std::size_t first, const WMinusOptions& opt) {
    const std::size_t n = grid.size() - first;
    Picard st;
    st.f.resize(n);
    for (std::size_t k = 0; k < n; ++k) st.f[k] = -kCW / std::pow(grid.r(first + k), 4);
    std::vector<double> g(n), h(n);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        for (std::size_t k = 0; k < n; ++k) g[k] = st.f[k] * st.f[k] * std::pow(grid.r(first + k), 5);
        st.inner = quad::cumulative_from_right(grid, g, first, -3.0);
        for (std::size_t k = 0; k < n; ++k) h[k] = st.inner[k] / std::pow(grid.r(first + k), 5);
        const auto outer = quad::cumulative_from_right(grid, h, first, -7.0);
        double diff = 0.0, ball = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double r4 = std::pow(grid.r(first + k), 4);
            const double next = -kCW / r4 - outer[k];
            diff = std::max(diff, r4 * std::abs(next - st.f[k]));
            ball = std::max(ball, r4 * std::abs(next));
            st.f[k] = next;
        }
        st.iterations = it;
        st.difference = diff / kCW;
        if (!(ball <= 2.0 * kCW) || !std::isfinite(diff)) return st;
        if (st.difference < opt.tolerance) {
            for (std::size_t k = 0; k < n; ++k) g[k] = st.f[k] * st.f[k] * std::pow(grid.r(first + k), 5);
            st.inner = quad::cumulative_from_right(grid, g, first, -3.0);
            st.converged = true;
            return st;
        }
    }
    return st;
}

} // namespace

InwardResult integrate_inward(double r0, double y0, double dy0, double initial_step, double threshold) {
    if (!(initial_step > 0.0)) throw std::invalid_argument("inward integration: step must be positive");
    InwardResult out;
    double r = r0, h = initial_step;
    OdePoint s{y0, dy0};
    const double h_min = 1e-15 * r0;
    while (true) {
        if (r - h <= 0.0) h = r / 2;
        if (r < 1e-12 * r0)
            throw std::runtime_error("inward integration reached r = 0 without blow-up (solver fault)");
        const OdePoint full = rk4_step(r, s, -h);
        const OdePoint half = rk4_step(r - h / 2, rk4_step(r, s, -h / 2), -h / 2);
        const double err = std::abs(full.y - half.y) / (1.0 + std::abs(half.y));
        const bool blown = !std::isfinite(half.y) || std::abs(half.y) > threshold;
        if ((err > 1e-10 || !std::isfinite(err)) && h > h_min && !(blown && h <= h_min * 2)) {
            h /= 2;
            continue;
        }
        ++out.steps;
        if (blown) {
            out.bracket_lo = r - h;
            out.bracket_hi = r;
            out.r_minus = r - h / 2;
            return out;
        }
        r -= h;
        s = half;
        if (err < 1e-12) h = std::min(h * 1.5, initial_step);
    }
}

WMinusResult build_w_minus(const GridPtr& grid, const WMinusOptions& opt) {
    if (!(opt.r_start > 0.0)) throw std::invalid_argument("w-minus: r_start must be positive");
    double R = opt.r_start;
    for (int attempt = 0; attempt <= opt.max_doublings; ++attempt, R *= 2.0) {
        if (R > grid->r_max() / 16.0)
            throw std::domain_error("w-minus: Picard radius too close to r_max (enlarge the grid)");
        const std::size_t first = grid->index_at_or_above(R * (1.0 - 1e-12));
        Picard st = picard(*grid, first, opt);
        if (!st.converged) continue;

        WMinusResult res{RadialField(grid, st.f, Regularity::exterior, first, -4.0)};
        res.picard_radius = grid->r(first);
        res.iterations = st.iterations;
        res.last_difference = st.difference;

        const double r0 = grid->r(first);
        const double dy0 = (4.0 * kCW + st.inner[0]) / std::pow(r0, 5);
        const double h0 = opt.initial_step * r0;
        res.r_minus = integrate_inward(r0, st.f[0], dy0, h0, opt.blowup_threshold).r_minus;
        res.r_minus_half_step = integrate_inward(r0, st.f[0], dy0, h0 / 2, opt.blowup_threshold).r_minus;

        // c_W r^-4 is harmonic in R^6, so the Laplacian is taken of the correction
        // e = W- + c_W r^-4 alone, avoiding cancellation at large r.
        std::vector<double> e(st.f.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = st.f[k] + kCW / std::pow(grid->r(first + k), 4);
        const auto d1 = quad::differentiate(*grid, e, first, false, 1);
        const auto d2 = quad::differentiate(*grid, e, first, false, 2);
        double z_res = 0.0;
        for (std::size_t k = 0; k < st.f.size(); ++k) {
            const double r = grid->r(first + k);
            const double dexact = (4.0 * kCW + st.inner[k]) / std::pow(r, 5);
            if (r >= 2.0 * R) {
                res.ell10_sup = std::max(res.ell10_sup, std::pow(r, 6) * std::abs(e[k]));
                res.ell10_derivative_sup =
                    std::max(res.ell10_derivative_sup, std::pow(r, 7) * std::abs(dexact - 4.0 * kCW / std::pow(r, 5)));
            }
            if (k >= 4 && k + 4 < st.f.size()) {
                const double lap = d2[k] + 5.0 * d1[k] / r;
                const double w2 = st.f[k] * st.f[k];
                res.ode_residual = std::max(res.ode_residual, std::abs(lap + w2) / w2);
                // Z'' = r^5 (r^5 W')' / 16 = r^10 Laplacian(W) / 16 and Z^2 / (16 s^(5/2)) = r^10 W^2 / 16.
                const double r10 = std::pow(r, 10);
                z_res = std::max(z_res, std::abs(r10 * lap / 16.0 + r10 * w2 / 16.0) / (r10 * w2 / 16.0));
            }
        }
        res.eqz_residual = z_res;
        const double rl = grid->r_max();
        res.z_prime_at_zero = -std::pow(rl, 5) * ((4.0 * kCW + st.inner.back()) / std::pow(rl, 5)) / 4.0;
        return res;
    }
    throw std::runtime_error("w-minus: Picard iteration did not contract (raise r_start)");
}

} // namespace sollab
