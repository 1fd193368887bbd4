#include "sollab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"

namespace sollab::norm {

namespace {

std::vector<double> times_r5(const RadialGrid& grid, std::span<const double> g, std::size_t first) {
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = g[k] * std::pow(grid.r(first + k), 5);
    return out;
}

void check_cover(const RadialField& f, double R) {
    const double lowest = f.first() == 0 ? 0.0 : f.grid().r(f.first() - 1);
    if (R < lowest * (1.0 - 1e-12))
        throw std::domain_error("norm: field does not cover the requested exterior region");
}

std::vector<double> squared(const RadialField& f) {
    std::vector<double> out(f.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.values()[k] * f.values()[k];
    return out;
}

std::optional<double> squared_tail(const RadialField& f) {
    if (!f.tail_exponent()) return std::nullopt;
    return 2.0 * *f.tail_exponent();
}

double z_norm(const RadialField& f, double alpha, ShellRange range,
              const std::function<double(double)>& weight) {
    const RadialGrid& grid = f.grid();
    const double lo = range.r_lo > 0.0 ? range.r_lo : std::max(grid.r(1), f.r_start());
    const double hi = range.r_hi > 0.0 ? range.r_hi : grid.r_max() / 2.0;
    check_cover(f, lo);
    if (2.0 * hi > grid.r_max() * (1.0 + 1e-12)) throw std::domain_error("norm: shells exceed r_max");
    const auto g = times_r5(grid, squared(f), f.first());
    double best = 0.0;
    for (double R = lo; R <= hi * (1.0 + 1e-12); R *= 2.0) {
        const double shell = quad::integrate(grid, g, f.first(), R, 2.0 * R);
        const double v = std::pow(R, -3.0 - alpha) * std::sqrt(std::max(shell, 0.0)) / weight(R);
        best = std::max(best, v);
    }
    return best;
}

} // namespace

double radial_integral(const RadialGrid& grid, std::span<const double> g, std::size_t first, double R,
                       std::optional<double> q, double upper) {
    const auto w = times_r5(grid, g, first);
    std::optional<double> tq;
    if (q) tq = *q + 5.0;
    return quad::integrate(grid, w, first, R, upper, tq);
}

double lp(const RadialField& f, double p, double R) {
    if (!(p >= 1.0)) throw std::invalid_argument("norm: p must be >= 1");
    check_cover(f, R);
    std::vector<double> g(f.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::pow(std::abs(f.values()[k]), p);
    std::optional<double> q;
    if (f.tail_exponent()) q = p * *f.tail_exponent();
    return std::pow(std::max(radial_integral(f.grid(), g, f.first(), R, q), 0.0), 1.0 / p);
}

double l2(const RadialField& f, double R) {
    check_cover(f, R);
    return std::sqrt(std::max(radial_integral(f.grid(), squared(f), f.first(), R, squared_tail(f)), 0.0));
}

double h1(const RadialField& f, double R) { return l2(f.derivative(), R); }

double japanese(double x) { return std::sqrt(1.0 + x * x); }

double z_alpha(const RadialField& f, double alpha, ShellRange range) {
    return z_norm(f, alpha, range, [](double R) { return japanese(std::log(R)); });
}

double z_alpha_multi(const RadialField& f, double alpha, const std::vector<double>& scales, ShellRange range) {
    if (scales.empty()) throw std::invalid_argument("norm: empty scale vector");
    return z_norm(f, alpha, range, [&](double R) {
        double m = std::numeric_limits<double>::infinity();
        for (double l : scales) m = std::min(m, japanese(std::log(R / l)));
        return m;
    });
}

double inner_l2_r6(const RadialField& f, const RadialField& g) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("norm: grids differ");
    const std::size_t first = std::max(f.first(), g.first());
    std::vector<double> p(f.grid().size() - first);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = f.node(first + k) * g.node(first + k);
    std::optional<double> q;
    if (f.tail_exponent() && g.tail_exponent()) q = *f.tail_exponent() + *g.tail_exponent();
    return profile::kSphere * radial_integral(f.grid(), p, first, f.grid().r(first), q);
}

double inner_h1_r6(const RadialField& f, const RadialField& g) {
    return inner_l2_r6(f.derivative(), g.derivative());
}

double l2_r6(const RadialField& f) { return std::sqrt(std::max(inner_l2_r6(f, f), 0.0)); }

double h1_r6(const RadialField& f) { return std::sqrt(std::max(inner_h1_r6(f, f), 0.0)); }

} // namespace sollab::norm
