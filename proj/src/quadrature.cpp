#include "sollab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace sollab::quad {

namespace {

constexpr int kStencil = 8;     // quadrature / interpolation points
constexpr int kDiffStencil = 7; // finite-difference points

// Value at (possibly negative) node index with even reflection across 0.
double reflected(std::span<const double> g, std::size_t first, long idx) {
    const long k = idx < 0 ? -idx : idx;
    return g[static_cast<std::size_t>(k) - first];
}

std::vector<double> integer_nodes(long start, int count, double origin) {
    std::vector<double> x(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(start + k) - origin;
    return x;
}

// Weights of the integral over [ta, tb] (cell-local, cell = [0,1]) of the
// Lagrange interpolant through nodes at positions `pos`.
std::array<double, kStencil> cell_weights(std::span<const double> pos, double ta, double tb) {
    const GaussRule& gl = gauss_legendre(6);
    std::array<double, kStencil> w{};
    const double half = 0.5 * (tb - ta), mid = 0.5 * (tb + ta);
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
        const double t = mid + half * gl.x[q];
        const auto l = fornberg_weights(t, pos, 0);
        for (std::size_t k = 0; k < pos.size(); ++k) w[k] += half * gl.w[q] * l[k];
    }
    return w;
}

// Full-cell weights for each stencil offset (cell index minus stencil start).
const std::array<std::array<double, kStencil>, kStencil - 1>& full_cell_table() {
    static const auto table = [] {
        std::array<std::array<double, kStencil>, kStencil - 1> t{};
        for (int off = 0; off < kStencil - 1; ++off) {
            const auto pos = integer_nodes(-off, kStencil, 0.0);
            t[static_cast<std::size_t>(off)] = cell_weights(pos, 0.0, 1.0);
        }
        return t;
    }();
    return table;
}

struct Range {
    long lo; // first usable index (negative when reflection is allowed)
    long hi; // last usable index
};

long stencil_start(long centre_left, int count, Range range) {
    long s = centre_left;
    s = std::max(s, range.lo);
    s = std::min(s, range.hi - count + 1);
    return s;
}

// Integral of g over cell c restricted to local [ta, tb] (in xi/dxi units).
double cell_integral(const RadialGrid& grid, std::span<const double> g, std::size_t first, long c,
                     double ta, double tb) {
    const long last = static_cast<long>(first + g.size()) - 1;
    const int count = static_cast<int>(std::min<long>(kStencil, last - static_cast<long>(first) + 1));
    const long s = stencil_start(c - 3, count, {static_cast<long>(first), last});
    const double dxi = grid.dxi();
    double sum = 0.0;
    if (count == kStencil && ta == 0.0 && tb == 1.0 && c >= s) {
        const auto& w = full_cell_table()[static_cast<std::size_t>(c - s)];
        for (int k = 0; k < kStencil; ++k) {
            const auto i = static_cast<std::size_t>(s + k);
            sum += w[static_cast<std::size_t>(k)] * g[i - first] * grid.jacobian(i);
        }
        return sum * dxi;
    }
    const auto pos = integer_nodes(s - c, count, 0.0);
    const auto w = cell_weights(pos, ta, tb);
    for (int k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(s + k);
        sum += w[static_cast<std::size_t>(k)] * g[i - first] * grid.jacobian(i);
    }
    return sum * dxi;
}

} // namespace

std::vector<double> fornberg_weights(double x0, std::span<const double> x, int order) {
    const std::size_t n = x.size();
    const auto m = static_cast<std::size_t>(order);
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

double PowerTail::operator()(double r) const { return std::pow(r, q) * (a + b / r + c / (r * r)); }

double PowerTail::integral_from(double r0) const {
    if (!(q < -1.0)) throw std::domain_error("quadrature: non-integrable tail exponent");
    return -a * std::pow(r0, q + 1.0) / (q + 1.0) - b * std::pow(r0, q) / q -
           c * std::pow(r0, q - 1.0) / (q - 1.0);
}

PowerTail fit_tail(const RadialGrid& grid, std::span<const double> g, double exponent) {
    if (g.size() < 3) throw std::invalid_argument("quadrature: tail fit needs three samples");
    const std::size_t n = grid.size();
    // Solve for (a, b, c) in a + b x + c x^2 = g r^-q, x = 1/r, by Newton divided differences.
    std::array<double, 3> x{}, y{};
    for (std::size_t k = 0; k < 3; ++k) {
        const double r = grid.r(n - 3 + k);
        x[k] = 1.0 / r;
        y[k] = g[g.size() - 3 + k] / std::pow(r, exponent);
    }
    const double d01 = (y[1] - y[0]) / (x[1] - x[0]);
    const double d12 = (y[2] - y[1]) / (x[2] - x[1]);
    const double d012 = (d12 - d01) / (x[2] - x[0]);
    PowerTail t;
    t.q = exponent;
    t.c = d012;
    t.b = d01 - d012 * (x[0] + x[1]);
    t.a = y[0] - d01 * x[0] + d012 * x[0] * x[1];
    return t;
}

double tail_integral(const RadialGrid& grid, std::span<const double> g, double q) {
    if (!(q < -1.0)) throw std::domain_error("quadrature: non-integrable tail exponent");
    return fit_tail(grid, g, q).integral_from(grid.r_max());
}

double integrate(const RadialGrid& grid, std::span<const double> g, std::size_t first, double from,
                 double to, std::optional<double> tail_exponent) {
    if (first + g.size() != grid.size())
        throw std::invalid_argument("quadrature: samples must run to the last grid node");
    // Exterior data may be integrated from anywhere in the cell below its
    // first sample; the first stencil is extrapolated there.
    const std::size_t lowest = first == 0 ? 0 : first - 1;
    const double r_first = grid.r(lowest);
    const double r_last = grid.r_max();
    if (from < r_first - 1e-12 * std::max(1.0, r_first))
        throw std::domain_error("quadrature: grid does not cover the lower limit");
    from = std::max(from, r_first);
    if (to <= from) return 0.0;
    const bool with_tail = to >= r_last && tail_exponent.has_value();
    const double upper = std::min(to, r_last);
    double sum = 0.0;
    if (upper > from) {
        const double xa = grid.xi_of(from) / grid.dxi();
        const double xb = grid.xi_of(upper) / grid.dxi();
        const long last_cell = static_cast<long>(grid.last()) - 1;
        const long ca = std::clamp(static_cast<long>(std::floor(xa)), static_cast<long>(lowest), last_cell);
        const long cb = std::clamp(static_cast<long>(std::ceil(xb)) - 1, static_cast<long>(lowest), last_cell);
        for (long c = ca; c <= cb; ++c) {
            const double ta = std::clamp(xa - static_cast<double>(c), 0.0, 1.0);
            const double tb = std::clamp(xb - static_cast<double>(c), 0.0, 1.0);
            if (tb > ta) sum += cell_integral(grid, g, first, c, ta, tb);
        }
    }
    if (with_tail) sum += tail_integral(grid, g, *tail_exponent);
    return sum;
}

std::vector<double> cumulative_from_right(const RadialGrid& grid, std::span<const double> g,
                                          std::size_t first, std::optional<double> tail_exponent) {
    if (first + g.size() != grid.size())
        throw std::invalid_argument("quadrature: samples must run to the last grid node");
    std::vector<double> out(g.size(), 0.0);
    double acc = tail_exponent ? tail_integral(grid, g, *tail_exponent) : 0.0;
    out.back() = acc;
    for (long c = static_cast<long>(grid.last()) - 1; c >= static_cast<long>(first); --c) {
        acc += cell_integral(grid, g, first, c, 0.0, 1.0);
        out[static_cast<std::size_t>(c) - first] = acc;
    }
    return out;
}

std::vector<double> differentiate(const RadialGrid& grid, std::span<const double> values,
                                  std::size_t first, bool even_origin, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("differentiate: order must be 1 or 2");
    if (first + values.size() != grid.size())
        throw std::invalid_argument("differentiate: samples must run to the last grid node");
    const long last = static_cast<long>(grid.last());
    const bool reflect = even_origin && first == 0;
    const Range range{reflect ? -last : static_cast<long>(first), last};
    const int count = static_cast<int>(std::min<long>(kDiffStencil, last - static_cast<long>(first) + 1));
    const double dxi = grid.dxi();

    const auto central = [&] {
        const auto pos = integer_nodes(-3, kDiffStencil, 0.0);
        return std::array{fornberg_weights(0.0, pos, 1), fornberg_weights(0.0, pos, 2)};
    }();

    std::vector<double> out(values.size());
    for (long i = static_cast<long>(first); i <= last; ++i) {
        const long s = stencil_start(i - count / 2, count, range);
        double d1 = 0.0, d2 = 0.0;
        if (count == kDiffStencil && s == i - 3) {
            for (int k = 0; k < count; ++k) {
                const double v = reflected(values, first, s + k);
                d1 += central[0][static_cast<std::size_t>(k)] * v;
                d2 += central[1][static_cast<std::size_t>(k)] * v;
            }
        } else {
            const auto pos = integer_nodes(s - i, count, 0.0);
            const auto w1 = fornberg_weights(0.0, pos, 1);
            const auto w2 = order == 2 ? fornberg_weights(0.0, pos, 2) : std::vector<double>(pos.size(), 0.0);
            for (int k = 0; k < count; ++k) {
                const double v = reflected(values, first, s + k);
                d1 += w1[static_cast<std::size_t>(k)] * v;
                d2 += w2[static_cast<std::size_t>(k)] * v;
            }
        }
        const auto ui = static_cast<std::size_t>(i);
        const double jac = grid.jacobian(ui);
        const double ur = d1 / (dxi * jac);
        out[ui - first] = order == 1 ? ur : (d2 / (dxi * dxi) - ur * grid.curvature(ui)) / (jac * jac);
    }
    return out;
}

double interpolate(const RadialGrid& grid, std::span<const double> values, std::size_t first,
                   bool even_origin, double r) {
    if (first + values.size() != grid.size())
        throw std::invalid_argument("interpolate: samples must run to the last grid node");
    const long last = static_cast<long>(grid.last());
    const bool reflect = even_origin && first == 0;
    const double lo_r = reflect ? 0.0 : grid.r(first);
    const double tol = 1e-12 * std::max(1.0, grid.r_max());
    if (r < lo_r - tol || r > grid.r_max() + tol)
        throw std::domain_error("interpolate: radius outside the sampled range");
    const double x = grid.xi_of(std::clamp(r, 0.0, grid.r_max())) / grid.dxi();
    const Range range{reflect ? -last : static_cast<long>(first), last};
    const int count = static_cast<int>(std::min<long>(kStencil, range.hi - range.lo + 1));
    const long s = stencil_start(static_cast<long>(std::floor(x)) - 3, count, range);
    const auto pos = integer_nodes(s, count, 0.0);
    const auto w = fornberg_weights(x, pos, 0);
    double sum = 0.0;
    for (int k = 0; k < count; ++k) sum += w[static_cast<std::size_t>(k)] * reflected(values, first, s + k);
    return sum;
}

const GaussRule& gauss_legendre(int n) {
    constexpr int kMax = 64;
    if (n < 1 || n > kMax) throw std::invalid_argument("gauss_legendre: 1 <= n <= 64");
    static const std::vector<GaussRule> rules = [] {
        std::vector<GaussRule> all(kMax + 1);
        for (int m = 1; m <= kMax; ++m) {
            GaussRule rule;
            rule.x.resize(static_cast<std::size_t>(m));
            rule.w.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
                double dp = 1.0;
                for (int it = 0; it < 100; ++it) {
                    double p0 = 1.0, p1 = z;
                    for (int k = 2; k <= m; ++k) {
                        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    if (m == 1) p1 = z, p0 = 1.0;
                    dp = m * (z * p1 - p0) / (z * z - 1.0);
                    const double dz = p1 / dp;
                    z -= dz;
                    if (std::abs(dz) < 1e-16) break;
                }
                rule.x[static_cast<std::size_t>(i)] = z;
                rule.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
            }
            all[static_cast<std::size_t>(m)] = std::move(rule);
        }
        return all;
    }();
    return rules[static_cast<std::size_t>(n)];
}

double integrate_function(const std::function<double(double)>& f, double a, double b, int ppd) {
    if (!(b > a)) return 0.0;
    if (a < 0.0) throw std::domain_error("integrate_function: a must be nonnegative");
    const GaussRule& gl = gauss_legendre(12);
    const auto panel = [&](double lo, double hi) {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double s = 0.0;
        for (std::size_t q = 0; q < gl.x.size(); ++q) s += gl.w[q] * f(mid + half * gl.x[q]);
        return s * half;
    };
    double sum = 0.0;
    double lo = a;
    if (a <= 1e-14 * b) {
        lo = 1e-14 * b;
        sum += panel(a, lo);
    }
    const double decades = std::log10(b / lo);
    const int panels = std::max(1, static_cast<int>(std::ceil(decades * ppd)));
    const double step = decades / panels;
    for (int p = 0; p < panels; ++p) {
        const double x0 = lo * std::pow(10.0, p * step);
        const double x1 = p + 1 == panels ? b : lo * std::pow(10.0, (p + 1) * step);
        sum += panel(x0, x1);
    }
    return sum;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double q, int ppd) {
    if (!(q < -1.0)) throw std::domain_error("integrate_to_infinity: non-integrable tail");
    const double cutoff = std::max(a, 1.0) * 1e8;
    const double body = integrate_function(f, a, cutoff, ppd);
    const double r1 = cutoff / 1.01, r2 = cutoff;
    const double a1 = f(r1) / std::pow(r1, q), a2 = f(r2) / std::pow(r2, q);
    const double bb = (a1 - a2) / (1.0 / r1 - 1.0 / r2);
    const double aa = a2 - bb / r2;
    return body - aa * std::pow(r2, q + 1.0) / (q + 1.0) - bb * std::pow(r2, q) / q;
}

} // namespace sollab::quad
