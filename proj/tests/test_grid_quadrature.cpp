#include <cmath>
#include <vector>

#include <doctest.h>

#include "sollab/field.hpp"
#include "sollab/grid.hpp"
#include "sollab/quadrature.hpp"

using namespace sollab;
using doctest::Approx;

TEST_CASE("graded grid layout") {
    const auto g = RadialGrid::graded(1e-3, 64, 1e3);
    CHECK(g.r(0) == 0.0);
    CHECK(g.r_max() >= 1e3);
    CHECK(g.nodes_per_decade() == Approx(64.0).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.r(i) > g.r(i - 1));
    // log-uniform past the core
    const std::size_t a = g.index_at_or_above(1.0), b = g.index_at_or_above(10.0);
    CHECK(static_cast<double>(b - a) == Approx(64.0).epsilon(0.02));
    for (double x : {0.0, 0.5, 3.0, 11.0}) CHECK(g.xi_of(g.r_of_xi(x)) == Approx(x).epsilon(1e-12));
    CHECK(g.index_at_or_above(2e3) == g.size());
}

TEST_CASE("near-uniform grid spacing") {
    const auto g = RadialGrid::near_uniform(0.02, 10.0);
    CHECK(g.r_max() >= 10.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double h = g.r(i) - g.r(i - 1);
        CHECK(h >= 0.02 * (1 - 1e-12));
        CHECK(h <= 0.02 * std::sqrt(2.0) * (1 + 1e-12));
    }
}

TEST_CASE("grid descriptor round trip") {
    const auto g = RadialGrid::graded(1e-2, 48, 1e4);
    const auto h = RadialGrid::from_descriptor(g.descriptor());
    CHECK(g == h);
    CHECK(h.r(h.last()) == g.r(g.last()));
}

TEST_CASE("Fornberg weights reproduce polynomial derivatives") {
    const std::vector<double> x{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto w1 = quad::fornberg_weights(0.7, x, 1);
    const auto w2 = quad::fornberg_weights(0.7, x, 2);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double f = std::pow(x[k], 4) - 2.0 * x[k];
        d1 += w1[k] * f;
        d2 += w2[k] * f;
    }
    CHECK(d1 == Approx(4.0 * std::pow(0.7, 3) - 2.0).epsilon(1e-12));
    CHECK(d2 == Approx(12.0 * 0.49).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {4, 8, 16}) {
        const auto& g = quad::gauss_legendre(n);
        double s0 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            s0 += g.w[k];
            s2 += g.w[k] * g.x[k] * g.x[k];
        }
        CHECK(s0 == Approx(2.0).epsilon(1e-14));
        CHECK(s2 == Approx(2.0 / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("function quadrature with power tails") {
    CHECK(quad::integrate_function([](double r) { return std::pow(r, 5) * std::exp(-r); }, 0.0, 200.0) ==
          Approx(120.0).epsilon(1e-10));
    CHECK(quad::integrate_to_infinity([](double r) { return 1.0 / ((1 + r) * (1 + r)); }, 0.0, -2.0) ==
          Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled quadrature and tail closure") {
    auto g = make_graded(1e-2, 64, 100.0);
    const auto f = RadialField::sample(g, [](double r) { return std::pow(1 + r * r, -4) * std::pow(r, 5); }, -3.0);
    // int_0^inf r^5 (1+r^2)^-4 dr = 1/6
    CHECK(quad::integrate(*g, f.values(), 0, 0.0, quad::kInfinity, -3.0) == Approx(1.0 / 6.0).epsilon(1e-8));
    const auto tail = RadialField::sample(g, [](double r) { return r < 1e-12 ? 0.0 : std::pow(r, -3) + std::pow(r, -4); });
    const double t = quad::tail_integral(*g, tail.values(), -3.0);
    const double R = g->r_max();
    CHECK(t == Approx(0.5 / (R * R) + 1.0 / (3.0 * R * R * R)).epsilon(1e-9));
}

TEST_CASE("cumulative integral from the right") {
    auto g = make_graded(1e-2, 64, 50.0);
    const auto f = RadialField::sample(g, [](double r) { return std::exp(-r); });
    const auto c = quad::cumulative_from_right(*g, f.values(), 0);
    for (std::size_t i = 0; i < g->size(); i += 29)
        CHECK(c[i] == Approx(std::exp(-g->r(i)) - std::exp(-g->r_max())).scale(1.0).epsilon(1e-9));
}

TEST_CASE("differentiation and interpolation of smooth data") {
    auto g = make_graded(1e-2, 96, 20.0);
    const auto f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
    const auto d = quad::differentiate(*g, f.values(), 0, true, 1);
    const auto dd = quad::differentiate(*g, f.values(), 0, true, 2);
    for (std::size_t i = 0; i < g->size(); i += 17) {
        const double r = g->r(i);
        CHECK(d[i] == Approx(-2 * r * std::exp(-r * r)).scale(1.0).epsilon(1e-6));
        CHECK(dd[i] == Approx((4 * r * r - 2) * std::exp(-r * r)).scale(1.0).epsilon(1e-5));
    }
    for (double r : {0.0, 0.013, 0.77, 3.1})
        CHECK(quad::interpolate(*g, f.values(), 0, true, r) == Approx(std::exp(-r * r)).scale(1.0).epsilon(1e-9));
}
