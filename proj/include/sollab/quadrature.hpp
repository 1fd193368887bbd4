#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sollab/grid.hpp"

// Sampled-data calculus on a RadialGrid: high-order quadrature (8-point
// local interpolants integrated cell by cell in xi), finite differences and
// Lagrange interpolation built from Fornberg weights, and power-law tail
// closure past r_max.
//
// All sampled routines take `g` indexed from node `first` (g[k] is the value
// at node first + k), so exterior-only data works without padding.
namespace sollab::quad {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Weights w_k such that sum_k w_k f(nodes[k]) approximates f^(order)(x0).
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int order);

// Integral of g over [from, to] with respect to r. When `to` reaches r_max
// and a tail exponent q is declared (g ~ r^q (a + b/r + c/r^2) past r_max), the
// tail is added analytically; without a declared exponent the integral is
// truncated at r_max.
double integrate(const RadialGrid& grid, std::span<const double> g, std::size_t first,
                 double from, double to = kInfinity,
                 std::optional<double> tail_exponent = std::nullopt);

// C[k] = integral of g from node first + k to infinity (tail closed as above).
std::vector<double> cumulative_from_right(const RadialGrid& grid, std::span<const double> g,
                                          std::size_t first,
                                          std::optional<double> tail_exponent = std::nullopt);

// g ~ r^q (a + b/r + c/r^2) past r_max, fitted to the last three samples.
struct PowerTail {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double q = 0.0;
    double operator()(double r) const;
    // integral over [r0, infinity); requires q < -1.
    double integral_from(double r0) const;
};
PowerTail fit_tail(const RadialGrid& grid, std::span<const double> g, double exponent);

// Analytic tail integral of g past the last node, from the fit above.
double tail_integral(const RadialGrid& grid, std::span<const double> g, double exponent);

// d/dr (order 1) or d2/dr2 (order 2) of sampled values, 6th order in xi.
// `even_origin` uses the even reflection across r = 0; otherwise the stencil
// is one-sided at the first sample.
std::vector<double> differentiate(const RadialGrid& grid, std::span<const double> values,
                                  std::size_t first, bool even_origin, int order = 1);

// 8-point Lagrange interpolation in xi; r must lie inside the sampled range.
double interpolate(const RadialGrid& grid, std::span<const double> values, std::size_t first,
                   bool even_origin, double r);

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre on logarithmic panels over [a, b], a > 0.
// Panels below r = a_lin are linear to handle a = 0.
double integrate_function(const std::function<double(double)>& f, double a, double b,
                          int panels_per_decade = 24);

// integral_a^inf f(r) dr for f ~ r^q at infinity (q < -1): integrates up to
// a large cutoff and closes with a two-term power fit.
double integrate_to_infinity(const std::function<double(double)>& f, double a, double q,
                             int panels_per_decade = 24);

} // namespace sollab::quad
