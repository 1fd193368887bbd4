#pragma once

#include <optional>
#include <vector>

#include "sollab/field.hpp"

// Radial norms use the measure r^5 dr (no sphere factor):
//   ||f||_{L^p_R}^p = int_R^inf |f|^p r^5 dr,  ||f||_{H^1_R} = ||f'||_{L^2_R}.
// Inner products on R^6 (suffix _r6) include the factor |S^5| = pi^3.
namespace sollab::norm {

// int_R^inf g(r) r^5 dr for pointwise data g with tail exponent q (g ~ r^q).
double radial_integral(const RadialGrid& grid, std::span<const double> g, std::size_t first, double R,
                       std::optional<double> q, double upper = 1e300);

double lp(const RadialField& f, double p, double R = 0.0);
double l2(const RadialField& f, double R = 0.0);
double h1(const RadialField& f, double R = 0.0);

// sup over dyadic shells [R, 2R] inside [r_lo, r_hi] of
// R^(-3-alpha) ||f||_{L^2(R<r<2R)} / weight(R), with weight <log R>
// or, given scales, min_j <log(R/lambda_j)>.
struct ShellRange {
    double r_lo = 0.0; // 0: first positive node of the field
    double r_hi = 0.0; // 0: r_max / 2 upper shell start
};
double z_alpha(const RadialField& f, double alpha, ShellRange range = {});
double z_alpha_multi(const RadialField& f, double alpha, const std::vector<double>& scales, ShellRange range = {});

double japanese(double x); // <x> = sqrt(1 + x^2)

double inner_l2_r6(const RadialField& f, const RadialField& g);
double inner_h1_r6(const RadialField& f, const RadialField& g);
double l2_r6(const RadialField& f);
double h1_r6(const RadialField& f);

} // namespace sollab::norm
