#pragma once

#include "sollab/field.hpp"

// Closed forms for the ground state W(r) = (1 + r^2/24)^-2 and the objects
// built from it, with s = r^2/24 throughout. Lambda = 2 + r d/dr.
namespace sollab::profile {

inline constexpr double kCW = 576.0;
// |S^5|: radial integrals times this give integrals over R^6.
inline constexpr double kSphere = 31.006276680299820175; // pi^3

double ground_state(double r);
double ground_state_dr(double r);
double ground_state_drr(double r);
double lambda_w(double r);     // 2(1 - s)/(1 + s)^3
double lambda_w_dr(double r);
double phi(double r);          // 2 W LambdaW = -Laplacian(LambdaW)
double phi_dr(double r);
double lambda4_phi(double r);  // (4 + r d/dr) phi

// Rescaled profiles: f_(l) = l^-2 f(r/l), f_[l] = l^-3 f(r/l).
double w_h1(double r, double lambda);
double lambda_w_h1(double r, double lambda);
double lambda_w_l2(double r, double lambda);
// l^-4 phi(r/l) = -Laplacian (LambdaW)_(l)
double phi_scaled(double r, double lambda);

RadialField ground_state_field(GridPtr grid, double lambda = 1.0, double sign = 1.0);
RadialField lambda_w_field(GridPtr grid);
RadialField lambda_w_l2_field(GridPtr grid, double lambda);
RadialField lambda_w_h1_field(GridPtr grid, double lambda);

} // namespace sollab::profile
