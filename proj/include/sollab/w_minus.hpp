#pragma once

#include "sollab/field.hpp"

namespace sollab {

struct WMinusOptions {
    double r_start = 8.0;          // first Picard radius; doubled on failure
    double tolerance = 1e-12;      // on N_R(f_{n+1} - f_n) / c_W
    int max_iterations = 200;
    int max_doublings = 6;
    double blowup_threshold = 1e8; // |y| beyond this marks the singularity
    double initial_step = 1e-3;    // inward ODE step, relative to the Picard radius
};

struct WMinusResult {
    RadialField profile;           // exterior field on r >= picard_radius, tail r^-4
    double picard_radius = 0.0;
    int iterations = 0;
    double last_difference = 0.0;  // N_R of the last Picard update, over c_W
    double r_minus = 0.0;          // singular radius from inward integration
    double r_minus_half_step = 0.0;
    double ell10_sup = 0.0;        // sup_{r >= 2R} r^6 |W- + c_W r^-4|
    double ell10_derivative_sup = 0.0; // sup_{r >= 2R} r^7 |W-' - 4 c_W r^-5|
    double ode_residual = 0.0;     // max |Laplacian W- + (W-)^2| / (W-)^2 over interior nodes
    double eqz_residual = 0.0;     // max |Z'' + Z^2/(16 s^(5/2))| / (Z^2/(16 s^(5/2))), s = r^-4
    double z_prime_at_zero = 0.0;  // Z'(s) at the outermost node, tends to -c_W
};

// Duhamel fixed point
//   W-(r) = -c_W r^-4 - int_r^inf rho^-5 int_rho^inf W-(s)^2 s^5 ds drho
// in the ball N_R(f) = max_{r >= R} r^4 |f(r)| <= 2 c_W, then the singular
// radius R- from y'' + (5/r) y' + y^2 = 0 integrated inward.
WMinusResult build_w_minus(const GridPtr& grid, const WMinusOptions& options = {});

struct InwardResult {
    double r_minus = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int steps = 0;
};
// Inward RK4 from (r0, y, y') with step halving near the singularity.
InwardResult integrate_inward(double r0, double y0, double dy0, double initial_step, double threshold);

} // namespace sollab
