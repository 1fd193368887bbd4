#include "sollab/profiles.hpp"

#include <cmath>

namespace sollab::profile {

namespace {
double sq_over_24(double r) { return r * r / 24.0; }
} // namespace

double ground_state(double r) {
    const double p = 1.0 + sq_over_24(r);
    return 1.0 / (p * p);
}

double ground_state_dr(double r) {
    const double p = 1.0 + sq_over_24(r);
    return -r / (6.0 * p * p * p);
}

double ground_state_drr(double r) {
    const double s = sq_over_24(r);
    const double p = 1.0 + s;
    return (5.0 * s - 1.0) / (6.0 * p * p * p * p);
}

double lambda_w(double r) {
    const double s = sq_over_24(r);
    const double p = 1.0 + s;
    return 2.0 * (1.0 - s) / (p * p * p);
}

double lambda_w_dr(double r) {
    const double s = sq_over_24(r);
    const double p = 1.0 + s;
    return r * (s - 2.0) / (3.0 * p * p * p * p);
}

double phi(double r) {
    const double s = sq_over_24(r);
    const double p = 1.0 + s;
    return 4.0 * (1.0 - s) / std::pow(p, 5);
}

double phi_dr(double r) {
    const double s = sq_over_24(r);
    const double p = 1.0 + s;
    return r * (4.0 * s - 6.0) / (3.0 * std::pow(p, 6));
}

double lambda4_phi(double r) { return 4.0 * phi(r) + r * phi_dr(r); }

double w_h1(double r, double lambda) { return ground_state(r / lambda) / (lambda * lambda); }

double lambda_w_h1(double r, double lambda) { return lambda_w(r / lambda) / (lambda * lambda); }

double lambda_w_l2(double r, double lambda) { return lambda_w(r / lambda) / (lambda * lambda * lambda); }

double phi_scaled(double r, double lambda) {
    const double l2 = lambda * lambda;
    return phi(r / lambda) / (l2 * l2);
}

RadialField ground_state_field(GridPtr grid, double lambda, double sign) {
    return RadialField::sample(std::move(grid), [=](double r) { return sign * w_h1(r, lambda); }, -4.0);
}

RadialField lambda_w_field(GridPtr grid) { return RadialField::sample(std::move(grid), lambda_w, -4.0); }

RadialField lambda_w_l2_field(GridPtr grid, double lambda) {
    return RadialField::sample(std::move(grid), [=](double r) { return lambda_w_l2(r, lambda); }, -4.0);
}

RadialField lambda_w_h1_field(GridPtr grid, double lambda) {
    return RadialField::sample(std::move(grid), [=](double r) { return lambda_w_h1(r, lambda); }, -4.0);
}

} // namespace sollab::profile
