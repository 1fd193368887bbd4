#include <cmath>
#include <vector>

#include <doctest.h>

#include "sollab/constants.hpp"
#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"
#include "sollab/toolkit.hpp"

using namespace sollab;
using doctest::Approx;

namespace {
constexpr double kPi3 = 31.006276680299820175;

// -Laplacian f = -(f'' + 5 f'/r) by central differences on the closed form.
double neg_laplacian(double (*f)(double), double r, double h = 1e-3) {
    const double d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
    const double d1 = (f(r + h) - f(r - h)) / (2.0 * h);
    return -(d2 + 5.0 * d1 / r);
}
} // namespace

TEST_CASE("ground state closed form") {
    CHECK(profile::ground_state(0.0) == 1.0);
    CHECK(profile::ground_state(std::sqrt(24.0)) == Approx(0.25).epsilon(1e-15));
    const double r = 1e4;
    CHECK(std::pow(r, 4) * profile::ground_state(r) == Approx(576.0).epsilon(1e-6));
    CHECK(profile::kCW == 576.0);
}

TEST_CASE("LambdaW closed form and kernel identity") {
    CHECK(profile::lambda_w(0.0) == 2.0);
    CHECK(profile::lambda_w(std::sqrt(24.0)) == Approx(0.0).scale(1.0));
    for (double r : {0.3, 1.0, 2.3, 7.0, 20.0}) {
        const double direct = 2.0 * profile::ground_state(r) + r * profile::ground_state_dr(r);
        CHECK(profile::lambda_w(r) == Approx(direct).epsilon(1e-13));
        CHECK(profile::phi(r) == Approx(2.0 * profile::ground_state(r) * profile::lambda_w(r)).epsilon(1e-14));
        CHECK(neg_laplacian(profile::lambda_w, r) == Approx(profile::phi(r)).epsilon(1e-5).scale(1e-6));
        CHECK(neg_laplacian(profile::ground_state, r) ==
              Approx(std::pow(profile::ground_state(r), 2)).epsilon(1e-5).scale(1e-6));
    }
}

TEST_CASE("rescaled profiles") {
    const double l = 0.1, r = 0.37;
    CHECK(profile::w_h1(r, l) == Approx(std::pow(l, -2) * profile::ground_state(r / l)));
    CHECK(profile::lambda_w_l2(r, l) == Approx(std::pow(l, -3) * profile::lambda_w(r / l)));
    CHECK(profile::phi_scaled(r, l) == Approx(std::pow(l, -4) * profile::phi(r / l)));
}

TEST_CASE("explicit constants match closed forms") {
    const auto& c = default_constants();
    CHECK(c.c_w == 576.0);
    CHECK(c.kappa1 == Approx(2304.0 * kPi3).epsilon(1e-8));
    CHECK(c.norm_lambda_w_sq == Approx(18432.0 / 5.0 * kPi3).epsilon(1e-8));
    CHECK(c.kappa2 * c.norm_lambda_w_sq == Approx(1.0).epsilon(1e-14));
    CHECK(c.energy_w == Approx(192.0 / 5.0 * kPi3).epsilon(1e-8));
    CHECK(c.kappa0 == Approx(4608.0 * kPi3).epsilon(1e-6));
    CHECK(c.kappa0_converged);
}

TEST_CASE("cross term of LambdaW at separated scales is below lambda/mu") {
    // reference values from arbitrary-precision quadrature
    const double mu[] = {10.0, 100.0, 1000.0};
    const double ref[] = {208.177664504571, 0.687565125719439, 0.00119612103576124};
    for (int k = 0; k < 3; ++k) {
        const double m = mu[k];
        const double i = quad::integrate_to_infinity(
            [m](double r) { return profile::lambda_w(r) * profile::lambda_w_l2(r, m) * std::pow(r, 5); }, 0.0, -3.0);
        CHECK(i == Approx(ref[k]).epsilon(1e-6));
        CHECK(std::abs(i) * m < 1e4 / std::pow(m, 0.5));
    }
}

TEST_CASE("ground state fields on a graded grid") {
    auto g = make_graded(1e-3, 64, 1e3);
    const auto w = profile::ground_state_field(g);
    const double h1 = norm::h1(w), l3 = norm::lp(w, 3.0);
    // ||grad W||^2 = ||W||_3^3 = 1152/5 in the radial measure
    CHECK(h1 * h1 == Approx(230.4).epsilon(1e-6));
    CHECK(l3 * l3 * l3 == Approx(230.4).epsilon(1e-6));
    const auto lw = profile::lambda_w_field(g);
    CHECK(norm::inner_l2_r6(lw, lw) == Approx(18432.0 / 5.0 * kPi3).epsilon(1e-5));

    const auto same = rescale_h1(w, 1.0);
    for (std::size_t i = 0; i < g->size(); i += 37) CHECK(same.node(i) == Approx(w.node(i)).epsilon(1e-12));
    const auto small = rescale_l2(lw, 0.1);
    CHECK(norm::l2_r6(small) == Approx(norm::l2_r6(lw)).epsilon(1e-4));
}

TEST_CASE("L2_R norm of rescaled W behaves like min(1, lambda/R)") {
    auto g = make_graded(1e-4, 64, 1e4);
    double lo = 1e300, hi = 0.0;
    for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
        const auto w = RadialField::sample(g, [lambda](double r) { return std::pow(lambda, -3) * profile::ground_state(r / lambda); },
                                           -4.0);
        for (double R : {0.1, 1.0, 10.0}) {
            const double q = norm::l2(w, R) / std::min(1.0, lambda / R);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 20.0);
}
