#include "sollab/constants.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"

namespace sollab {

using namespace profile;

nlohmann::json ConstantsTable::to_json() const {
    return {{"c_W", c_w},
            {"norm_LambdaW_sq", norm_lambda_w_sq},
            {"kappa0", kappa0},
            {"kappa1", kappa1},
            {"kappa2", kappa2},
            {"energy_W", energy_w},
            {"computation",
             {{"method", "composite Gauss-Legendre on logarithmic panels, two-term power tail closure"},
              {"panels_per_decade", panels_per_decade},
              {"kappa0_gammas", kappa0_gammas},
              {"kappa0_samples", kappa0_samples},
              {"kappa0_spread", kappa0_spread},
              {"kappa0_converged", kappa0_converged},
              {"seconds", seconds}}}};
}

ConstantsTable compute_constants(int ppd, double kappa0_tolerance) {
    if (ppd < 4) throw std::invalid_argument("constants: at least 4 panels per decade");
    const auto t0 = std::chrono::steady_clock::now();
    ConstantsTable c;
    c.panels_per_decade = ppd;
    c.c_w = kCW;
    c.kappa1 = kSphere * quad::integrate_to_infinity(
                             [](double r) {
                                 const double w = ground_state(r);
                                 return kCW * r * w * w;
                             },
                             0.0, -7.0, ppd);
    c.norm_lambda_w_sq = kSphere * quad::integrate_to_infinity(
                                       [](double r) {
                                           const double l = lambda_w(r);
                                           return l * l * std::pow(r, 5);
                                       },
                                       0.0, -3.0, ppd);
    c.kappa2 = 1.0 / c.norm_lambda_w_sq;
    c.energy_w = kSphere * quad::integrate_to_infinity(
                               [](double r) {
                                   const double w = ground_state(r), dw = ground_state_dr(r);
                                   return (0.5 * dw * dw - w * w * w / 3.0) * std::pow(r, 5);
                               },
                               0.0, -5.0, ppd);

    c.kappa0_gammas = {1e-2, 1e-3, 1e-4};
    for (std::size_t k = 0; k < 3; ++k) {
        const double g = c.kappa0_gammas[k];
        const double i = quad::integrate_to_infinity(
            [g](double r) { return lambda_w(r) * ground_state(r) * w_h1(r, g) * std::pow(r, 5); }, 0.0, -7.0,
            ppd);
        c.kappa0_samples[k] = 2.0 * kSphere * i / (g * g);
    }
    // Solve K_k = kappa0 + g_k^2 (a log g_k + b) for (kappa0, a, b).
    double m[3][4];
    for (std::size_t k = 0; k < 3; ++k) {
        const double g = c.kappa0_gammas[k];
        m[k][0] = 1.0;
        m[k][1] = g * g * std::log(g);
        m[k][2] = g * g;
        m[k][3] = c.kappa0_samples[k];
    }
    for (int p = 0; p < 3; ++p)
        for (int r = p + 1; r < 3; ++r) {
            const double f = m[r][p] / m[p][p];
            for (int q = p; q < 4; ++q) m[r][q] -= f * m[p][q];
        }
    double x[3];
    for (int p = 2; p >= 0; --p) {
        double s = m[p][3];
        for (int q = p + 1; q < 3; ++q) s -= m[p][q] * x[q];
        x[p] = s / m[p][p];
    }
    c.kappa0 = x[0];
    // Compare with the plain gamma^2 Richardson step on the two smallest gammas.
    const double g1 = c.kappa0_gammas[1], g2 = c.kappa0_gammas[2];
    const double plain = (g1 * g1 * c.kappa0_samples[2] - g2 * g2 * c.kappa0_samples[1]) / (g1 * g1 - g2 * g2);
    c.kappa0_spread = std::abs(plain - c.kappa0) / std::abs(c.kappa0);
    c.kappa0_converged = c.kappa0_spread <= kappa0_tolerance;
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

const ConstantsTable& default_constants() {
    static const ConstantsTable table = compute_constants();
    return table;
}

} // namespace sollab
