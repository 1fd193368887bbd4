#pragma once

#include <array>

#include <nlohmann/json.hpp>

namespace sollab {

struct ConstantsTable {
    double c_w = 0.0;
    double norm_lambda_w_sq = 0.0; // ||LambdaW||^2_{L^2(R^6)}
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double energy_w = 0.0; // E(W, 0)

    // computation details
    int panels_per_decade = 0;
    std::array<double, 3> kappa0_gammas{};
    std::array<double, 3> kappa0_samples{};
    double kappa0_spread = 0.0;
    bool kappa0_converged = false;
    double seconds = 0.0;

    nlohmann::json to_json() const;
};

// Quadrature for the explicit constants. kappa0 is the gamma -> 0 limit of
// 2 gamma^-2 int LambdaW W W_(gamma) dx, extrapolated from three gammas with the
// error model kappa0 + gamma^2 (a log gamma + b).
ConstantsTable compute_constants(int panels_per_decade = 24, double kappa0_tolerance = 1e-6);

// Default table, computed once.
const ConstantsTable& default_constants();

} // namespace sollab
