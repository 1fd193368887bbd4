#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sollab/field.hpp"

namespace sollab {

// Signs iota_j and scales lambda_1 > ... > lambda_J > 0.
struct SolitonConfig {
    std::vector<int> signs;
    std::vector<double> scales;

    std::size_t size() const { return scales.size(); }
    // Throws std::invalid_argument naming the violated condition.
    void validate(bool require_positive_signs = false) const;
    // max_j lambda_{j+1} / lambda_j; 0 when J = 1.
    double gamma() const;
    nlohmann::json to_json() const;
    static SolitonConfig from_json(const nlohmann::json& j);
    static SolitonConfig same_sign(std::vector<double> scales);
};

double gamma_of(const std::vector<double>& scales);

// sum_j iota_j W_(lambda_j) at r.
double multisoliton_value(const SolitonConfig& c, double r);
RadialField multisoliton(const SolitonConfig& c, GridPtr grid);
// Human-readable warnings for bubbles the grid cannot resolve.
std::vector<std::string> resolution_warnings(const SolitonConfig& c, const RadialGrid& grid);

struct FitOptions {
    int max_iterations = 60;
    double tolerance = 1e-13;        // on the scaled orthogonality residual
    double collision_ratio = 0.5;    // adjacent scale ratio declared ill-conditioned
};

struct ModulationFit {
    SolitonConfig config;
    std::vector<double> alpha{};
    std::vector<double> beta{};
    RadialField h;   // u0 - sum iota_j W_(lambda_j)
    RadialField g1;  // u1 - sum alpha_j (LambdaW)_[lambda_j]
    double delta = 0.0;
    double gamma = 0.0;
    int iterations = 0;
    double residual = 0.0;               // scaled orthogonality residual at exit
    std::vector<double> orthogonality{}; // int grad h . grad (LambdaW)_(lambda_j) dx
    std::vector<double> velocity_orthogonality{}; // int g1 (LambdaW)_[lambda_j] dx
    std::vector<std::vector<double>> trace{}; // per iteration: residual, then scales

    nlohmann::json to_json() const;
    void write_trace_csv(std::ostream& os) const;
};

// Newton iteration on the orthogonality conditions
//   int grad h . grad (LambdaW)_(lambda_j) dx = 0, j = 1..J,
// followed by the Gram solve for alpha and beta_j = -int (LambdaW)_[lambda_j] u1 dx.
// Throws FitError on non-convergence or colliding scales.
ModulationFit fit_modulation(const StatePair& state, const SolitonConfig& guess, const FitOptions& opt = {});

struct FitError : std::runtime_error {
    FitError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

// ||(f, g) - sum (iota_j W_(lambda_j), 0)||_H for given scales (R^6 measure).
double energy_distance(const StatePair& state, const SolitonConfig& c);

struct DistanceResult {
    double value = 0.0;
    std::vector<double> scales;
    int starts = 0;
    int evaluations = 0;
    nlohmann::json to_json() const;
};

// Upper bound on inf over ordered scales of energy_distance + gamma
// (gamma = 0 for J = 1), by multistart Nelder-Mead in log-scale.
DistanceResult distance_dj(const StatePair& state, const std::vector<int>& signs);

// c1(R) = 2 R^2 int_R^inf f(r) r dr: L^2_R projection coefficient onto r^-4.
double project_c1(const RadialField& velocity, double R);

struct EllEstimate {
    double ell = 0.0;
    double slope = 0.0;        // coefficient a of c1 = ell + a / R
    double residual = 0.0;     // rms fit residual
    double fitted_exponent = 0.0; // p in |c1 - ell| ~ R^-p, NaN when a ~ 0
    bool clean = true;
    double r_lo = 0.0;
    double r_hi = 0.0;
    nlohmann::json to_json() const;
};
// Fit c1(R) = ell + a / R over [r_max/20, r_max/2].
EllEstimate estimate_ell(const RadialField& velocity, double quality_threshold = 1e-6);

struct LowerBoundReport {
    double lambda1 = 0.0;
    double delta = 0.0;
    double ell = 0.0;
    double c0 = 0.0;
    double margin = 0.0;            // lambda1 C0 sqrt(delta) - |ell|
    bool satisfied = false;
    bool hypothesis_violation = false; // delta = 0 with ell != 0
    nlohmann::json to_json() const;
};
LowerBoundReport check_lower_bound_lambda1(const ModulationFit& fit, double ell, double c0);

} // namespace sollab
