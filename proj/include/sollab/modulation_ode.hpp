#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Leading-order modulation dynamics for J bubbles:
//   lambda_j' = kappa2 beta_j,
//   beta_j'   = (kappa0 / lambda_j) [i_j i_{j-1} (lambda_j/lambda_{j-1})^2 - i_j i_{j+1} (lambda_{j+1}/lambda_j)^2]
// with lambda_0 = inf and lambda_{J+1} = 0.
namespace sollab::ode {

struct OdeConstants {
    double kappa0 = 0.0;
    double kappa2 = 0.0;
    static OdeConstants defaults(); // from default_constants()
};

struct OdeState {
    std::vector<double> lambda; // strictly decreasing, positive
    std::vector<double> beta;
    std::vector<int> signs;
    double t = 0.0;

    std::size_t size() const { return lambda.size(); }
    double gamma() const; // max lambda_{j+1}/lambda_j, 0 for J = 1
    bool ordered() const;
    void validate() const;
    nlohmann::json to_json() const;
};

// theta_1 = 1, theta_j = 2 theta_{j-1} (equal signs) or theta_{j-1}/2 (opposite).
std::vector<double> theta_weights(const std::vector<int>& signs);
// c_j with i_j i_{j-1} (theta_j - theta_{j-1}) = c_j theta_{j-1}; c_1 = 0.
std::vector<double> theta_coefficients(const std::vector<int>& signs);

struct Derivative {
    std::vector<double> dlambda;
    std::vector<double> dbeta;
};

Derivative ode_rhs(const OdeState& s, const OdeConstants& k);

struct Lyapunov {
    double A = 0.0; // sum theta lambda beta
    double V = 0.0; // sum theta lambda^2
};
Lyapunov lyapunov(const OdeState& s);

// dA/dt evaluated through the right-hand side.
double a_prime(const OdeState& s, const Derivative& d);
// kappa2 sum theta beta^2 + kappa0 sum_{j>=2} c_j theta_{j-1} (lambda_j/lambda_{j-1})^2.
double step1_identity(const OdeState& s, const OdeConstants& k);

// Bounded smooth slack added to the flow: lambda_j' gains C_l gamma^2 xi_j(t),
// lambda_j beta_j' gains C_b gamma^3 eta_j(t), with |xi|, |eta| <= 1.
struct Perturbation {
    double c_lambda = 1.0;
    double c_beta = 1.0;
    unsigned long seed = 0;
    double time_scale = 1.0; // oscillation period unit, normally lambda_1(0)
};

enum class ExitCause { gamma_exceeds_eps0, ordering_violated, horizon };
std::string to_string(ExitCause c);

struct IntegrateOptions {
    double eps0 = 0.1;
    double horizon = 0.0;      // 0: 100 lambda_1(0)
    double tolerance = 1e-10;  // local error per unit time, relative to the state scale
    long max_steps = 2000000;
    std::optional<Perturbation> perturbation;
    nlohmann::json to_json() const;
};

struct OdeTrajectory {
    std::vector<OdeState> states;
    std::vector<Lyapunov> lyap;
    std::vector<double> gamma;
    std::vector<double> a_prime;  // along the (possibly perturbed) flow
    std::vector<double> identity; // step1_identity at each sample
    ExitCause cause = ExitCause::horizon;
    double exit_time = 0.0;
    long rejected = 0;

    nlohmann::json summary() const;
    void write_csv(std::ostream& os) const; // t, lambda..., beta..., A, V, gamma
};

// Adaptive Dormand-Prince 5(4); the exit instant is located by bisection on the last step.
// Throws std::runtime_error on step-size underflow, std::invalid_argument on bad input.
OdeTrajectory integrate(const OdeState& initial, const IntegrateOptions& opt, const OdeConstants& k = OdeConstants::defaults());

struct SdReport {
    std::size_t samples = 0;
    double identity_residual = 0.0;   // max |A' - identity| / identity on the unperturbed flow
    double sd21_margin = 0.0;         // min (A' - kappa2 sum theta beta^2) / A'
    double sd22_margin = 0.0;         // min (A' - kappa2^-1 sum theta lambda'^2) / A'
    double a_margin = 0.0;            // min A' (A nondecreasing)
    std::vector<double> c_values;
    std::vector<double> c_margins;    // min relative increment of A/V^c per c
    double c0 = 0.0;                  // largest sampled c with nonnegative margin
    double step4_margin = 0.0;        // min (sqrt V)' - kappa2 A(t1)/sqrt V(t1) after t1
    nlohmann::json to_json() const;
};

SdReport verify_sd_properties(const OdeTrajectory& traj, const std::vector<double>& c_values,
                              const OdeConstants& k = OdeConstants::defaults());

struct BatteryOptions {
    unsigned long seed = 1;
    int trajectories = 24;
    int max_bubbles = 4;
    double eps0 = 0.1;
    bool perturbed = false;
    double perturbation_amplitude = 1.0;
    int workers = 1;
};
struct BatteryEntry {
    OdeState initial;
    OdeTrajectory trajectory;
    SdReport report;
};
struct OdeBattery {
    std::vector<BatteryEntry> entries;
    double c0 = 0.0;                 // min over trajectories
    bool half_monotone = true;       // A/V^(1/2) nondecreasing everywhere
    bool same_sign_exit = true;      // every same-sign entry exited through gamma
    double identity_residual = 0.0;
    nlohmann::json to_json() const;
};
OdeBattery ode_battery(const BatteryOptions& opt, const OdeConstants& k = OdeConstants::defaults());

struct ScanRow {
    double L = 0.0;
    double t_star = 0.0; // largest window / lambda_1(0); NaN when empty
    int family_size = 0;
    int windows = 0;     // family members with a nonempty window
};
struct ScanTable {
    std::vector<ScanRow> rows;
    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const; // L, t_star, family_size
};
struct ScanOptions {
    int family = 12;          // gamma(0) values, log-spaced in [1e-3, eps0/2]
    double lambda1 = 1.0;
    int workers = 1;
};
// Largest time keeping gamma <= eps0 and (lambda_1(t)/lambda_1(0))^4 >= L / gamma(t)^2.
ScanTable exit_time_scan(const std::vector<double>& L_values, const std::vector<int>& signs, double eps0,
                         const ScanOptions& opt = {}, const OdeConstants& k = OdeConstants::defaults());

} // namespace sollab::ode
