#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sollab/decomposition.hpp"
#include "sollab/field.hpp"

namespace sollab {

enum class Nonlinearity { quadratic, signed_quadratic, free, linearized };

std::string to_string(Nonlinearity n);
Nonlinearity nonlinearity_from_string(const std::string& s);

struct EvolutionSpec {
    Nonlinearity nonlinearity = Nonlinearity::quadratic;
    std::optional<SolitonConfig> potential; // required for linearized
    double t_end = 5.0;
    double cfl = 0.25;         // dt = cfl * min spacing unless dt > 0
    double dt = 0.0;
    int record_stride = 0;     // 0: about 100 snapshots
    double support_radius = 0.0;
    double blowup_factor = 1e6;
    bool parallel = true;

    // Throws std::invalid_argument naming the violated invariant.
    void validate(const RadialGrid& grid) const;
    double time_step(const RadialGrid& grid) const;
    nlohmann::json to_json() const;
    static EvolutionSpec from_json(const nlohmann::json& j);
};

// V = -2 sum iota_j W_(lambda_j) per node; empty for non-linearized specs.
std::vector<double> potential_values(const EvolutionSpec& spec, const RadialGrid& grid);

struct Snapshot {
    double t;
    StatePair state;
};

struct BlowupReport {
    double time = 0.0;
    double sup = 0.0;
    double threshold = 0.0;
    nlohmann::json to_json() const { return {{"time", time}, {"sup", sup}, {"threshold", threshold}}; }
};

struct Trajectory {
    EvolutionSpec spec;
    double dt = 0.0;
    long steps = 0;
    std::vector<Snapshot> snapshots;
    std::vector<std::pair<double, double>> energy; // (t, E) per snapshot
    std::optional<BlowupReport> blowup;

    const RadialGrid& grid() const { return snapshots.front().state.grid(); }
    double max_energy_drift() const; // max |E(t) - E(0)| / max(|E(0)|, energy norm^2 / 2)
    // Directory with manifest.json and snapshot_NNNNN.csv (r,u,ut); returns the content hash.
    std::string write(const std::filesystem::path& dir) const;
    // Reads a directory written by write(); throws if the content hash does not match.
    static Trajectory read(const std::filesystem::path& dir);
};

Trajectory evolve(const StatePair& initial, const EvolutionSpec& spec);

// Time reversal (u, v) -> (u, -v).
StatePair reversed(const StatePair& s);

// pi^3 int (v^2/2 + u_r^2/2 + V u^2/2 - F(u)) r^5 dr, F = u^3/3 or |u|^3/3.
double energy(const StatePair& state, Nonlinearity n, const std::vector<double>& potential = {});
// ||u||_{H^1} ^2 + ||v||_{L^2}^2 on R^6.
double energy_norm_sq(const StatePair& state);
// ||(u - w, v - z)||_H on R^6.
double energy_distance(const StatePair& a, const StatePair& b);
// int_R^inf (u_r^2 + v^2) r^5 dr.
double exterior_energy(const StatePair& state, double R);

struct ChannelSeries {
    double t0 = 0.0;
    double R0 = 0.0;
    std::vector<std::pair<double, double>> samples;
    double asymptote = 0.0;
    double uncertainty = 0.0;
    bool truncated = false;

    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};

// Exterior energy on {r > R0 + |t - t0|} per snapshot; asymptote from the last quarter.
ChannelSeries channel_profile(const Trajectory& traj, double t0, double R0);

struct TwoBubbleOptions {
    SolitonConfig config = SolitonConfig::same_sign({1.0, 0.01});
    unsigned long seed = 0;
    double perturbation = 0.0;     // amplitude of random smooth bumps added to u0
    double window = 0.0;           // 0: 6 lambda_2
    double core_radius = 0.0;      // 0: lambda_2 / 10
    double nodes_per_decade = 64;
    double r_max = 0.0;            // 0: 100 lambda_1 + 2 window
    double cfl = 0.25;
    int fits = 40;
    bool parallel = true;
    nlohmann::json to_json() const;
};

struct TwoBubbleSample {
    double t;
    std::vector<double> lambda, alpha, beta;
    double delta, gamma;
};

struct TwoBubbleReport {
    TwoBubbleOptions options;
    std::vector<TwoBubbleSample> samples;
    ChannelSeries channel;
    bool fit_lost = false;
    std::string fit_error;
    double c_alpha_beta = 0.0;   // max |beta_j + alpha_j ||LambdaW||^2| / (gamma delta)
    double c_lambda = 0.0;       // max (|lambda_j' - kappa2 beta_j| - local discretization) / gamma^2
    double discretization = 0.0; // |lambda_j' - kappa2 beta_j| at the start of the window
    bool gamma_increasing = false;
    double delta_gamma_min = 0.0, delta_gamma_max = 0.0;

    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};

TwoBubbleReport two_bubble_experiment(const TwoBubbleOptions& opt);

} // namespace sollab
