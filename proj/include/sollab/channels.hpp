#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sollab/field.hpp"
#include "sollab/wave_solver.hpp"

// Channel-of-energy experiments. Norms here use the radial measure r^5 dr
// on both sides of every bound, so the sphere factor cancels in ratios.
namespace sollab::channels {

enum class Space { l2, h1 };

struct ProjectorSpec {
    Space space = Space::l2;
    std::vector<double> scales;  // directions (LambdaW)_[l] (L2) or (LambdaW)_(l) (H1)
    bool complement = false;

    void validate() const;
};

// Orthogonal projection onto the span (or its complement) through the Gram system.
RadialField apply_projector(const ProjectorSpec& spec, const RadialField& f);

// chi(r) = r^-4 for r >= R, continued inside by an even polynomial matching
// four derivatives at R.
double r4_profile(double r, double R);

struct FreeChannelResult {
    double R = 0.0;
    double horizon = 0.0;
    double c1 = 0.0;       // removed r^-4 coefficient
    double lhs = 0.0;      // ||u1_perp||_{L^2_R}
    double rhs = 0.0;      // sqrt of the channel asymptote
    double uncertainty = 0.0; // relative spread of the asymptote
    double ratio = 0.0;
    bool degenerate = false;  // u1_perp = 0
    bool valid = true;        // asymptote uncertainty within 10%
    ChannelSeries series;
    nlohmann::json to_json() const;
};

// Free evolution of (0, u1); the r^-4 component is removed exactly through
// the explicit solution t r^-4 outside the cone.
FreeChannelResult verify_free_channel(const RadialField& u1, double R, double horizon);

inline constexpr double kFreeChannelConstant = 20.0 / 3.0;

struct BatteryOptions {
    unsigned long seed = 1;
    int samples = 20;
    double horizon = 0.0; // 0: default per battery
    int workers = 1;
};

struct FreeBattery {
    std::vector<FreeChannelResult> results;
    double max_ratio = 0.0;
    nlohmann::json to_json() const;
};
// Random smooth bump combinations supported in [R, 4R] (R = 1).
FreeBattery free_channel_battery(const BatteryOptions& opt);

struct ResonanceRow {
    double span = 0.0;
    double channel = 0.0;
    double energy = 0.0;
    double ratio = 0.0;
    double control_ratio = 0.0;
    bool degenerate = false;
};
struct ResonanceTable {
    std::vector<ResonanceRow> rows;
    bool decreasing = false;
    double control_variation = 0.0; // max/min of the control ratios
    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};
// Data (r^-2 cut off to [1/span, 1], 0) and a control bump at the outer scale on the same grid.
ResonanceTable resonance_demo(const std::vector<double>& spans, double horizon = 16.0);
// Channel asymptote / energy norm^2 of (u0, 0) under free flow; 0/0 reported as NaN.
double resonance_ratio(const RadialField& u0, double horizon, bool* degenerate = nullptr);

struct SolitonChannelResult {
    std::vector<double> scales;
    double lhs = 0.0;
    double rhs = 0.0;
    double channel_plus = 0.0, channel_minus = 0.0;
    double gamma_term = 0.0;
    double uncertainty = 0.0;
    double horizon = 0.0;
    double ratio = 0.0;  // lhs / rhs, 0 when lhs = 0
    bool valid = true;
    nlohmann::json to_json() const;
};

// lhs = ||Pi_perp_L2 u1||^2 + ||d_r Pi_perp_H1 u0||^2_{Z_-3,lambda};
// rhs = sum over both time directions of the channel asymptotes on {r > |t|}
// under the linearized flow with potential V_lambda, plus gamma^2 ||data||^2.
// Throws std::invalid_argument when gamma(scales) > gamma_max.
SolitonChannelResult verify_multisoliton_channel(const StatePair& data, const std::vector<double>& scales,
                                                 double horizon, double gamma_max = 0.1);
SolitonChannelResult verify_soliton_channel(const StatePair& data, double horizon);

struct SolitonBattery {
    std::vector<double> scales;
    double horizon = 0.0;
    std::vector<SolitonChannelResult> results;
    std::vector<SolitonChannelResult> span_results; // data in the span of the directions
    double c_hat = 0.0;
    double span_lhs_max = 0.0; // relative to the data norm
    nlohmann::json to_json() const;
    void write_csv(std::ostream& os) const;
};
// Random smooth data on a grid resolving every scale; scales = {1} or a J = 2 pair.
SolitonBattery soliton_battery(const std::vector<double>& scales, const BatteryOptions& opt);

// ||u||_{Z_-2} / ||d_r u||_{Z_-3} on the resolved shells.
double hardy_ratio(const RadialField& u);

} // namespace sollab::channels
