#include "sollab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sollab {

namespace {
constexpr double kLn10 = 2.302585092994045684;
constexpr double kMinNodesPerDecade = 8.0;
} // namespace

RadialGrid::RadialGrid(double core, double dxi, std::size_t count)
    : core_(core), dxi_(dxi), r_(count), dr_(count), d2r_(count) {
    for (std::size_t i = 0; i < count; ++i) {
        const double xi = static_cast<double>(i) * dxi;
        r_[i] = core * std::sinh(xi);
        dr_[i] = core * std::cosh(xi);
        d2r_[i] = r_[i];
    }
}

RadialGrid RadialGrid::graded(double core_radius, double nodes_per_decade, double r_max) {
    if (!(core_radius > 0.0) || !std::isfinite(core_radius))
        throw std::invalid_argument("grid: core radius must be positive and finite");
    if (!(r_max > core_radius) || !std::isfinite(r_max))
        throw std::invalid_argument("grid: r_max must be finite and exceed the core radius");
    if (!(nodes_per_decade >= kMinNodesPerDecade))
        throw std::invalid_argument("grid: at least 8 nodes per decade are required");
    const double dxi = kLn10 / nodes_per_decade;
    const double xi_max = std::asinh(r_max / core_radius);
    const auto m = static_cast<std::size_t>(std::ceil(xi_max / dxi - 1e-12));
    if (m < 16) throw std::invalid_argument("grid: fewer than 16 intervals");
    return RadialGrid(core_radius, dxi, m + 1);
}

RadialGrid RadialGrid::near_uniform(double spacing, double r_max) {
    if (!(spacing > 0.0) || !(r_max > 16.0 * spacing) || !std::isfinite(r_max))
        throw std::invalid_argument("grid: need 0 < spacing < r_max / 16");
    // core = r_max puts the whole domain in the linear part of sinh.
    const double dxi = spacing / r_max;
    const auto m = static_cast<std::size_t>(std::ceil(std::asinh(1.0) / dxi - 1e-12));
    return RadialGrid(r_max, dxi, m + 1);
}

double RadialGrid::nodes_per_decade() const { return kLn10 / dxi_; }

double RadialGrid::xi_of(double r) const { return std::asinh(r / core_); }

double RadialGrid::r_of_xi(double xi) const { return core_ * std::sinh(xi); }

std::size_t RadialGrid::index_at_or_above(double r) const {
    auto it = std::lower_bound(r_.begin(), r_.end(), r);
    return static_cast<std::size_t>(it - r_.begin());
}

nlohmann::json RadialGrid::descriptor() const {
    return {{"map", "sinh"},
            {"core_radius", core_},
            {"dxi", dxi_},
            {"nodes", r_.size()},
            {"nodes_per_decade", nodes_per_decade()},
            {"r_max", r_max()}};
}

RadialGrid RadialGrid::from_descriptor(const nlohmann::json& j) {
    const double core = j.at("core_radius").get<double>();
    const double dxi = j.at("dxi").get<double>();
    const auto n = j.at("nodes").get<std::size_t>();
    if (!(core > 0.0) || !(dxi > 0.0) || n < 17 || kLn10 / dxi < kMinNodesPerDecade)
        throw std::invalid_argument("grid descriptor: invalid parameters");
    return RadialGrid(core, dxi, n);
}

} // namespace sollab
