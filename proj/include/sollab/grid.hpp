#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace sollab {

// Radial grid r_i = r_core * sinh(i * dxi), i = 0..M.
//
// The map is uniform (spacing r_core*dxi) inside r_core and log-uniform
// (ln(10)/dxi nodes per decade) outside it. Since r(xi) is odd, the even
// extension of a radial function across r = 0 is the even extension in xi,
// which is what the finite-difference stencils use at the origin.
class RadialGrid {
public:
    // Log-graded grid: `nodes_per_decade` in the log band, uniform core of
    // radius `core_radius`, last node >= r_max.
    static RadialGrid graded(double core_radius, double nodes_per_decade, double r_max);
    // Nearly uniform grid with spacing in [h, sqrt(2) h] over [0, r_max].
    static RadialGrid near_uniform(double spacing, double r_max);

    std::size_t size() const { return r_.size(); }
    std::size_t last() const { return r_.size() - 1; }
    double r(std::size_t i) const { return r_[i]; }
    double jacobian(std::size_t i) const { return dr_[i]; }   // dr/dxi
    double curvature(std::size_t i) const { return d2r_[i]; } // d2r/dxi2
    std::span<const double> nodes() const { return r_; }

    double dxi() const { return dxi_; }
    double core_radius() const { return core_; }
    double r_max() const { return r_.back(); }
    double nodes_per_decade() const;
    double min_spacing() const { return r_[1] - r_[0]; }

    double xi_of(double r) const;
    double r_of_xi(double xi) const;
    // Smallest node index with r_i >= r (size() if none).
    std::size_t index_at_or_above(double r) const;

    nlohmann::json descriptor() const;
    static RadialGrid from_descriptor(const nlohmann::json& j);

    bool operator==(const RadialGrid& o) const {
        return core_ == o.core_ && dxi_ == o.dxi_ && r_.size() == o.r_.size();
    }

private:
    RadialGrid(double core, double dxi, std::size_t count);

    double core_;
    double dxi_;
    std::vector<double> r_;
    std::vector<double> dr_;
    std::vector<double> d2r_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_graded(double core_radius, double nodes_per_decade, double r_max) {
    return std::make_shared<const RadialGrid>(RadialGrid::graded(core_radius, nodes_per_decade, r_max));
}
inline GridPtr make_uniform(double spacing, double r_max) {
    return std::make_shared<const RadialGrid>(RadialGrid::near_uniform(spacing, r_max));
}

} // namespace sollab
