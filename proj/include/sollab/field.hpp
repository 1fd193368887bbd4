#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sollab/grid.hpp"

namespace sollab {

enum class Regularity { smooth, exterior };

std::string to_string(Regularity r);

// A radial function sampled on a RadialGrid.
//
// Smooth fields hold a sample at every node, starting at r = 0. Exterior
// fields start at the first node >= R_start and have no samples below it.
// An optional tail exponent q records f ~ r^q beyond r_max; fields without
// one are treated as vanishing past r_max.
class RadialField {
public:
    RadialField(GridPtr grid, std::vector<double> values, Regularity regularity, std::size_t first = 0,
                std::optional<double> tail_exponent = std::nullopt);

    static RadialField sample(GridPtr grid, const std::function<double(double)>& f,
                              std::optional<double> tail_exponent = std::nullopt);
    static RadialField sample_exterior(GridPtr grid, double r_start, const std::function<double(double)>& f,
                                       std::optional<double> tail_exponent = std::nullopt);
    static RadialField zero(GridPtr grid);

    const RadialGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t first() const { return first_; }
    std::size_t size() const { return values_.size(); }
    Regularity regularity() const { return regularity_; }
    bool smooth() const { return regularity_ == Regularity::smooth; }
    double r_start() const { return grid_->r(first_); }
    std::optional<double> tail_exponent() const { return tail_; }

    // Value at node index i (global grid index, i >= first()).
    double node(std::size_t i) const { return values_[i - first_]; }
    double radius(std::size_t k) const { return grid_->r(first_ + k); }

    // Interpolated value; beyond r_max uses the declared tail (or 0).
    double at(double r) const;
    RadialField derivative() const;
    // Discrete d/dr at the origin relative to the field scale; smooth fields only.
    double origin_slope() const;
    double sup_abs() const;

    RadialField with_tail(std::optional<double> tail_exponent) const;
    RadialField restricted(double r_start) const;
    RadialField map(const std::function<double(double, double)>& f) const; // f(r, value)

    RadialField operator+(const RadialField& o) const;
    RadialField operator-(const RadialField& o) const;
    RadialField operator*(double s) const;
    RadialField operator-() const { return *this * -1.0; }

    nlohmann::json envelope() const;
    static RadialField from_envelope(const nlohmann::json& j);
    void write_csv(std::ostream& os) const;

private:
    RadialField combine(const RadialField& o, double sign) const;

    GridPtr grid_;
    std::vector<double> values_;
    Regularity regularity_;
    std::size_t first_;
    std::optional<double> tail_;
};

inline RadialField operator*(double s, const RadialField& f) { return f * s; }

// Phase-space point (u, du/dt); both components share one grid.
struct StatePair {
    RadialField position;
    RadialField velocity;

    StatePair(RadialField u, RadialField ut);
    const RadialGrid& grid() const { return position.grid(); }
};

} // namespace sollab
