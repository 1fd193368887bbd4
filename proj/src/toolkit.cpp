#include "sollab/toolkit.hpp"

#include <cmath>
#include <stdexcept>

namespace sollab {

namespace {

RadialField rescale(const RadialField& f, double lambda, double power) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("rescale: scale must be positive");
    const double amp = std::pow(lambda, -power);
    if (f.smooth())
        return RadialField::sample(f.grid_ptr(), [&](double r) { return amp * f.at(r / lambda); },
                                   f.tail_exponent());
    return RadialField::sample_exterior(
        f.grid_ptr(), lambda * f.r_start(), [&](double r) { return amp * f.at(std::max(r / lambda, f.r_start())); },
        f.tail_exponent());
}

} // namespace

RadialField rescale_h1(const RadialField& f, double lambda) { return rescale(f, lambda, 2.0); }

RadialField rescale_l2(const RadialField& f, double lambda) { return rescale(f, lambda, 3.0); }

RadialField extend_inward(const RadialField& f) {
    const double R = f.r_start();
    if (f.smooth()) return f;
    if (R > f.grid().r_max() / 2.0) throw std::domain_error("extend_inward: R exceeds the grid midpoint");
    std::vector<double> v(f.grid().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = f.grid().r(i);
        v[i] = i >= f.first() ? f.node(i) : 3.0 * f.at(2.0 * R - r) - 2.0 * f.at(3.0 * R - 2.0 * r);
    }
    return RadialField(f.grid_ptr(), std::move(v), Regularity::smooth, 0, f.tail_exponent());
}

} // namespace sollab
