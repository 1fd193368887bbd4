#include "sollab/field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "sollab/quadrature.hpp"

namespace sollab {

std::string to_string(Regularity r) { return r == Regularity::smooth ? "smooth" : "exterior"; }

RadialField::RadialField(GridPtr grid, std::vector<double> values, Regularity regularity, std::size_t first,
                         std::optional<double> tail_exponent)
    : grid_(std::move(grid)), values_(std::move(values)), regularity_(regularity), first_(first),
      tail_(tail_exponent) {
    if (!grid_) throw std::invalid_argument("field: null grid");
    if (first_ + values_.size() != grid_->size())
        throw std::invalid_argument("field: samples must run from `first` to the last node");
    if (regularity_ == Regularity::smooth && first_ != 0)
        throw std::invalid_argument("field: smooth fields start at r = 0");
    if (regularity_ == Regularity::exterior && first_ == 0)
        throw std::invalid_argument("field: exterior fields need R_start > 0");
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f,
                                std::optional<double> tail_exponent) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->r(i));
    return RadialField(std::move(grid), std::move(v), Regularity::smooth, 0, tail_exponent);
}

RadialField RadialField::sample_exterior(GridPtr grid, double r_start, const std::function<double(double)>& f,
                                         std::optional<double> tail_exponent) {
    if (!(r_start > 0.0)) throw std::invalid_argument("field: exterior start must be positive");
    const std::size_t first = grid->index_at_or_above(r_start * (1.0 - 1e-12));
    if (first + 8 > grid->size()) throw std::domain_error("field: exterior start too close to r_max");
    std::vector<double> v(grid->size() - first);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid->r(first + k));
    return RadialField(std::move(grid), std::move(v), Regularity::exterior, first, tail_exponent);
}

RadialField RadialField::zero(GridPtr grid) {
    const std::size_t n = grid->size();
    return RadialField(std::move(grid), std::vector<double>(n, 0.0), Regularity::smooth);
}

double RadialField::at(double r) const {
    if (r > grid_->r_max()) {
        if (!tail_) return 0.0;
        return quad::fit_tail(*grid_, values_, *tail_)(r);
    }
    return quad::interpolate(*grid_, values_, first_, smooth(), r);
}

RadialField RadialField::derivative() const {
    auto d = quad::differentiate(*grid_, values_, first_, smooth(), 1);
    std::optional<double> q;
    if (tail_) q = *tail_ - 1.0;
    return RadialField(grid_, std::move(d), regularity_, first_, q);
}

double RadialField::origin_slope() const {
    if (!smooth()) throw std::logic_error("field: origin slope of an exterior field");
    const std::size_t n = std::min<std::size_t>(7, values_.size());
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = grid_->r(k);
    const auto w = quad::fornberg_weights(0.0, x, 1);
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) d += w[k] * values_[k];
    const double scale = std::max(sup_abs(), 1e-300);
    return d * grid_->core_radius() / scale;
}

double RadialField::sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

RadialField RadialField::with_tail(std::optional<double> tail_exponent) const {
    RadialField out = *this;
    out.tail_ = tail_exponent;
    return out;
}

RadialField RadialField::restricted(double r_start) const {
    const std::size_t first = std::max(first_, grid_->index_at_or_above(r_start * (1.0 - 1e-12)));
    if (first == 0) return *this;
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first - first_), values_.end());
    return RadialField(grid_, std::move(v), Regularity::exterior, first, tail_);
}

RadialField RadialField::map(const std::function<double(double, double)>& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(radius(k), values_[k]);
    return RadialField(grid_, std::move(v), regularity_, first_, tail_);
}

RadialField RadialField::combine(const RadialField& o, double sign) const {
    if (!(*grid_ == *o.grid_)) throw std::invalid_argument("field: grids differ");
    const std::size_t first = std::max(first_, o.first_);
    std::vector<double> v(grid_->size() - first);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = node(first + k) + sign * o.node(first + k);
    std::optional<double> q;
    if (tail_ && o.tail_) q = std::max(*tail_, *o.tail_);
    const Regularity reg = first == 0 ? Regularity::smooth : Regularity::exterior;
    return RadialField(grid_, std::move(v), reg, first, q);
}

RadialField RadialField::operator+(const RadialField& o) const { return combine(o, 1.0); }
RadialField RadialField::operator-(const RadialField& o) const { return combine(o, -1.0); }

RadialField RadialField::operator*(double s) const {
    RadialField out = *this;
    for (double& v : out.values_) v *= s;
    return out;
}

nlohmann::json RadialField::envelope() const {
    nlohmann::json j{{"grid", grid_->descriptor()},
                     {"regularity_class", to_string(regularity_)},
                     {"first_index", first_},
                     {"r_start", r_start()},
                     {"values", values_}};
    j["tail_exponent"] = tail_ ? nlohmann::json(*tail_) : nlohmann::json(nullptr);
    return j;
}

RadialField RadialField::from_envelope(const nlohmann::json& j) {
    auto grid = std::make_shared<const RadialGrid>(RadialGrid::from_descriptor(j.at("grid")));
    const auto cls = j.at("regularity_class").get<std::string>();
    if (cls != "smooth" && cls != "exterior") throw std::invalid_argument("field envelope: bad regularity_class");
    std::optional<double> q;
    if (!j.at("tail_exponent").is_null()) q = j.at("tail_exponent").get<double>();
    return RadialField(std::move(grid), j.at("values").get<std::vector<double>>(),
                       cls == "smooth" ? Regularity::smooth : Regularity::exterior,
                       j.at("first_index").get<std::size_t>(), q);
}

void RadialField::write_csv(std::ostream& os) const {
    os << "r,value\n" << std::setprecision(17);
    for (std::size_t k = 0; k < values_.size(); ++k) os << radius(k) << ',' << values_[k] << '\n';
}

StatePair::StatePair(RadialField u, RadialField ut) : position(std::move(u)), velocity(std::move(ut)) {
    if (!(position.grid() == velocity.grid())) throw std::invalid_argument("state: components on different grids");
}

} // namespace sollab
