#include "sollab/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "sollab/decomposition.hpp"
#include "sollab/io.hpp"
#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"

namespace sollab::channels {

namespace {

bool solve(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t piv = p;
        for (std::size_t r = p + 1; r < n; ++r)
            if (std::abs(a[r][p]) > std::abs(a[piv][p])) piv = r;
        if (!(std::abs(a[piv][p]) > 1e-12 * scale)) return false;
        std::swap(a[p], a[piv]);
        std::swap(b[p], b[piv]);
        for (std::size_t r = p + 1; r < n; ++r) {
            const double f = a[r][p] / a[p][p];
            for (std::size_t c = p; c < n; ++c) a[r][c] -= f * a[p][c];
            b[r] -= f * b[p];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t p = n; p-- > 0;) {
        double s = b[p];
        for (std::size_t c = p + 1; c < n; ++c) s -= a[p][c] * x[c];
        x[p] = s / a[p][p];
    }
    return true;
}

double radial_inner(Space s, const RadialField& f, const RadialField& g) {
    const double k = profile::kSphere;
    return s == Space::l2 ? norm::inner_l2_r6(f, g) / k : norm::inner_h1_r6(f, g) / k;
}

// Smooth step: 0 for x <= 1, 1 for x >= 2.
double smooth_step(double x) {
    const auto e = [](double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
    const double a = e(x - 1.0), b = e(2.0 - x);
    return a / (a + b);
}

// C-infinity bump supported in [c - w, c + w].
double bump(double r, double c, double w) {
    const double x = (r - c) / w;
    return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

double relative(double spread, double value) {
    return value > 0.0 ? spread / value : (spread > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
}

} // namespace

void ProjectorSpec::validate() const {
    if (scales.empty()) throw std::invalid_argument("projector: at least one direction required");
    for (std::size_t j = 0; j < scales.size(); ++j) {
        if (!(scales[j] > 0.0)) throw std::invalid_argument("projector: scales must be positive");
        if (j > 0 && !(scales[j] < scales[j - 1]))
            throw std::invalid_argument("projector: scales must be strictly decreasing");
    }
}

RadialField apply_projector(const ProjectorSpec& spec, const RadialField& f) {
    spec.validate();
    const std::size_t J = spec.scales.size();
    std::vector<RadialField> dirs;
    for (double l : spec.scales)
        dirs.push_back(spec.space == Space::l2 ? profile::lambda_w_l2_field(f.grid_ptr(), l)
                                               : profile::lambda_w_h1_field(f.grid_ptr(), l));
    std::vector<std::vector<double>> gram(J, std::vector<double>(J));
    std::vector<double> b(J), c;
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < J; ++k) gram[j][k] = radial_inner(spec.space, dirs[j], dirs[k]);
        b[j] = radial_inner(spec.space, f, dirs[j]);
    }
    if (!solve(gram, b, c)) throw std::runtime_error("projector: Gram matrix numerically singular");
    RadialField p = RadialField::zero(f.grid_ptr());
    for (std::size_t j = 0; j < J; ++j) p = p + dirs[j] * c[j];
    if (!spec.complement) return p.with_tail(-4.0);
    const auto q = f.tail_exponent();
    return (f - p).with_tail(q ? std::optional<double>(std::max(*q, -4.0)) : std::optional<double>(-4.0));
}

double r4_profile(double r, double R) {
    if (r >= R) return std::pow(r, -4);
    const double y = (r / R) * (r / R) - 1.0;
    const double p = 1.0 + y * (-2.0 + y * (3.0 + y * (-4.0 + 5.0 * y)));
    return p / (R * R * R * R);
}

nlohmann::json FreeChannelResult::to_json() const {
    return {{"R", R},
            {"horizon", horizon},
            {"c1", c1},
            {"lhs", lhs},
            {"rhs", rhs},
            {"ratio", degenerate ? nlohmann::json(nullptr) : nlohmann::json(ratio)},
            {"uncertainty", uncertainty},
            {"degenerate", degenerate},
            {"valid", valid}};
}

FreeChannelResult verify_free_channel(const RadialField& u1, double R, double horizon) {
    if (!u1.smooth()) throw std::invalid_argument("free channel: u1 must be sampled down to r = 0");
    if (!(R > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("free channel: R and horizon must be positive");
    const GridPtr grid = u1.grid_ptr();
    if (R + 2.0 * horizon > grid->r_max())
        throw std::invalid_argument("free channel: grid too short for the cone R + t up to the horizon");
    FreeChannelResult res;
    res.R = R;
    res.horizon = horizon;
    res.c1 = project_c1(u1, R);
    const double n2 = std::pow(norm::l2(u1, R), 2);
    const double lhs2 = n2 - res.c1 * res.c1 / (2.0 * R * R);
    res.degenerate = !(lhs2 > 1e-8 * std::max(n2, 1e-300));
    res.lhs = res.degenerate ? 0.0 : std::sqrt(lhs2);

    EvolutionSpec spec;
    spec.nonlinearity = Nonlinearity::free;
    spec.t_end = horizon;
    spec.cfl = 0.25;
    spec.record_stride = std::max(1, static_cast<int>(horizon / (spec.cfl * grid->min_spacing()) / 200));
    const StatePair data(RadialField::zero(grid), u1);
    const Trajectory traj = evolve(data, spec);

    const RadialField chi = RadialField::sample(grid, [R](double r) { return r4_profile(r, R); }, -4.0);
    ChannelSeries series;
    series.t0 = 0.0;
    series.R0 = R;
    for (const auto& s : traj.snapshots) {
        const double radius = R + s.t;
        if (radius > grid->r_max() - s.t) {
            series.truncated = true;
            break;
        }
        const StatePair ext((s.state.position.with_tail(std::nullopt) - chi * (res.c1 * s.t)).with_tail(-4.0),
                            (s.state.velocity.with_tail(std::nullopt) - chi * res.c1).with_tail(-4.0));
        series.samples.emplace_back(s.t, exterior_energy(ext, radius));
    }
    const std::size_t n = series.samples.size(), k0 = n - std::max<std::size_t>(1, n / 4);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (std::size_t k = k0; k < n; ++k) {
        sum += series.samples[k].second;
        lo = std::min(lo, series.samples[k].second);
        hi = std::max(hi, series.samples[k].second);
    }
    series.asymptote = sum / static_cast<double>(n - k0);
    series.uncertainty = hi - lo;
    res.series = series;
    res.rhs = std::sqrt(std::max(series.asymptote, 0.0));
    res.uncertainty = relative(series.uncertainty, series.asymptote);
    res.valid = res.uncertainty <= 0.1 && !series.truncated;
    res.ratio = res.degenerate ? std::numeric_limits<double>::quiet_NaN() : res.lhs / res.rhs;
    return res;
}

nlohmann::json FreeBattery::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) rows.push_back(r.to_json());
    return {{"max_ratio", max_ratio}, {"bound", kFreeChannelConstant}, {"samples", rows}};
}

FreeBattery free_channel_battery(const BatteryOptions& opt) {
    constexpr double R = 1.0;
    const double horizon = opt.horizon > 0.0 ? opt.horizon : 8.0 * R;
    const GridPtr grid = make_uniform(R / 40.0, 4.0 * R + 2.0 * horizon + 2.0);
    struct Bumps {
        double c[3], w[3], a[3];
    };
    std::vector<Bumps> draws(static_cast<std::size_t>(opt.samples));
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto& d : draws) {
        for (int k = 0; k < 3; ++k) {
            d.w[k] = R * (0.2 + 0.5 * U(rng));
            d.c[k] = R + d.w[k] + (3.0 * R - 2.0 * d.w[k]) * U(rng);
            d.a[k] = 2.0 * U(rng) - 1.0;
        }
    }
    FreeBattery out;
    out.results.resize(draws.size());
    io::parallel_for(draws.size(), opt.workers, [&](std::size_t i) {
        const Bumps d = draws[i];
        const RadialField u1 = RadialField::sample(grid, [d](double r) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += d.a[k] * bump(r, d.c[k], d.w[k]);
            return s;
        });
        out.results[i] = verify_free_channel(u1, R, horizon);
    });
    for (const auto& r : out.results)
        if (!r.degenerate) out.max_ratio = std::max(out.max_ratio, r.ratio);
    return out;
}

double resonance_ratio(const RadialField& u0, double horizon, bool* degenerate) {
    const double e = std::pow(norm::h1(u0), 2);
    if (degenerate) *degenerate = e == 0.0;
    if (e == 0.0) return std::numeric_limits<double>::quiet_NaN();
    EvolutionSpec spec;
    spec.nonlinearity = Nonlinearity::free;
    spec.t_end = horizon;
    spec.record_stride = std::max(1, static_cast<int>(horizon / (spec.cfl * u0.grid().min_spacing()) / 200));
    const Trajectory traj = evolve(StatePair(u0, RadialField::zero(u0.grid_ptr())), spec);
    const ChannelSeries c = channel_profile(traj, 0.0, 0.0);
    return c.asymptote / e;
}

nlohmann::json ResonanceTable::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"span", r.span},
                       {"channel", r.channel},
                       {"energy", r.energy},
                       {"ratio", r.degenerate ? nlohmann::json(nullptr) : nlohmann::json(r.ratio)},
                       {"control_ratio", r.control_ratio}});
    return {{"rows", out}, {"decreasing", decreasing}, {"control_variation", control_variation}};
}

void ResonanceTable::write_csv(std::ostream& os) const {
    os << "span,channel,energy,ratio,control_ratio\n";
    for (const auto& r : rows)
        os << io::format_double(r.span) << ',' << io::format_double(r.channel) << ',' << io::format_double(r.energy)
           << ',' << io::format_double(r.ratio) << ',' << io::format_double(r.control_ratio) << '\n';
}

ResonanceTable resonance_demo(const std::vector<double>& spans, double horizon) {
    ResonanceTable t;
    for (double S : spans) {
        if (!(S > 1.0)) throw std::invalid_argument("resonance: spans must exceed 1");
        const double a = 1.0 / S;
        const GridPtr grid = make_uniform(a / 4.0, 2.0 + 2.0 * horizon + 1.0);
        const RadialField u0 = RadialField::sample(grid, [a](double r) {
            if (r <= a || r >= 2.0) return 0.0;
            return smooth_step(r / a) * (1.0 - smooth_step(r)) / (r * r);
        });
        const RadialField control = RadialField::sample(grid, [](double r) { return bump(r, 1.5, 0.5); });
        ResonanceRow row;
        row.span = S;
        row.energy = std::pow(norm::h1(u0), 2);
        row.ratio = resonance_ratio(u0, horizon, &row.degenerate);
        row.channel = row.ratio * row.energy;
        row.control_ratio = resonance_ratio(control, horizon);
        t.rows.push_back(row);
    }
    t.decreasing = t.rows.size() >= 2;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        if (k > 0) t.decreasing = t.decreasing && t.rows[k].ratio < t.rows[k - 1].ratio;
        lo = std::min(lo, t.rows[k].control_ratio);
        hi = std::max(hi, t.rows[k].control_ratio);
    }
    t.control_variation = t.rows.empty() ? 0.0 : hi / lo;
    return t;
}

nlohmann::json SolitonChannelResult::to_json() const {
    return {{"scales", scales},
            {"lhs", lhs},
            {"rhs", rhs},
            {"channel_plus", channel_plus},
            {"channel_minus", channel_minus},
            {"gamma_term", gamma_term},
            {"uncertainty", uncertainty},
            {"horizon", horizon},
            {"ratio", ratio},
            {"valid", valid}};
}

SolitonChannelResult verify_multisoliton_channel(const StatePair& data, const std::vector<double>& scales,
                                                 double horizon, double gamma_max) {
    if (gamma_of(scales) > gamma_max)
        throw std::invalid_argument("soliton channel: scale separation gamma exceeds gamma*");
    const RadialGrid& grid = data.grid();
    if (2.0 * horizon > grid.r_max()) throw std::invalid_argument("soliton channel: grid too short for the horizon");
    SolitonChannelResult res;
    res.scales = scales;
    res.horizon = horizon;

    const RadialField p1 = apply_projector({Space::l2, scales, true}, data.velocity);
    const RadialField p0 = apply_projector({Space::h1, scales, true}, data.position);
    const norm::ShellRange shells{4.0 * grid.r(1), grid.r_max() / 8.0};
    const double z = scales.size() == 1 ? norm::z_alpha(p0.derivative(), -3.0, shells)
                                        : norm::z_alpha_multi(p0.derivative(), -3.0, scales, shells);
    res.lhs = std::pow(norm::l2(p1), 2) + z * z;

    EvolutionSpec spec;
    spec.nonlinearity = Nonlinearity::linearized;
    spec.potential = SolitonConfig::same_sign(scales);
    spec.t_end = horizon;
    spec.blowup_factor = std::numeric_limits<double>::max();
    spec.record_stride = std::max(1, static_cast<int>(horizon / (spec.cfl * grid.min_spacing()) / 200));
    const ChannelSeries plus = channel_profile(evolve(data, spec), 0.0, 0.0);
    const ChannelSeries minus = channel_profile(evolve(reversed(data), spec), 0.0, 0.0);
    res.channel_plus = plus.asymptote;
    res.channel_minus = minus.asymptote;
    const double g = gamma_of(scales);
    res.gamma_term = g * g * (std::pow(norm::h1(data.position), 2) + std::pow(norm::l2(data.velocity), 2));
    res.rhs = res.channel_plus + res.channel_minus + res.gamma_term;
    res.uncertainty = relative(plus.uncertainty + minus.uncertainty, plus.asymptote + minus.asymptote);
    res.valid = !plus.truncated && !minus.truncated && res.uncertainty <= 0.1;
    res.ratio = res.lhs > 0.0 ? res.lhs / res.rhs : 0.0;
    return res;
}

SolitonChannelResult verify_soliton_channel(const StatePair& data, double horizon) {
    return verify_multisoliton_channel(data, {1.0}, horizon);
}

nlohmann::json SolitonBattery::to_json() const {
    nlohmann::json rows = nlohmann::json::array(), span = nlohmann::json::array();
    for (const auto& r : results) rows.push_back(r.to_json());
    for (const auto& r : span_results) span.push_back(r.to_json());
    return {{"scales", scales}, {"horizon", horizon}, {"C_hat", c_hat}, {"span_lhs_max", span_lhs_max},
            {"samples", rows},  {"span_samples", span}};
}

void SolitonBattery::write_csv(std::ostream& os) const {
    os << "index,lhs,rhs,ratio,channel_plus,channel_minus,gamma_term,uncertainty\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        os << i << ',' << io::format_double(r.lhs) << ',' << io::format_double(r.rhs) << ','
           << io::format_double(r.ratio) << ',' << io::format_double(r.channel_plus) << ','
           << io::format_double(r.channel_minus) << ',' << io::format_double(r.gamma_term) << ','
           << io::format_double(r.uncertainty) << '\n';
    }
}

SolitonBattery soliton_battery(const std::vector<double>& scales, const BatteryOptions& opt) {
    ProjectorSpec check{Space::l2, scales, false};
    check.validate();
    SolitonBattery out;
    out.scales = scales;
    out.horizon = opt.horizon > 0.0 ? opt.horizon : 12.0;
    const double lmin = scales.back();
    const GridPtr grid = make_uniform(lmin / 10.0, 2.0 * out.horizon + 6.0);

    struct Draw {
        double c[4], w[4], a[4];
    };
    std::vector<Draw> draws(static_cast<std::size_t>(opt.samples));
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto& d : draws) {
        for (int k = 0; k < 4; ++k) {
            const double s = scales[static_cast<std::size_t>(k) % scales.size()];
            d.w[k] = s * (0.5 + U(rng));
            d.c[k] = s * 4.0 * U(rng);
            d.a[k] = (2.0 * U(rng) - 1.0) / (k < 2 ? s * s : s * s * s);
        }
    }
    const auto field = [&](const Draw& d, int from) {
        return RadialField::sample(grid, [d, from](double r) {
            double s = 0.0;
            for (int k = from; k < from + 2; ++k) {
                const double x = (r - d.c[k]) / d.w[k], y = (r + d.c[k]) / d.w[k];
                s += d.a[k] * (std::exp(-x * x) + std::exp(-y * y)); // even in r
            }
            return s;
        });
    };
    out.results.resize(draws.size());
    io::parallel_for(draws.size(), opt.workers, [&](std::size_t i) {
        const StatePair data(field(draws[i], 0), field(draws[i], 2));
        out.results[i] = verify_multisoliton_channel(data, scales, out.horizon);
    });
    for (const auto& r : out.results) out.c_hat = std::max(out.c_hat, r.ratio);

    // span data: (LambdaW)_(l_j) positions and (LambdaW)_[l_j] velocities
    for (std::size_t j = 0; j < scales.size(); ++j) {
        for (int kind = 0; kind < 2; ++kind) {
            const RadialField dir = kind == 0 ? profile::lambda_w_h1_field(grid, scales[j])
                                              : profile::lambda_w_l2_field(grid, scales[j]);
            const StatePair data = kind == 0 ? StatePair(dir, RadialField::zero(grid).with_tail(-4.0))
                                             : StatePair(RadialField::zero(grid).with_tail(-4.0), dir);
            auto r = verify_multisoliton_channel(data, scales, out.horizon);
            const double scale = kind == 0 ? std::pow(norm::h1(dir), 2) : std::pow(norm::l2(dir), 2);
            out.span_lhs_max = std::max(out.span_lhs_max, r.lhs / scale);
            out.span_results.push_back(r);
        }
    }
    return out;
}

double hardy_ratio(const RadialField& u) {
    const norm::ShellRange shells{4.0 * u.grid().r(1), u.grid().r_max() / 8.0};
    return norm::z_alpha(u, -2.0, shells) / norm::z_alpha(u.derivative(), -3.0, shells);
}

} // namespace sollab::channels
