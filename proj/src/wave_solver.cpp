#include "sollab/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sollab/constants.hpp"
#include "sollab/io.hpp"
#include "sollab/kernels.hpp"
#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"

namespace sollab {

namespace {

const std::vector<std::pair<Nonlinearity, std::string>>& nonlinearity_names() {
    static const std::vector<std::pair<Nonlinearity, std::string>> n{{Nonlinearity::quadratic, "quadratic"},
                                                                     {Nonlinearity::signed_quadratic, "signed_quadratic"},
                                                                     {Nonlinearity::free, "free"},
                                                                     {Nonlinearity::linearized, "linearized"}};
    return n;
}

kernels::Source source_of(Nonlinearity n) {
    switch (n) {
    case Nonlinearity::quadratic: return kernels::Source::quadratic;
    case Nonlinearity::signed_quadratic: return kernels::Source::signed_quadratic;
    default: return kernels::Source::none;
    }
}


std::string snapshot_csv(const StatePair& s) {
    std::string out = "r,u,ut\n";
    const auto& g = s.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out += io::format_double(g.r(i));
        out += ',';
        out += io::format_double(s.position.node(i));
        out += ',';
        out += io::format_double(s.velocity.node(i));
        out += '\n';
    }
    return out;
}

nlohmann::json optional_json(std::optional<double> q) { return q ? nlohmann::json(*q) : nlohmann::json(nullptr); }

std::optional<double> optional_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

} // namespace

std::string to_string(Nonlinearity n) {
    for (const auto& [k, v] : nonlinearity_names())
        if (k == n) return v;
    return "?";
}

Nonlinearity nonlinearity_from_string(const std::string& s) {
    for (const auto& [k, v] : nonlinearity_names())
        if (v == s) return k;
    throw std::invalid_argument("unknown nonlinearity '" + s + "'");
}

void EvolutionSpec::validate(const RadialGrid& grid) const {
    if (!(cfl > 0.0 && cfl <= 0.5)) throw std::invalid_argument("evolution: cfl must lie in (0, 0.5]");
    if (dt < 0.0) throw std::invalid_argument("evolution: dt must be nonnegative");
    if (dt > 0.0 && dt > 0.5 * grid.min_spacing() * (1.0 + 1e-12))
        throw std::invalid_argument("evolution: dt exceeds the CFL limit 0.5 * min spacing");
    if (!(t_end > 0.0)) throw std::invalid_argument("evolution: t_end must be positive");
    if (record_stride < 0) throw std::invalid_argument("evolution: record_stride must be nonnegative");
    if (support_radius < 0.0) throw std::invalid_argument("evolution: support_radius must be nonnegative");
    if (t_end > grid.r_max() - support_radius)
        throw std::invalid_argument("evolution: t_end exceeds r_max - support_radius (boundary would be reached)");
    if (!(blowup_factor > 1.0)) throw std::invalid_argument("evolution: blowup_factor must exceed 1");
    if (nonlinearity == Nonlinearity::linearized) {
        if (!potential) throw std::invalid_argument("evolution: linearized flow requires a potential");
        potential->validate();
    } else if (potential) {
        throw std::invalid_argument("evolution: potential only applies to the linearized flow");
    }
}

double EvolutionSpec::time_step(const RadialGrid& grid) const { return dt > 0.0 ? dt : cfl * grid.min_spacing(); }

nlohmann::json EvolutionSpec::to_json() const {
    nlohmann::json j{{"nonlinearity", to_string(nonlinearity)},
                     {"t_end", t_end},
                     {"cfl", cfl},
                     {"dt", dt},
                     {"record_stride", record_stride},
                     {"support_radius", support_radius},
                     {"blowup_factor", blowup_factor},
                     {"parallel", parallel}};
    if (potential) j["potential"] = potential->to_json();
    return j;
}

EvolutionSpec EvolutionSpec::from_json(const nlohmann::json& j) {
    EvolutionSpec s;
    s.nonlinearity = nonlinearity_from_string(j.value("nonlinearity", std::string("quadratic")));
    if (j.contains("potential")) s.potential = SolitonConfig::from_json(j.at("potential"));
    s.t_end = j.value("t_end", s.t_end);
    s.cfl = j.value("cfl", s.cfl);
    s.dt = j.value("dt", s.dt);
    s.record_stride = j.value("record_stride", s.record_stride);
    s.support_radius = j.value("support_radius", s.support_radius);
    s.blowup_factor = j.value("blowup_factor", s.blowup_factor);
    s.parallel = j.value("parallel", s.parallel);
    return s;
}

std::vector<double> potential_values(const EvolutionSpec& spec, const RadialGrid& grid) {
    if (spec.nonlinearity != Nonlinearity::linearized || !spec.potential) return {};
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -2.0 * multisoliton_value(*spec.potential, grid.r(i));
    return v;
}

StatePair reversed(const StatePair& s) { return StatePair(s.position, -s.velocity); }

double energy(const StatePair& state, Nonlinearity n, const std::vector<double>& potential) {
    const RadialField& u = state.position;
    const RadialField& v = state.velocity;
    if (!u.smooth() || !v.smooth()) throw std::invalid_argument("energy: state must be defined down to r = 0");
    const RadialField du = u.derivative();
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = u.node(i), b = v.node(i), d = du.node(i);
        double e = 0.5 * b * b + 0.5 * d * d;
        if (n == Nonlinearity::quadratic) e -= a * a * a / 3.0;
        else if (n == Nonlinearity::signed_quadratic) e -= std::abs(a) * a * a / 3.0;
        if (!potential.empty()) e += 0.5 * potential[i] * a * a;
        g[i] = e;
    }
    std::optional<double> q;
    const auto qu = u.tail_exponent(), qv = v.tail_exponent();
    if (qu && qv) q = std::max({2.0 * *qu - 2.0, 3.0 * *qu, 2.0 * *qv});
    return profile::kSphere * norm::radial_integral(u.grid(), g, 0, 0.0, q);
}

double energy_norm_sq(const StatePair& state) {
    const double a = norm::h1_r6(state.position), b = norm::l2_r6(state.velocity);
    return a * a + b * b;
}

double energy_distance(const StatePair& a, const StatePair& b) {
    return std::sqrt(energy_norm_sq(StatePair(a.position - b.position, a.velocity - b.velocity)));
}

double exterior_energy(const StatePair& state, double R) {
    if (R >= state.grid().r_max()) return 0.0;
    const double a = norm::h1(state.position, R), b = norm::l2(state.velocity, R);
    return a * a + b * b;
}

Trajectory evolve(const StatePair& initial, const EvolutionSpec& spec) {
    const RadialGrid& grid = initial.grid();
    spec.validate(grid);
    if (!initial.position.smooth() || !initial.velocity.smooth())
        throw std::invalid_argument("evolution: initial state must be defined down to r = 0");
    // three frozen nodes keep the tail fit of every snapshot on the initial data
    const kernels::LaplacianStencil stencil(grid, 3);
    const auto potential = potential_values(spec, grid);
    kernels::Rk4Stepper stepper({&stencil, source_of(spec.nonlinearity), potential}, grid.size(), spec.parallel);

    Trajectory traj;
    traj.spec = spec;
    const double dt0 = spec.time_step(grid);
    const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(spec.t_end / dt0 - 1e-9)));
    traj.dt = spec.t_end / static_cast<double>(nsteps);
    const long stride = spec.record_stride > 0 ? spec.record_stride : std::max<long>(1, nsteps / 100);

    std::vector<double> u(initial.position.values().begin(), initial.position.values().end());
    std::vector<double> v(initial.velocity.values().begin(), initial.velocity.values().end());
    const auto qu = initial.position.tail_exponent(), qv = initial.velocity.tail_exponent();
    const auto record = [&](double t) {
        StatePair s(RadialField(initial.position.grid_ptr(), u, Regularity::smooth, 0, qu),
                    RadialField(initial.position.grid_ptr(), v, Regularity::smooth, 0, qv));
        traj.energy.emplace_back(t, energy(s, spec.nonlinearity, potential));
        traj.snapshots.push_back({t, std::move(s)});
    };
    record(0.0);

    const double sup0 = initial.position.sup_abs();
    const double threshold = sup0 > 0.0 ? spec.blowup_factor * sup0 : std::numeric_limits<double>::infinity();
    for (long k = 1; k <= nsteps; ++k) {
        stepper.step(u, v, traj.dt);
        traj.steps = k;
        const double t = k == nsteps ? spec.t_end : static_cast<double>(k) * traj.dt;
        double sup = 0.0;
        for (double x : u) sup = std::max(sup, std::abs(x));
        if (!(sup <= threshold)) { // also catches NaN
            traj.blowup = BlowupReport{t, sup, threshold};
            break;
        }
        if (k % stride == 0 || k == nsteps) record(t);
    }
    return traj;
}

double Trajectory::max_energy_drift() const {
    if (energy.empty()) return 0.0;
    const double e0 = energy.front().second;
    const double scale = std::max(std::abs(e0), 0.5 * energy_norm_sq(snapshots.front().state));
    if (scale == 0.0) return 0.0;
    double d = 0.0;
    for (const auto& [t, e] : energy) d = std::max(d, std::abs(e - e0));
    return d / scale;
}

std::string Trajectory::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::json snaps = nlohmann::json::array();
    std::string all;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(5) << std::setfill('0') << k << ".csv";
        const std::string csv = snapshot_csv(snapshots[k].state);
        io::write_file(dir / name.str(), csv);
        all += csv;
        snaps.push_back({{"index", k}, {"t", snapshots[k].t}, {"file", name.str()}, {"hash", io::git_blob_hash(csv)}});
    }
    const std::string hash = io::git_blob_hash(all);
    nlohmann::json manifest{{"schema_version", io::kSchemaVersion},
                            {"kind", "trajectory"},
                            {"software_version", io::software_version()},
                            {"spec", spec.to_json()},
                            {"grid", grid().descriptor()},
                            {"dt", dt},
                            {"steps", steps},
                            {"tail_exponents",
                             {optional_json(snapshots.front().state.position.tail_exponent()),
                              optional_json(snapshots.front().state.velocity.tail_exponent())}},
                            {"blowup", blowup ? blowup->to_json() : nlohmann::json(nullptr)},
                            {"energy", energy},
                            {"snapshots", snaps},
                            {"content_hash", hash}};
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return hash;
}

Trajectory Trajectory::read(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
    Trajectory t;
    t.spec = EvolutionSpec::from_json(manifest.at("spec"));
    t.dt = manifest.at("dt").get<double>();
    t.steps = manifest.at("steps").get<long>();
    const auto grid = std::make_shared<const RadialGrid>(RadialGrid::from_descriptor(manifest.at("grid")));
    const auto qu = optional_from(manifest.at("tail_exponents").at(0));
    const auto qv = optional_from(manifest.at("tail_exponents").at(1));
    std::string all;
    for (const auto& s : manifest.at("snapshots")) {
        const std::string csv = io::read_file(dir / s.at("file").get<std::string>());
        all += csv;
        std::istringstream is(csv);
        std::string line;
        std::getline(is, line);
        std::vector<double> u, v;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
            u.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
            v.push_back(std::stod(line.substr(c2 + 1)));
        }
        if (u.size() != grid->size()) throw std::runtime_error("trajectory: snapshot size does not match grid");
        t.snapshots.push_back({s.at("t").get<double>(),
                               StatePair(RadialField(grid, std::move(u), Regularity::smooth, 0, qu),
                                         RadialField(grid, std::move(v), Regularity::smooth, 0, qv))});
    }
    if (io::git_blob_hash(all) != manifest.at("content_hash").get<std::string>())
        throw std::runtime_error("trajectory: content hash mismatch in " + dir.string());
    t.energy = manifest.at("energy").get<std::vector<std::pair<double, double>>>();
    if (!manifest.at("blowup").is_null()) {
        const auto& b = manifest.at("blowup");
        t.blowup = BlowupReport{b.at("time").get<double>(), b.at("sup").get<double>(), b.at("threshold").get<double>()};
    }
    return t;
}

nlohmann::json ChannelSeries::to_json() const {
    return {{"t0", t0},
            {"R0", R0},
            {"asymptote", asymptote},
            {"uncertainty", uncertainty},
            {"truncated", truncated},
            {"samples", samples.size()}};
}

void ChannelSeries::write_csv(std::ostream& os) const {
    os << "t,value\n";
    for (const auto& [t, e] : samples) os << io::format_double(t) << ',' << io::format_double(e) << '\n';
}

ChannelSeries channel_profile(const Trajectory& traj, double t0, double R0) {
    if (R0 < 0.0) throw std::invalid_argument("channel: R0 must be nonnegative");
    ChannelSeries c;
    c.t0 = t0;
    c.R0 = R0;
    for (const auto& s : traj.snapshots) {
        const double radius = R0 + std::abs(s.t - t0);
        if (radius > traj.grid().r_max() - s.t) {
            c.truncated = true;
            break;
        }
        c.samples.emplace_back(s.t, exterior_energy(s.state, radius));
    }
    if (c.samples.empty()) return c;
    const std::size_t n = c.samples.size(), k0 = n - std::max<std::size_t>(1, n / 4);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (std::size_t k = k0; k < n; ++k) {
        const double e = c.samples[k].second;
        sum += e;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    c.asymptote = sum / static_cast<double>(n - k0);
    c.uncertainty = hi - lo;
    return c;
}

nlohmann::json TwoBubbleOptions::to_json() const {
    return {{"config", config.to_json()},
            {"seed", seed},
            {"perturbation", perturbation},
            {"window", window},
            {"core_radius", core_radius},
            {"nodes_per_decade", nodes_per_decade},
            {"r_max", r_max},
            {"cfl", cfl},
            {"fits", fits},
            {"parallel", parallel}};
}

nlohmann::json TwoBubbleReport::to_json() const {
    return {{"options", options.to_json()},
            {"samples", samples.size()},
            {"channel", channel.to_json()},
            {"fit_lost", fit_lost},
            {"fit_error", fit_error},
            {"C_alpha_beta", c_alpha_beta},
            {"C_lambda", c_lambda},
            {"discretization", discretization},
            {"gamma_increasing", gamma_increasing},
            {"delta_over_gamma", {delta_gamma_min, delta_gamma_max}}};
}

void TwoBubbleReport::write_csv(std::ostream& os) const {
    os << "t,lambda1,lambda2,alpha1,alpha2,beta1,beta2,delta,gamma\n";
    for (const auto& s : samples) {
        os << io::format_double(s.t);
        for (double x : s.lambda) os << ',' << io::format_double(x);
        for (double x : s.alpha) os << ',' << io::format_double(x);
        for (double x : s.beta) os << ',' << io::format_double(x);
        os << ',' << io::format_double(s.delta) << ',' << io::format_double(s.gamma) << '\n';
    }
}

TwoBubbleReport two_bubble_experiment(const TwoBubbleOptions& opt) {
    const SolitonConfig& c = opt.config;
    c.validate();
    if (c.size() != 2) throw std::invalid_argument("two-bubble: J must be 2");
    if (c.gamma() > 0.1) throw std::invalid_argument("two-bubble: gamma must be <= 0.1");
    if (opt.fits < 8) throw std::invalid_argument("two-bubble: at least 8 fits required");
    const double l1 = c.scales[0], l2 = c.scales[1];
    const double window = opt.window > 0.0 ? opt.window : 6.0 * l2;
    const double core = opt.core_radius > 0.0 ? opt.core_radius : l2 / 10.0;
    const double r_max = opt.r_max > 0.0 ? opt.r_max : 100.0 * l1 + 2.0 * window;
    const GridPtr grid = make_graded(core, opt.nodes_per_decade, r_max);
    for (const auto& w : resolution_warnings(c, *grid))
        throw std::invalid_argument("two-bubble: " + w);

    RadialField u0 = multisoliton(c, grid);
    if (opt.perturbation != 0.0) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int b = 0; b < 3; ++b) {
            const double scale = b % 2 == 0 ? l2 : l1;
            const double center = scale * (1.0 + 3.0 * U(rng)), width = scale * (0.5 + U(rng));
            const double amp = opt.perturbation * (2.0 * U(rng) - 1.0) / (scale * scale);
            u0 = u0 + RadialField::sample(grid, [=](double r) {
                          const double x = (r - center) / width;
                          return amp * std::exp(-x * x);
                      }, -4.0);
        }
    }
    const StatePair initial(u0, RadialField::zero(grid).with_tail(-4.0));

    EvolutionSpec spec;
    spec.nonlinearity = c.signs[0] == 1 && c.signs[1] == 1 ? Nonlinearity::quadratic : Nonlinearity::signed_quadratic;
    spec.t_end = window;
    spec.cfl = opt.cfl;
    spec.parallel = opt.parallel;
    const double dt0 = spec.cfl * grid->min_spacing();
    const long stride = std::max<long>(1, static_cast<long>(std::ceil(window / (opt.fits * dt0))));
    spec.dt = window / static_cast<double>(stride * opt.fits);
    spec.record_stride = static_cast<int>(stride);
    const Trajectory traj = evolve(initial, spec);

    TwoBubbleReport rep;
    rep.options = opt;
    rep.channel = channel_profile(traj, 0.0, 10.0 * l1);
    SolitonConfig guess = c;
    for (const auto& s : traj.snapshots) {
        try {
            const auto fit = fit_modulation(s.state, guess);
            guess = fit.config;
            rep.samples.push_back({s.t, fit.config.scales, fit.alpha, fit.beta, fit.delta, fit.gamma});
        } catch (const std::exception& e) {
            rep.fit_lost = true;
            rep.fit_error = e.what();
            break;
        }
    }
    if (traj.blowup) {
        rep.fit_lost = true;
        if (rep.fit_error.empty()) rep.fit_error = "blow-up detected during the window";
    }

    const auto& K = default_constants();
    const std::size_t n = rep.samples.size();
    rep.gamma_increasing = n >= 2;
    rep.delta_gamma_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& s = rep.samples[k];
        if (k > 0) rep.gamma_increasing = rep.gamma_increasing && s.gamma > rep.samples[k - 1].gamma;
        for (std::size_t j = 0; j < 2; ++j) {
            if (s.delta > 0.0)
                rep.c_alpha_beta = std::max(rep.c_alpha_beta, std::abs(s.beta[j] + s.alpha[j] * K.norm_lambda_w_sq) /
                                                                  (s.gamma * s.delta));
        }
        if (k > 0) {
            const double ratio = s.delta / s.gamma;
            rep.delta_gamma_min = std::min(rep.delta_gamma_min, ratio);
            rep.delta_gamma_max = std::max(rep.delta_gamma_max, ratio);
        }
    }
    // lambda_j' by 5-point central differences on the uniform snapshot times.
    for (std::size_t k = 2; k + 2 < n; ++k) {
        const double h = rep.samples[k + 1].t - rep.samples[k].t;
        for (std::size_t j = 0; j < 2; ++j) {
            const auto L = [&](std::size_t i) { return rep.samples[i].lambda[j]; };
            const double d5 = (L(k - 2) - 8.0 * L(k - 1) + 8.0 * L(k + 1) - L(k + 2)) / (12.0 * h);
            const double d3 = (L(k + 1) - L(k - 1)) / (2.0 * h);
            const double gap = std::abs(d5 - K.kappa2 * rep.samples[k].beta[j]);
            const double g = rep.samples[k].gamma;
            rep.c_lambda = std::max(rep.c_lambda, std::max(gap - std::abs(d5 - d3), 0.0) / (g * g));
            rep.discretization = std::max(rep.discretization, std::abs(d5 - d3));
        }
    }
    return rep;
}

} // namespace sollab
