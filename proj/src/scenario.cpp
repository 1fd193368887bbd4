#include "sollab/scenario.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "sollab/appendix_b.hpp"
#include "sollab/channels.hpp"
#include "sollab/constants.hpp"
#include "sollab/decomposition.hpp"
#include "sollab/io.hpp"
#include "sollab/modulation_ode.hpp"
#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"
#include "sollab/w_minus.hpp"
#include "sollab/wave_solver.hpp"

namespace sollab::scenario {

using nlohmann::json;

const std::vector<KindInfo>& kinds() {
    static const std::vector<KindInfo> k{
        {"constants", "explicit constants c_W, kappa0, kappa1, kappa2, ||LambdaW||^2, E(W)", {"constants.json", "constants.csv"}},
        {"w-minus", "singular stationary profile W- by Duhamel fixed point and inward integration", {"w_minus.json", "profile.csv"}},
        {"evolve", "radial wave evolution of a chosen initial datum", {"energy.csv", "trajectory/ (optional)"}},
        {"two-bubble", "two-bubble PDE run with modulation fits along the window", {"two_bubble.json", "two_bubble.csv", "channel.csv"}},
        {"channels-free", "free-channel battery of random velocity data", {"free_channel.json", "free_channel.csv"}},
        {"channels-soliton", "channel battery around one ground state", {"soliton_channel.json", "soliton_channel.csv"}},
        {"channels-multi", "channel battery around a two-soliton configuration", {"soliton_channel.json", "soliton_channel.csv"}},
        {"resonance", "channel/energy ratios of cut-off (r^-2, 0) data", {"resonance.json", "resonance.csv"}},
        {"ode-integrate", "modulation ODE trajectory with Lyapunov diagnostics", {"ode.json", "trajectory.csv"}},
        {"ode-scan", "empirical exit-time scan of the modulation ODE", {"scan.json", "scan.csv"}},
        {"appendix-b", "scaling scans of the interaction estimates", {"appendix_b.json", "appendix_b.csv"}},
    };
    return k;
}

namespace {

json graded_grid(double core, double npd, double r_max) {
    return {{"type", "graded"}, {"core_radius", core}, {"nodes_per_decade", npd}, {"spacing", 0.025}, {"r_max", r_max}};
}

const KindInfo& kind_info(const std::string& kind) {
    for (const auto& k : kinds())
        if (k.name == kind) return k;
    throw ConfigError("/kind", "unknown scenario kind '" + kind + "' (see list-scenarios)");
}

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

std::string type_name(const json& j) {
    if (j.is_number_integer()) return "integer";
    if (j.is_number()) return "number";
    return j.type_name();
}

bool compatible(const json& def, const json& val) {
    if (def.is_null()) return true;
    if (def.is_number_integer()) return val.is_number_integer();
    if (def.is_number()) return val.is_number();
    return def.type() == val.type();
}

// Overlay user values on defaults; unknown keys and type mismatches are errors.
json overlay(const json& def, const json& user, const std::string& path) {
    if (def.is_object()) {
        require(user.is_object(), path, "expected an object");
        json out = def;
        for (auto it = user.begin(); it != user.end(); ++it) {
            const std::string p = path + "/" + it.key();
            require(def.contains(it.key()), p, "unknown key");
            out[it.key()] = overlay(def.at(it.key()), it.value(), p);
        }
        return out;
    }
    require(compatible(def, user), path, "expected " + type_name(def) + ", got " + type_name(user));
    if (def.is_array() && !def.empty())
        for (std::size_t i = 0; i < user.size(); ++i)
            require(compatible(def.front(), user[i]), path + "/" + std::to_string(i),
                    "expected " + type_name(def.front()) + ", got " + type_name(user[i]));
    return user;
}

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

GridPtr build_grid(const json& g, const std::string& path) {
    const std::string type = g.at("type").get<std::string>();
    return guarded(path, [&] {
        if (type == "graded")
            return make_graded(g.at("core_radius").get<double>(), g.at("nodes_per_decade").get<double>(),
                               g.at("r_max").get<double>());
        if (type == "uniform") return make_uniform(g.at("spacing").get<double>(), g.at("r_max").get<double>());
        throw ConfigError(path + "/type", "grid type must be 'graded' or 'uniform'");
    });
}

SolitonConfig build_solitons(const json& j, const std::string& path, bool positive = false) {
    SolitonConfig c;
    c.scales = j.at("scales").get<std::vector<double>>();
    c.signs = j.at("signs").get<std::vector<int>>();
    if (c.signs.empty()) c.signs.assign(c.scales.size(), 1);
    guarded(path, [&] { c.validate(positive); });
    return c;
}

double smooth_bump(double r, double c, double w) {
    const double x = (r - c) / w;
    return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
}

RadialField random_bumps(const GridPtr& grid, std::mt19937_64& rng, int count, double amplitude) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::array<double, 3>> b(static_cast<std::size_t>(count));
    for (auto& x : b) x = {0.5 + 3.0 * U(rng), 0.4 + 0.6 * U(rng), amplitude * (2.0 * U(rng) - 1.0)};
    return RadialField::sample(grid, [b](double r) {
        double s = 0.0;
        for (const auto& x : b) s += x[2] * smooth_bump(r, x[0], x[1]);
        return s;
    });
}

// ---- per-kind setup -------------------------------------------------------

struct EvolveSetup {
    GridPtr grid;
    StatePair initial;
    EvolutionSpec spec;
};

EvolveSetup build_evolve(const json& p, unsigned long seed) {
    const GridPtr grid = build_grid(p.at("grid"), "/params/grid");
    const json& d = p.at("data");
    const std::string profile = d.at("profile").get<std::string>();
    const double amp = d.at("amplitude").get<double>();
    std::mt19937_64 rng(seed);
    std::optional<StatePair> initial;
    if (profile == "multisoliton") {
        const SolitonConfig c = build_solitons(d, "/params/data");
        initial.emplace(multisoliton(c, grid) * amp, RadialField::zero(grid).with_tail(-4.0));
    } else if (profile == "lambda-w") {
        const auto sc = d.at("scales").get<std::vector<double>>();
        require(sc.size() == 1 && sc[0] > 0.0, "/params/data/scales", "lambda-w data takes one positive scale");
        initial.emplace(profile::lambda_w_h1_field(grid, sc[0]) * amp, RadialField::zero(grid).with_tail(-4.0));
    } else if (profile == "bumps") {
        const int n = d.at("bumps").get<int>();
        require(n >= 1, "/params/data/bumps", "at least one bump required");
        RadialField u = random_bumps(grid, rng, n, amp);
        RadialField v = random_bumps(grid, rng, n, amp);
        initial.emplace(u, v);
    } else {
        throw ConfigError("/params/data/profile", "profile must be 'multisoliton', 'lambda-w' or 'bumps'");
    }
    json sj = p.at("spec");
    if (sj.at("potential").is_null()) sj.erase("potential");
    EvolutionSpec spec = guarded("/params/spec", [&] { return EvolutionSpec::from_json(sj); });
    guarded("/params/spec", [&] { spec.validate(*grid); });
    return {grid, *initial, spec};
}

TwoBubbleOptions build_two_bubble(const json& p, unsigned long seed) {
    TwoBubbleOptions o;
    o.config = build_solitons(p.at("config"), "/params/config");
    require(o.config.size() == 2, "/params/config/scales", "two bubbles required");
    require(o.config.gamma() <= 0.1, "/params/config/scales", "gamma must be <= 0.1");
    o.seed = seed;
    o.perturbation = p.at("perturbation").get<double>();
    o.window = p.at("window").get<double>();
    o.core_radius = p.at("core_radius").get<double>();
    o.nodes_per_decade = p.at("nodes_per_decade").get<double>();
    o.r_max = p.at("r_max").get<double>();
    o.cfl = p.at("cfl").get<double>();
    o.fits = p.at("fits").get<int>();
    require(o.window >= 0.0, "/params/window", "must be nonnegative (0 selects the default)");
    require(o.cfl > 0.0 && o.cfl <= 0.5, "/params/cfl", "cfl must lie in (0, 0.5]");
    require(o.fits >= 8, "/params/fits", "at least 8 fits required");
    require(o.nodes_per_decade >= 16, "/params/nodes_per_decade", "at least 16 nodes per decade required");
    return o;
}

channels::BatteryOptions build_battery(const json& p, const ScenarioConfig& c) {
    channels::BatteryOptions o;
    o.seed = c.seed;
    o.workers = c.workers;
    o.samples = p.at("samples").get<int>();
    o.horizon = p.at("horizon").get<double>();
    require(o.samples >= 1, "/params/samples", "at least one sample required");
    require(o.horizon > 0.0, "/params/horizon", "horizon must be positive");
    return o;
}

ode::OdeState build_ode_state(const json& p) {
    ode::OdeState s;
    s.lambda = p.at("lambda").get<std::vector<double>>();
    s.beta = p.at("beta").get<std::vector<double>>();
    s.signs = p.at("signs").get<std::vector<int>>();
    guarded("/params/lambda", [&] { s.validate(); });
    return s;
}

ode::IntegrateOptions build_ode_options(const json& p, unsigned long seed, double lambda1) {
    ode::IntegrateOptions o;
    o.eps0 = p.at("eps0").get<double>();
    o.horizon = p.at("horizon").get<double>();
    o.tolerance = p.at("tolerance").get<double>();
    require(o.eps0 > 0.0 && o.eps0 < 1.0, "/params/eps0", "eps0 must lie in (0, 1)");
    require(o.tolerance > 0.0, "/params/tolerance", "tolerance must be positive");
    require(o.horizon >= 0.0, "/params/horizon", "horizon must be nonnegative (0 selects 100 lambda_1)");
    const json& q = p.at("perturbation");
    if (q.at("enabled").get<bool>())
        o.perturbation = ode::Perturbation{q.at("c_lambda").get<double>(), q.at("c_beta").get<double>(), seed, lambda1};
    return o;
}

std::vector<Estimate> build_estimates(const json& p) {
    std::vector<Estimate> out;
    const auto names = p.at("estimates").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < names.size(); ++i)
        out.push_back(guarded("/params/estimates/" + std::to_string(i), [&] { return estimate_from_string(names[i]); }));
    require(!out.empty(), "/params/estimates", "at least one estimate required");
    require(p.at("points_per_decade").get<int>() >= 1, "/params/points_per_decade", "must be positive");
    return out;
}

void validate_params(const ScenarioConfig& c) {
    const json& p = c.params;
    const std::string& k = c.kind;
    if (k == "constants") {
        require(p.at("panels_per_decade").get<int>() >= 4, "/params/panels_per_decade", "at least 4 panels per decade");
        require(p.at("kappa0_tolerance").get<double>() > 0.0, "/params/kappa0_tolerance", "must be positive");
    } else if (k == "w-minus") {
        build_grid(p.at("grid"), "/params/grid");
        require(p.at("r_start").get<double>() > 0.0, "/params/r_start", "must be positive");
        require(p.at("tolerance").get<double>() > 0.0, "/params/tolerance", "must be positive");
        require(p.at("max_iterations").get<int>() >= 1, "/params/max_iterations", "must be positive");
    } else if (k == "evolve") {
        build_evolve(p, c.seed);
    } else if (k == "two-bubble") {
        build_two_bubble(p, c.seed);
    } else if (k == "channels-free" || k == "channels-soliton") {
        build_battery(p, c);
    } else if (k == "channels-multi") {
        build_battery(p, c);
        const auto sc = p.at("scales").get<std::vector<double>>();
        require(sc.size() == 2, "/params/scales", "two scales required");
        guarded("/params/scales", [&] { channels::ProjectorSpec{channels::Space::l2, sc, false}.validate(); });
        require(gamma_of(sc) <= p.at("gamma_max").get<double>(), "/params/scales", "gamma exceeds gamma_max");
    } else if (k == "resonance") {
        const auto spans = p.at("spans").get<std::vector<double>>();
        require(!spans.empty(), "/params/spans", "at least one span required");
        for (std::size_t i = 0; i < spans.size(); ++i)
            require(spans[i] > 1.0, "/params/spans/" + std::to_string(i), "spans must exceed 1");
        require(p.at("horizon").get<double>() > 0.0, "/params/horizon", "horizon must be positive");
    } else if (k == "ode-integrate") {
        const auto s = build_ode_state(p);
        const auto o = build_ode_options(p, c.seed, s.lambda[0]);
        require(s.gamma() <= o.eps0, "/params/lambda", "initial gamma exceeds eps0");
    } else if (k == "ode-scan") {
        const auto L = p.at("L_values").get<std::vector<double>>();
        require(!L.empty(), "/params/L_values", "at least one L value required");
        for (std::size_t i = 0; i < L.size(); ++i)
            require(L[i] > 0.0, "/params/L_values/" + std::to_string(i), "L values must be positive");
        const auto signs = p.at("signs").get<std::vector<int>>();
        require(signs.size() >= 2, "/params/signs", "at least two bubbles required");
        for (int s : signs) require(s == 1 || s == -1, "/params/signs", "signs must be +1 or -1");
        const double e = p.at("eps0").get<double>();
        require(e > 0.0 && e < 1.0, "/params/eps0", "eps0 must lie in (0, 1)");
        require(p.at("family").get<int>() >= 1, "/params/family", "family must be nonempty");
    } else if (k == "appendix-b") {
        build_estimates(p);
    }
}

// ---- per-kind execution ---------------------------------------------------

using Files = std::map<std::string, std::string>;

std::string csv_of(const std::function<void(std::ostream&)>& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

json run_constants(const ScenarioConfig& c, Files& files) {
    const auto t = compute_constants(c.params.at("panels_per_decade").get<int>(),
                                     c.params.at("kappa0_tolerance").get<double>());
    json j = t.to_json();
    j.erase("seconds");
    files["constants.json"] = j.dump(2) + "\n";
    std::ostringstream os;
    os << "name,value\n";
    for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{{"c_W", t.c_w},
                                                                            {"norm_lambda_w_sq", t.norm_lambda_w_sq},
                                                                            {"kappa0", t.kappa0},
                                                                            {"kappa1", t.kappa1},
                                                                            {"kappa2", t.kappa2},
                                                                            {"energy_W", t.energy_w}})
        os << name << ',' << io::format_double(v) << '\n';
    files["constants.csv"] = os.str();
    return {{"c_W", t.c_w}, {"kappa0", t.kappa0}, {"kappa1", t.kappa1}, {"kappa2", t.kappa2},
            {"norm_lambda_w_sq", t.norm_lambda_w_sq}, {"kappa0_converged", t.kappa0_converged}};
}

json run_w_minus(const ScenarioConfig& c, Files& files) {
    const json& p = c.params;
    const GridPtr grid = build_grid(p.at("grid"), "/params/grid");
    WMinusOptions o;
    o.r_start = p.at("r_start").get<double>();
    o.tolerance = p.at("tolerance").get<double>();
    o.max_iterations = p.at("max_iterations").get<int>();
    o.max_doublings = p.at("max_doublings").get<int>();
    o.blowup_threshold = p.at("blowup_threshold").get<double>();
    o.initial_step = p.at("initial_step").get<double>();
    const WMinusResult r = build_w_minus(grid, o);
    const json j{{"picard_radius", r.picard_radius},
                 {"iterations", r.iterations},
                 {"last_difference", r.last_difference},
                 {"r_minus", r.r_minus},
                 {"r_minus_half_step", r.r_minus_half_step},
                 {"r_minus_relative_change", std::abs(r.r_minus - r.r_minus_half_step) / r.r_minus},
                 {"ell10_sup", r.ell10_sup},
                 {"ell10_derivative_sup", r.ell10_derivative_sup},
                 {"ode_residual", r.ode_residual},
                 {"eqz_residual", r.eqz_residual},
                 {"z_prime_at_zero", r.z_prime_at_zero}};
    files["w_minus.json"] = j.dump(2) + "\n";
    files["profile.csv"] = csv_of([&](std::ostream& os) { r.profile.write_csv(os); });
    return j;
}

json run_evolve(const ScenarioConfig& c, Files& files, const std::filesystem::path& dir) {
    const EvolveSetup s = build_evolve(c.params, c.seed);
    const Trajectory traj = evolve(s.initial, s.spec);
    const double norm0 = std::sqrt(energy_norm_sq(s.initial));
    double drift = 0.0;
    std::ostringstream os;
    os << "t,energy,norm_drift\n";
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const double d = energy_distance(traj.snapshots[k].state, s.initial) / norm0;
        drift = std::max(drift, d);
        os << io::format_double(traj.snapshots[k].t) << ',' << io::format_double(traj.energy[k].second) << ','
           << io::format_double(d) << '\n';
    }
    files["energy.csv"] = os.str();
    json j{{"steps", traj.steps},
           {"dt", traj.dt},
           {"snapshots", traj.snapshots.size()},
           {"max_energy_drift", traj.max_energy_drift()},
           {"max_norm_drift", drift},
           {"blowup", traj.blowup ? traj.blowup->to_json() : json(nullptr)}};
    if (c.params.at("write_trajectory").get<bool>()) j["trajectory_hash"] = traj.write(dir / "trajectory");
    return j;
}

json run_two_bubble(const ScenarioConfig& c, Files& files) {
    TwoBubbleOptions o = build_two_bubble(c.params, c.seed);
    o.parallel = c.params.at("parallel").get<bool>();
    const TwoBubbleReport r = two_bubble_experiment(o);
    const json j = r.to_json();
    files["two_bubble.json"] = j.dump(2) + "\n";
    files["two_bubble.csv"] = csv_of([&](std::ostream& os) { r.write_csv(os); });
    files["channel.csv"] = csv_of([&](std::ostream& os) { r.channel.write_csv(os); });
    return {{"fit_lost", r.fit_lost},
            {"samples", r.samples.size()},
            {"C_alpha_beta", r.c_alpha_beta},
            {"C_lambda", r.c_lambda},
            {"gamma_increasing", r.gamma_increasing}};
}

json run_free(const ScenarioConfig& c, Files& files) {
    const auto b = channels::free_channel_battery(build_battery(c.params, c));
    files["free_channel.json"] = b.to_json().dump(2) + "\n";
    std::ostringstream os;
    os << "index,c1,lhs,rhs,ratio,uncertainty,valid,degenerate\n";
    for (std::size_t i = 0; i < b.results.size(); ++i) {
        const auto& r = b.results[i];
        os << i << ',' << io::format_double(r.c1) << ',' << io::format_double(r.lhs) << ',' << io::format_double(r.rhs)
           << ',' << (r.degenerate ? std::string("") : io::format_double(r.ratio)) << ','
           << io::format_double(r.uncertainty) << ',' << r.valid << ',' << r.degenerate << '\n';
    }
    files["free_channel.csv"] = os.str();
    bool valid = true;
    for (const auto& r : b.results) valid = valid && r.valid;
    return {{"max_ratio", b.max_ratio}, {"bound", channels::kFreeChannelConstant}, {"all_valid", valid}};
}

json run_soliton(const ScenarioConfig& c, Files& files, const std::vector<double>& scales) {
    const auto b = channels::soliton_battery(scales, build_battery(c.params, c));
    files["soliton_channel.json"] = b.to_json().dump(2) + "\n";
    files["soliton_channel.csv"] = csv_of([&](std::ostream& os) { b.write_csv(os); });
    return {{"C_hat", b.c_hat}, {"span_lhs_max", b.span_lhs_max}, {"scales", scales}};
}

json run_resonance(const ScenarioConfig& c, Files& files) {
    const auto t = channels::resonance_demo(c.params.at("spans").get<std::vector<double>>(),
                                            c.params.at("horizon").get<double>());
    files["resonance.json"] = t.to_json().dump(2) + "\n";
    files["resonance.csv"] = csv_of([&](std::ostream& os) { t.write_csv(os); });
    return {{"decreasing", t.decreasing}, {"control_variation", t.control_variation}};
}

json run_ode(const ScenarioConfig& c, Files& files) {
    const ode::OdeState s = build_ode_state(c.params);
    const auto o = build_ode_options(c.params, c.seed, s.lambda[0]);
    const auto traj = ode::integrate(s, o);
    json j{{"trajectory", traj.summary()}, {"options", o.to_json()}};
    if (traj.states.size() >= 10)
        j["sd_properties"] = ode::verify_sd_properties(traj, c.params.at("c_values").get<std::vector<double>>()).to_json();
    files["ode.json"] = j.dump(2) + "\n";
    files["trajectory.csv"] = csv_of([&](std::ostream& os) { traj.write_csv(os); });
    return {{"exit_cause", ode::to_string(traj.cause)}, {"exit_time", traj.exit_time}, {"samples", traj.states.size()}};
}

json run_scan(const ScenarioConfig& c, Files& files) {
    ode::ScanOptions o;
    o.family = c.params.at("family").get<int>();
    o.workers = c.workers;
    const auto t = ode::exit_time_scan(c.params.at("L_values").get<std::vector<double>>(),
                                       c.params.at("signs").get<std::vector<int>>(), c.params.at("eps0").get<double>(), o);
    files["scan.json"] = t.to_json().dump(2) + "\n";
    files["scan.csv"] = csv_of([&](std::ostream& os) { t.write_csv(os); });
    return t.to_json();
}

json run_appendix_b(const ScenarioConfig& c, Files& files) {
    const auto which = build_estimates(c.params);
    std::vector<EstimateScan> scans(which.size());
    io::parallel_for(which.size(), c.workers, [&](std::size_t i) {
        scans[i] = scan_appendix_b(which[i], c.params.at("points_per_decade").get<int>(),
                                   c.params.at("nodes_per_decade").get<double>());
    });
    json all = json::array(), spreads = json::object();
    std::ostringstream os;
    os << "estimate,lambda,mu,R,R_prime,measured,bound,ratio\n";
    for (const auto& s : scans) {
        all.push_back(s.to_json());
        spreads[to_string(s.which)] = s.spread();
        for (const auto& x : s.samples)
            os << to_string(x.which) << ',' << io::format_double(x.params.lambda) << ','
               << io::format_double(x.params.mu) << ',' << io::format_double(x.params.R) << ','
               << io::format_double(x.params.R_prime) << ',' << io::format_double(x.measured) << ','
               << io::format_double(x.bound) << ',' << io::format_double(x.ratio) << '\n';
    }
    files["appendix_b.json"] = all.dump(2) + "\n";
    files["appendix_b.csv"] = os.str();
    return {{"spread", spreads}};
}

void write_summary(std::ostream& os, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            write_summary(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
    } else {
        os << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

} // namespace

nlohmann::json default_params(const std::string& kind) {
    kind_info(kind);
    if (kind == "constants") return {{"panels_per_decade", 24}, {"kappa0_tolerance", 1e-6}};
    if (kind == "w-minus")
        return {{"grid", graded_grid(1e-2, 64, 1e4)}, {"r_start", 8.0},          {"tolerance", 1e-12},
                {"max_iterations", 200},               {"max_doublings", 6},     {"blowup_threshold", 1e8},
                {"initial_step", 1e-3}};
    if (kind == "evolve")
        return {{"grid", graded_grid(1e-3, 128, 1e3)},
                {"data", {{"profile", "multisoliton"}, {"scales", {1.0}}, {"signs", {1}}, {"amplitude", 1.0}, {"bumps", 3}}},
                {"spec", {{"nonlinearity", "quadratic"},
                          {"potential", nullptr},
                          {"t_end", 5.0},
                          {"cfl", 0.25},
                          {"dt", 0.0},
                          {"record_stride", 0},
                          {"support_radius", 0.0},
                          {"blowup_factor", 1e6},
                          {"parallel", true}}},
                {"write_trajectory", false}};
    if (kind == "two-bubble")
        return {{"config", {{"scales", {1.0, 0.01}}, {"signs", {1, 1}}}},
                {"perturbation", 0.0},
                {"window", 0.0},
                {"core_radius", 0.0},
                {"nodes_per_decade", 64.0},
                {"r_max", 0.0},
                {"cfl", 0.25},
                {"fits", 40},
                {"parallel", true}};
    if (kind == "channels-free") return {{"samples", 20}, {"horizon", 8.0}};
    if (kind == "channels-soliton") return {{"samples", 20}, {"horizon", 12.0}};
    if (kind == "channels-multi") return {{"samples", 10}, {"horizon", 6.0}, {"scales", {1.0, 0.05}}, {"gamma_max", 0.1}};
    if (kind == "resonance") return {{"spans", {10.0, 30.0, 100.0}}, {"horizon", 8.0}};
    if (kind == "ode-integrate")
        return {{"lambda", {1.0, 0.01}},
                {"beta", {0.0, 0.0}},
                {"signs", {1, 1}},
                {"eps0", 0.1},
                {"horizon", 0.0},
                {"tolerance", 1e-10},
                {"perturbation", {{"enabled", false}, {"c_lambda", 1.0}, {"c_beta", 1.0}}},
                {"c_values", {0.5, 0.75, 1.0}}};
    if (kind == "ode-scan") return {{"L_values", {1e-6, 1e-5, 1e-4, 1e-3}}, {"signs", {1, 1}}, {"eps0", 0.1}, {"family", 12}};
    std::vector<std::string> names;
    for (auto e : all_estimates()) names.push_back(to_string(e));
    return {{"estimates", names}, {"points_per_decade", 2}, {"nodes_per_decade", 96.0}};
}

json ScenarioConfig::to_json() const {
    json j{{"kind", kind}, {"seed", seed}, {"workers", workers}, {"params", params}};
    j["output"] = output.empty() ? json(nullptr) : json(output);
    return j;
}

ScenarioConfig parse_config(const json& doc) {
    require(doc.is_object(), "", "config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        static const std::vector<std::string> top{"kind", "seed", "workers", "output", "params"};
        require(std::find(top.begin(), top.end(), it.key()) != top.end(), "/" + it.key(), "unknown key");
    }
    require(doc.contains("kind") && doc.at("kind").is_string(), "/kind", "string field 'kind' is required");
    ScenarioConfig c;
    c.kind = doc.at("kind").get<std::string>();
    kind_info(c.kind);
    if (doc.contains("seed")) {
        require(doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() >= 0, "/seed",
                "expected a nonnegative integer");
        c.seed = doc.at("seed").get<unsigned long>();
    }
    if (doc.contains("workers")) {
        require(doc.at("workers").is_number_integer() && doc.at("workers").get<int>() >= 1, "/workers",
                "expected a positive integer");
        c.workers = doc.at("workers").get<int>();
    }
    if (doc.contains("output") && !doc.at("output").is_null()) {
        require(doc.at("output").is_string(), "/output", "expected a string");
        c.output = doc.at("output").get<std::string>();
    }
    c.params = overlay(default_params(c.kind), doc.value("params", json::object()), "/params");
    validate_params(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("", "cannot read config file " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("parse error: ") + e.what());
    }
    return parse_config(doc);
}

std::filesystem::path output_root() {
    const char* env = std::getenv("SOLLAB_OUTPUT_ROOT");
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

std::filesystem::path output_dir(const ScenarioConfig& c) {
    if (!c.output.empty()) return c.output;
    return output_root() / (c.kind + "-seed" + std::to_string(c.seed));
}

RunResult run(const ScenarioConfig& c, const std::filesystem::path& dir) {
    RunResult res;
    res.directory = dir;
    std::filesystem::create_directories(dir);
    const auto start = std::chrono::steady_clock::now();
    Files files;
    try {
        const std::string& k = c.kind;
        if (k == "constants") res.summary = run_constants(c, files);
        else if (k == "w-minus") res.summary = run_w_minus(c, files);
        else if (k == "evolve") res.summary = run_evolve(c, files, dir);
        else if (k == "two-bubble") res.summary = run_two_bubble(c, files);
        else if (k == "channels-free") res.summary = run_free(c, files);
        else if (k == "channels-soliton") res.summary = run_soliton(c, files, {1.0});
        else if (k == "channels-multi") res.summary = run_soliton(c, files, c.params.at("scales").get<std::vector<double>>());
        else if (k == "resonance") res.summary = run_resonance(c, files);
        else if (k == "ode-integrate") res.summary = run_ode(c, files);
        else if (k == "ode-scan") res.summary = run_scan(c, files);
        else res.summary = run_appendix_b(c, files);
    } catch (const std::exception& e) {
        res.status = 1;
        res.error = e.what();
        files.clear();
        files["error.json"] = json{{"error", {{"kind", c.kind}, {"message", e.what()}}}}.dump(2) + "\n";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json listing = json::array();
    for (const auto& [name, content] : files) {
        io::write_file(dir / name, content);
        listing.push_back({{"file", name}, {"sha1", io::sha1_hex(content)}});
    }
    std::ostringstream summary;
    summary << "kind: " << c.kind << "\nstatus: " << (res.status == 0 ? "ok" : "error") << '\n';
    if (res.status == 0) write_summary(summary, res.summary, "");
    else summary << "error: " << res.error << '\n';
    io::write_file(dir / "summary.txt", summary.str());

    json constants = nullptr;
    if (res.status == 0) {
        const auto& t = default_constants();
        constants = {{"kappa0", t.kappa0}, {"kappa1", t.kappa1}, {"kappa2", t.kappa2},
                     {"panels_per_decade", t.panels_per_decade}, {"kappa0_spread", t.kappa0_spread}};
    }
    const json manifest{{"schema_version", io::kSchemaVersion},
                        {"software_version", io::software_version()},
                        {"kind", c.kind},
                        {"config", c.to_json()},
                        {"status", res.status == 0 ? "ok" : "error"},
                        {"constants", constants},
                        {"timings", {{"seconds", seconds}}},
                        {"files", listing},
                        {"summary", res.summary}};
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return res;
}

} // namespace sollab::scenario
