#include "sollab/modulation_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "sollab/constants.hpp"
#include "sollab/io.hpp"

namespace sollab::ode {

OdeConstants OdeConstants::defaults() {
    const auto& c = default_constants();
    return {c.kappa0, c.kappa2};
}

double OdeState::gamma() const {
    double g = 0.0;
    for (std::size_t j = 1; j < lambda.size(); ++j) g = std::max(g, lambda[j] / lambda[j - 1]);
    return g;
}

bool OdeState::ordered() const {
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        if (!(lambda[j] > 0.0)) return false;
        if (j > 0 && !(lambda[j] < lambda[j - 1])) return false;
    }
    return true;
}

void OdeState::validate() const {
    if (lambda.empty()) throw std::invalid_argument("ode state: at least one bubble required");
    if (beta.size() != lambda.size() || signs.size() != lambda.size())
        throw std::invalid_argument("ode state: lambda, beta and signs must have equal length");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("ode state: signs must be +1 or -1");
    if (!ordered()) throw std::invalid_argument("ode state: lambda must be positive and strictly decreasing");
}

nlohmann::json OdeState::to_json() const {
    return {{"t", t}, {"lambda", lambda}, {"beta", beta}, {"signs", signs}, {"gamma", gamma()}};
}

std::vector<double> theta_weights(const std::vector<int>& signs) {
    if (signs.empty()) throw std::invalid_argument("theta: signs must be nonempty");
    std::vector<double> th(signs.size());
    th[0] = 1.0;
    for (std::size_t j = 1; j < signs.size(); ++j)
        th[j] = signs[j] * signs[j - 1] == 1 ? 2.0 * th[j - 1] : 0.5 * th[j - 1];
    return th;
}

std::vector<double> theta_coefficients(const std::vector<int>& signs) {
    const auto th = theta_weights(signs);
    std::vector<double> c(signs.size(), 0.0);
    for (std::size_t j = 1; j < signs.size(); ++j)
        c[j] = signs[j] * signs[j - 1] * (th[j] - th[j - 1]) / th[j - 1];
    return c;
}

namespace {

double bracket(const OdeState& s, std::size_t j) {
    double b = 0.0;
    if (j > 0) b += s.signs[j] * s.signs[j - 1] * std::pow(s.lambda[j] / s.lambda[j - 1], 2);
    if (j + 1 < s.size()) b -= s.signs[j] * s.signs[j + 1] * std::pow(s.lambda[j + 1] / s.lambda[j], 2);
    return b;
}

struct Slack {
    std::vector<double> wl, pl, wb, pb;
    double c_lambda = 0.0, c_beta = 0.0, tau = 1.0;
};

Slack make_slack(const Perturbation& p, std::size_t n) {
    Slack s;
    s.c_lambda = p.c_lambda;
    s.c_beta = p.c_beta;
    s.tau = p.time_scale;
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> w(0.5, 2.0), ph(0.0, 2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < n; ++j) {
        s.wl.push_back(w(rng));
        s.pl.push_back(ph(rng));
        s.wb.push_back(w(rng));
        s.pb.push_back(ph(rng));
    }
    return s;
}

Derivative rhs_with(const OdeState& s, const OdeConstants& k, const Slack* slack) {
    Derivative d;
    d.dlambda.resize(s.size());
    d.dbeta.resize(s.size());
    const double g = s.gamma();
    for (std::size_t j = 0; j < s.size(); ++j) {
        d.dlambda[j] = k.kappa2 * s.beta[j];
        double lb = k.kappa0 * bracket(s, j);
        if (slack) {
            d.dlambda[j] += slack->c_lambda * g * g * std::sin(slack->wl[j] * s.t / slack->tau + slack->pl[j]);
            lb += slack->c_beta * g * g * g * std::sin(slack->wb[j] * s.t / slack->tau + slack->pb[j]);
        }
        d.dbeta[j] = lb / s.lambda[j];
    }
    return d;
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 6> kC{1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[6][6] = {{1.0 / 5},
                             {3.0 / 40, 9.0 / 40},
                             {44.0 / 45, -56.0 / 15, 32.0 / 9},
                             {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
                             {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
                             {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepResult {
    OdeState next;
    std::vector<double> err; // per component, lambda then beta
};

std::vector<double> pack(const Derivative& d) {
    std::vector<double> v = d.dlambda;
    v.insert(v.end(), d.dbeta.begin(), d.dbeta.end());
    return v;
}

OdeState shifted(const OdeState& s, double t, const std::vector<double>& dy) {
    OdeState o = s;
    o.t = t;
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
        o.lambda[j] += dy[j];
        o.beta[j] += dy[n + j];
    }
    return o;
}

StepResult dopri_step(const OdeState& s, double h, const OdeConstants& k, const Slack* slack) {
    const std::size_t m = 2 * s.size();
    std::array<std::vector<double>, 7> K;
    K[0] = pack(rhs_with(s, k, slack));
    for (int i = 0; i < 6; ++i) {
        std::vector<double> dy(m, 0.0);
        for (int l = 0; l <= i; ++l)
            for (std::size_t c = 0; c < m; ++c) dy[c] += h * kA[i][l] * K[l][c];
        K[i + 1] = pack(rhs_with(shifted(s, s.t + kC[i] * h, dy), k, slack));
    }
    std::vector<double> dy(m, 0.0), err(m, 0.0);
    for (int l = 0; l < 7; ++l)
        for (std::size_t c = 0; c < m; ++c) {
            dy[c] += h * kB5[l] * K[l][c];
            err[c] += h * (kB5[l] - kB4[l]) * K[l][c];
        }
    return {shifted(s, s.t + h, dy), err};
}

bool violated(const OdeState& s, double eps0) { return !s.ordered() || s.gamma() > eps0; }

} // namespace

Derivative ode_rhs(const OdeState& s, const OdeConstants& k) { return rhs_with(s, k, nullptr); }

Lyapunov lyapunov(const OdeState& s) {
    const auto th = theta_weights(s.signs);
    Lyapunov l;
    for (std::size_t j = 0; j < s.size(); ++j) {
        l.A += th[j] * s.lambda[j] * s.beta[j];
        l.V += th[j] * s.lambda[j] * s.lambda[j];
    }
    return l;
}

double a_prime(const OdeState& s, const Derivative& d) {
    const auto th = theta_weights(s.signs);
    double a = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) a += th[j] * (d.dlambda[j] * s.beta[j] + s.lambda[j] * d.dbeta[j]);
    return a;
}

double step1_identity(const OdeState& s, const OdeConstants& k) {
    const auto th = theta_weights(s.signs);
    const auto c = theta_coefficients(s.signs);
    double v = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        v += k.kappa2 * th[j] * s.beta[j] * s.beta[j];
        if (j > 0) v += k.kappa0 * c[j] * th[j - 1] * std::pow(s.lambda[j] / s.lambda[j - 1], 2);
    }
    return v;
}

std::string to_string(ExitCause c) {
    switch (c) {
    case ExitCause::gamma_exceeds_eps0: return "gamma-exceeds-eps0";
    case ExitCause::ordering_violated: return "ordering-violated";
    case ExitCause::horizon: return "horizon";
    }
    return "unknown";
}

nlohmann::json IntegrateOptions::to_json() const {
    nlohmann::json j{{"eps0", eps0}, {"horizon", horizon}, {"tolerance", tolerance}, {"max_steps", max_steps}};
    if (perturbation)
        j["perturbation"] = {{"c_lambda", perturbation->c_lambda},
                             {"c_beta", perturbation->c_beta},
                             {"seed", perturbation->seed},
                             {"time_scale", perturbation->time_scale}};
    else
        j["perturbation"] = nullptr;
    return j;
}

nlohmann::json OdeTrajectory::summary() const {
    return {{"exit_cause", to_string(cause)},
            {"exit_time", exit_time},
            {"samples", states.size()},
            {"rejected_steps", rejected},
            {"initial", states.front().to_json()},
            {"final", states.back().to_json()}};
}

void OdeTrajectory::write_csv(std::ostream& os) const {
    const std::size_t n = states.front().size();
    os << 't';
    for (std::size_t j = 1; j <= n; ++j) os << ",lambda" << j;
    for (std::size_t j = 1; j <= n; ++j) os << ",beta" << j;
    os << ",A,V,gamma\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
        os << io::format_double(states[i].t);
        for (double v : states[i].lambda) os << ',' << io::format_double(v);
        for (double v : states[i].beta) os << ',' << io::format_double(v);
        os << ',' << io::format_double(lyap[i].A) << ',' << io::format_double(lyap[i].V) << ','
           << io::format_double(gamma[i]) << '\n';
    }
}

OdeTrajectory integrate(const OdeState& initial, const IntegrateOptions& opt, const OdeConstants& k) {
    initial.validate();
    if (!(opt.eps0 > 0.0 && opt.eps0 < 1.0)) throw std::invalid_argument("integrate: eps0 must lie in (0, 1)");
    if (initial.gamma() > opt.eps0) throw std::invalid_argument("integrate: initial gamma exceeds eps0");
    if (!(opt.tolerance > 0.0)) throw std::invalid_argument("integrate: tolerance must be positive");
    const double L1 = initial.lambda[0];
    const double horizon = initial.t + (opt.horizon > 0.0 ? opt.horizon : 100.0 * L1);
    std::optional<Slack> slack;
    if (opt.perturbation) slack = make_slack(*opt.perturbation, initial.size());
    const Slack* sp = slack ? &*slack : nullptr;

    OdeTrajectory traj;
    const auto record = [&](const OdeState& s) {
        const Derivative d = rhs_with(s, k, sp);
        traj.states.push_back(s);
        traj.lyap.push_back(lyapunov(s));
        traj.gamma.push_back(s.gamma());
        traj.a_prime.push_back(a_prime(s, d));
        traj.identity.push_back(step1_identity(s, k));
    };
    record(initial);

    const std::size_t n = initial.size();
    const double beta_ref = 1e-3 / k.kappa2;
    const double lambda_floor = 1e-3 * initial.lambda.back();
    const auto error_norm = [&](const OdeState& a, const OdeState& b, const std::vector<double>& err, double h) {
        double e = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double sl = std::max({std::abs(a.lambda[j]), std::abs(b.lambda[j]), lambda_floor});
            const double sb = std::max({std::abs(a.beta[j]), std::abs(b.beta[j]), beta_ref});
            // time measured in units of the bubble's own scale
            const double unit = opt.tolerance * h / std::max(std::abs(a.lambda[j]), lambda_floor);
            e = std::max({e, std::abs(err[j]) / (sl * unit), std::abs(err[n + j]) / (sb * unit)});
        }
        return e;
    };

    OdeState s = initial;
    double h = 1e-3 * L1;
    const double h_min = 1e-14 * L1;
    for (long step = 0;; ++step) {
        if (step >= opt.max_steps) throw std::runtime_error("integrate: maximum step count reached");
        if (s.t + h > horizon) h = horizon - s.t;
        StepResult r = dopri_step(s, h, k, sp);
        const bool finite = std::all_of(r.next.lambda.begin(), r.next.lambda.end(), [](double v) { return std::isfinite(v); }) &&
                            std::all_of(r.next.beta.begin(), r.next.beta.end(), [](double v) { return std::isfinite(v); });
        const double e = finite ? error_norm(s, r.next, r.err, h) : std::numeric_limits<double>::infinity();
        if (!(e <= 1.0)) {
            ++traj.rejected;
            h *= finite ? std::clamp(0.9 * std::pow(e, -0.25), 0.1, 0.9) : 0.25;
            if (h < h_min) throw std::runtime_error("integrate: step size underflow at state " + s.to_json().dump());
            continue;
        }
        if (violated(r.next, opt.eps0)) {
            double lo = 0.0, hi = h;
            OdeState hit = r.next;
            for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, s.t + h); ++it) {
                const double mid = 0.5 * (lo + hi);
                const OdeState m = dopri_step(s, mid, k, sp).next;
                if (violated(m, opt.eps0)) {
                    hi = mid;
                    hit = m;
                } else {
                    lo = mid;
                }
            }
            traj.cause = hit.ordered() ? ExitCause::gamma_exceeds_eps0 : ExitCause::ordering_violated;
            traj.exit_time = hit.t;
            record(hit);
            return traj;
        }
        s = r.next;
        record(s);
        if (s.t >= horizon) {
            traj.cause = ExitCause::horizon;
            traj.exit_time = s.t;
            return traj;
        }
        h *= std::clamp(0.9 * std::pow(std::max(e, 1e-10), -0.2), 0.2, 5.0);
    }
}

nlohmann::json SdReport::to_json() const {
    return {{"samples", samples},           {"identity_residual", identity_residual},
            {"sd21_margin", sd21_margin},   {"sd22_margin", sd22_margin},
            {"a_margin", a_margin},         {"c_values", c_values},
            {"c_margins", c_margins},       {"c0", c0},
            {"step4_margin", step4_margin}};
}

SdReport verify_sd_properties(const OdeTrajectory& traj, const std::vector<double>& c_values, const OdeConstants& k) {
    if (traj.states.size() < 10) throw std::invalid_argument("sd properties: trajectory too short (< 10 samples)");
    SdReport rep;
    rep.c_values = c_values;
    rep.c_margins.assign(c_values.size(), std::numeric_limits<double>::infinity());
    rep.sd21_margin = rep.sd22_margin = rep.a_margin = rep.step4_margin = std::numeric_limits<double>::infinity();
    const auto th = theta_weights(traj.states.front().signs);
    const Lyapunov l1 = traj.lyap[1];
    const double rate1 = k.kappa2 * l1.A / std::sqrt(l1.V);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const OdeState& s = traj.states[i];
        if (!s.ordered()) continue;
        ++rep.samples;
        const Derivative d = ode_rhs(s, k);
        const double ap = traj.a_prime[i];
        const double id = traj.identity[i];
        rep.identity_residual = std::max(rep.identity_residual, std::abs(a_prime(s, d) - id) / std::abs(id));
        double sb = 0.0, sl = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            sb += th[j] * s.beta[j] * s.beta[j];
            sl += th[j] * d.dlambda[j] * d.dlambda[j];
        }
        rep.a_margin = std::min(rep.a_margin, ap);
        rep.sd21_margin = std::min(rep.sd21_margin, (ap - k.kappa2 * sb) / std::abs(ap));
        rep.sd22_margin = std::min(rep.sd22_margin, (ap - sl / k.kappa2) / std::abs(ap));
        const Lyapunov& l = traj.lyap[i];
        double vp = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) vp += 2.0 * th[j] * s.lambda[j] * d.dlambda[j];
        for (std::size_t c = 0; c < c_values.size(); ++c) {
            const double num = ap * l.V - c_values[c] * l.A * vp;
            const double den = std::abs(ap * l.V) + std::abs(c_values[c] * l.A * vp);
            rep.c_margins[c] = std::min(rep.c_margins[c], den > 0.0 ? num / den : 0.0);
        }
        if (i >= 2) {
            const double m = vp / (2.0 * std::sqrt(l.V)) - rate1;
            rep.step4_margin = std::min(rep.step4_margin, m / std::max(std::abs(rate1), 1e-300));
        }
    }
    for (std::size_t c = 0; c < c_values.size(); ++c)
        if (rep.c_margins[c] >= -1e-12) rep.c0 = std::max(rep.c0, c_values[c]);
    return rep;
}

nlohmann::json OdeBattery::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : entries)
        rows.push_back({{"initial", e.initial.to_json()}, {"trajectory", e.trajectory.summary()}, {"report", e.report.to_json()}});
    return {{"c0", c0},
            {"half_monotone", half_monotone},
            {"same_sign_exit", same_sign_exit},
            {"identity_residual", identity_residual},
            {"entries", rows}};
}

OdeBattery ode_battery(const BatteryOptions& opt, const OdeConstants& k) {
    if (opt.trajectories < 1 || opt.max_bubbles < 2) throw std::invalid_argument("ode battery: bad sizes");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    OdeBattery out;
    out.entries.resize(static_cast<std::size_t>(opt.trajectories));
    for (int i = 0; i < opt.trajectories; ++i) {
        OdeState s;
        // every third entry is a same-sign two-bubble configuration at rest
        const bool canonical = i % 3 == 0;
        const int J = canonical ? 2 : 2 + static_cast<int>(U(rng) * (opt.max_bubbles - 1));
        const double g0 = std::exp(std::log(1e-3) + (std::log(opt.eps0 / 2.0) - std::log(1e-3)) * U(rng));
        double lam = 1.0, ratio = g0;
        for (int j = 0; j < J; ++j) {
            s.lambda.push_back(lam);
            s.signs.push_back(j == 0 || canonical ? 1 : (U(rng) < 0.5 ? 1 : -1));
            // velocities on the natural scale sqrt(kappa0 kappa2) lambda_j / lambda_{j-1}
            const double b = canonical || i % 3 == 1
                                 ? 0.0
                                 : (2.0 * U(rng) - 1.0) * 0.5 * ratio * std::sqrt(k.kappa0 / k.kappa2);
            s.beta.push_back(b);
            ratio = j == 0 ? g0 : g0 * (0.5 + 0.5 * U(rng));
            lam *= ratio;
        }
        out.entries[static_cast<std::size_t>(i)].initial = s;
    }
    const std::vector<double> cs{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0};
    std::vector<unsigned long> seeds;
    for (int i = 0; i < opt.trajectories; ++i) seeds.push_back(rng());
    io::parallel_for(out.entries.size(), opt.workers, [&](std::size_t i) {
        auto& e = out.entries[i];
        IntegrateOptions io_opt;
        io_opt.eps0 = opt.eps0;
        if (opt.perturbed)
            io_opt.perturbation = Perturbation{opt.perturbation_amplitude, opt.perturbation_amplitude, seeds[i], 1.0};
        e.trajectory = integrate(e.initial, io_opt, k);
        e.report = verify_sd_properties(e.trajectory, cs, k);
    });
    out.c0 = std::numeric_limits<double>::infinity();
    for (const auto& e : out.entries) {
        out.c0 = std::min(out.c0, e.report.c0);
        out.half_monotone = out.half_monotone && e.report.c_margins[1] >= -1e-12;
        if (!opt.perturbed) out.identity_residual = std::max(out.identity_residual, e.report.identity_residual);
        const bool same = std::all_of(e.initial.signs.begin(), e.initial.signs.end(), [](int v) { return v == 1; });
        const bool rest = std::all_of(e.initial.beta.begin(), e.initial.beta.end(), [](double v) { return v == 0.0; });
        if (same && rest && e.initial.size() == 2)
            out.same_sign_exit = out.same_sign_exit && e.trajectory.cause == ExitCause::gamma_exceeds_eps0;
    }
    return out;
}

nlohmann::json ScanTable::to_json() const {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& row : rows)
        r.push_back({{"L", row.L},
                     {"t_star", std::isnan(row.t_star) ? nlohmann::json(nullptr) : nlohmann::json(row.t_star)},
                     {"family_size", row.family_size},
                     {"windows", row.windows}});
    return {{"rows", r}};
}

void ScanTable::write_csv(std::ostream& os) const {
    os << "L,t_star,family_size\n";
    for (const auto& row : rows)
        os << io::format_double(row.L) << ',' << (std::isnan(row.t_star) ? std::string("") : io::format_double(row.t_star))
           << ',' << row.family_size << '\n';
}

ScanTable exit_time_scan(const std::vector<double>& L_values, const std::vector<int>& signs, double eps0,
                         const ScanOptions& opt, const OdeConstants& k) {
    if (signs.size() < 2) throw std::invalid_argument("exit scan: at least two bubbles required");
    for (double L : L_values)
        if (!(L > 0.0)) throw std::invalid_argument("exit scan: L values must be positive");
    if (opt.family < 1) throw std::invalid_argument("exit scan: family must be nonempty");
    std::vector<OdeTrajectory> trajs(static_cast<std::size_t>(opt.family));
    io::parallel_for(trajs.size(), opt.workers, [&](std::size_t i) {
        const double x = opt.family == 1 ? 0.0 : static_cast<double>(i) / (opt.family - 1);
        const double g0 = std::exp(std::log(1e-3) + (std::log(eps0 / 2.0) - std::log(1e-3)) * x);
        OdeState s;
        double lam = opt.lambda1;
        for (std::size_t j = 0; j < signs.size(); ++j) {
            s.lambda.push_back(lam);
            s.beta.push_back(0.0);
            lam *= g0;
        }
        s.signs = signs;
        IntegrateOptions io_opt;
        io_opt.eps0 = eps0;
        trajs[i] = integrate(s, io_opt, k);
    });
    ScanTable table;
    for (double L : L_values) {
        ScanRow row;
        row.L = L;
        row.family_size = opt.family;
        double best = -1.0;
        for (const auto& tr : trajs) {
            const double l10 = tr.states.front().lambda[0];
            const auto g = [&](std::size_t i) {
                const OdeState& s = tr.states[i];
                if (!s.ordered() || s.gamma() > eps0) return -1.0;
                return std::pow(s.lambda[0] / l10, 4) * s.gamma() * s.gamma() / L - 1.0;
            };
            if (g(0) < 0.0) continue;
            double window = tr.states.back().t - tr.states.front().t;
            for (std::size_t i = 1; i < tr.states.size(); ++i) {
                const double gi = g(i);
                if (gi < 0.0) {
                    const double gp = g(i - 1), t0 = tr.states[i - 1].t, t1 = tr.states[i].t;
                    window = t0 + (t1 - t0) * gp / (gp - gi) - tr.states.front().t;
                    break;
                }
            }
            if (window > 0.0) {
                ++row.windows;
                best = std::max(best, window / l10);
            }
        }
        row.t_star = row.windows > 0 ? best : std::numeric_limits<double>::quiet_NaN();
        table.rows.push_back(row);
    }
    return table;
}

} // namespace sollab::ode
