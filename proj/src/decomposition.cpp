#include "sollab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"

namespace sollab {

using namespace profile;

namespace {

// Dense solve by full-pivot LU; returns false if numerically singular.
bool solve_dense(const std::vector<std::vector<double>>& a, const std::vector<double>& b, std::vector<double>& x) {
    const Eigen::Index n = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = a[r][c];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) return false;
    const Eigen::VectorXd sol = lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
    x.assign(sol.data(), sol.data() + n);
    return true;
}

// pi^3 int g r^5 dr over the whole grid for node data g ~ r^q.
double r6_integral(const RadialGrid& grid, const std::vector<double>& g, std::optional<double> q) {
    return kSphere * norm::radial_integral(grid, g, 0, 0.0, q);
}

double lambda_w_h1_norm() {
    static const double n = std::sqrt(kSphere * quad::integrate_to_infinity(
                                                    [](double r) { return lambda_w(r) * phi(r) * std::pow(r, 5); },
                                                    0.0, -7.0));
    return n;
}

std::vector<double> sample_multisoliton(const SolitonConfig& c, const RadialGrid& grid) {
    std::vector<double> m(grid.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = multisoliton_value(c, grid.r(i));
    return m;
}

struct Orthogonality {
    std::vector<double> f;               // F_j
    std::vector<std::vector<double>> jac; // dF_j / d log lambda_k
};

Orthogonality orthogonality(const RadialField& u0, const SolitonConfig& c, bool with_jacobian) {
    const RadialGrid& grid = u0.grid();
    const std::size_t n = grid.size(), J = c.size();
    const auto m = sample_multisoliton(c, grid);
    std::vector<double> h(n), g(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = u0.node(i) - m[i];
    std::optional<double> qh;
    if (u0.tail_exponent()) qh = std::max(*u0.tail_exponent(), -4.0);
    Orthogonality o;
    o.f.resize(J);
    if (with_jacobian) o.jac.assign(J, std::vector<double>(J, 0.0));
    for (std::size_t j = 0; j < J; ++j) {
        const double lj = c.scales[j];
        for (std::size_t i = 0; i < n; ++i) g[i] = h[i] * phi_scaled(grid.r(i), lj);
        std::optional<double> q;
        if (qh) q = *qh - 8.0;
        o.f[j] = r6_integral(grid, g, q);
        if (!with_jacobian) continue;
        for (std::size_t k = 0; k < J; ++k) {
            const double lk = c.scales[k];
            // d/dlog(lk) of -iota_k W_(lk) is iota_k (LambdaW)_(lk).
            for (std::size_t i = 0; i < n; ++i)
                g[i] = c.signs[k] * lambda_w_h1(grid.r(i), lk) * phi_scaled(grid.r(i), lj);
            double d = r6_integral(grid, g, -12.0);
            if (k == j) {
                // d/dlog(l) of l^-4 phi(r/l) is -l^-4 (4 phi + rho phi')(rho), rho = r/l.
                for (std::size_t i = 0; i < n; ++i) {
                    const double l4 = lj * lj * lj * lj;
                    g[i] = -h[i] * lambda4_phi(grid.r(i) / lj) / l4;
                }
                d += r6_integral(grid, g, q);
            }
            o.jac[j][k] = d;
        }
    }
    return o;
}

double scaled_norm(const std::vector<double>& f, double scale) {
    double s = 0.0;
    for (double v : f) s = std::max(s, std::abs(v));
    return s / scale;
}

// Nelder-Mead minimisation; returns best point, updates evaluation count.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int max_evals, double ftol, int& evals, double& fbest) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> s(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]), ++evals;
    int local = static_cast<int>(n + 1);
    while (local < max_evals) {
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : order) s2.push_back(s[i]), f2.push_back(fv[i]);
        s = std::move(s2);
        fv = std::move(f2);
        if (std::abs(fv[n] - fv[0]) <= ftol * (std::abs(fv[0]) + 1e-300)) {
            double size = 0.0;
            for (std::size_t i = 1; i <= n; ++i)
                for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(s[i][k] - s[0][k]));
            if (size < 1e-10) break;
        }
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) c[k] += s[i][k] / static_cast<double>(n);
        const auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = c[k] + t * (s[n][k] - c[k]);
            return p;
        };
        const auto xr = along(-1.0);
        const double fr = f(xr);
        ++local;
        if (fr < fv[0]) {
            const auto xe = along(-2.0);
            const double fe = f(xe);
            ++local;
            if (fe < fr) s[n] = xe, fv[n] = fe;
            else s[n] = xr, fv[n] = fr;
        } else if (fr < fv[n - 1]) {
            s[n] = xr, fv[n] = fr;
        } else {
            const auto xc = fr < fv[n] ? along(-0.5) : along(0.5);
            const double fc = f(xc);
            ++local;
            if (fc < std::min(fr, fv[n])) {
                s[n] = xc, fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k) s[i][k] = s[0][k] + 0.5 * (s[i][k] - s[0][k]);
                    fv[i] = f(s[i]);
                    ++local;
                }
            }
        }
    }
    evals += local;
    const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    fbest = fv[static_cast<std::size_t>(best)];
    return s[static_cast<std::size_t>(best)];
}

} // namespace

void SolitonConfig::validate(bool require_positive_signs) const {
    if (scales.empty()) throw std::invalid_argument("soliton config: J must be >= 1");
    if (signs.size() != scales.size()) throw std::invalid_argument("soliton config: signs and scales differ in length");
    for (std::size_t j = 0; j < scales.size(); ++j) {
        if (!(scales[j] > 0.0) || !std::isfinite(scales[j]))
            throw std::invalid_argument("soliton config: scales must be positive and finite");
        if (signs[j] != 1 && signs[j] != -1) throw std::invalid_argument("soliton config: signs must be +1 or -1");
        if (require_positive_signs && signs[j] != 1)
            throw std::invalid_argument("soliton config: quadratic nonlinearity requires all signs +1");
        if (j > 0 && !(scales[j] < scales[j - 1]))
            throw std::invalid_argument("soliton config: scales must be strictly decreasing (lambda_J < ... < lambda_1)");
    }
}

double gamma_of(const std::vector<double>& scales) {
    double g = 0.0;
    for (std::size_t j = 0; j + 1 < scales.size(); ++j) g = std::max(g, scales[j + 1] / scales[j]);
    return g;
}

double SolitonConfig::gamma() const { return gamma_of(scales); }

nlohmann::json SolitonConfig::to_json() const { return {{"signs", signs}, {"scales", scales}}; }

SolitonConfig SolitonConfig::from_json(const nlohmann::json& j) {
    SolitonConfig c;
    c.scales = j.at("scales").get<std::vector<double>>();
    if (j.contains("signs")) c.signs = j.at("signs").get<std::vector<int>>();
    else c.signs.assign(c.scales.size(), 1);
    return c;
}

SolitonConfig SolitonConfig::same_sign(std::vector<double> scales) {
    SolitonConfig c;
    c.signs.assign(scales.size(), 1);
    c.scales = std::move(scales);
    return c;
}

double multisoliton_value(const SolitonConfig& c, double r) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c.signs[j] * w_h1(r, c.scales[j]);
    return s;
}

RadialField multisoliton(const SolitonConfig& c, GridPtr grid) {
    c.validate();
    auto m = sample_multisoliton(c, *grid);
    return RadialField(std::move(grid), std::move(m), Regularity::smooth, 0, -4.0);
}

std::vector<std::string> resolution_warnings(const SolitonConfig& c, const RadialGrid& grid) {
    std::vector<std::string> w;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double l = c.scales[j];
        std::ostringstream os;
        if (l < 10.0 * grid.min_spacing()) os << "bubble " << j + 1 << " (lambda=" << l << ") below grid resolution";
        else if (l > grid.r_max() / 100.0) os << "bubble " << j + 1 << " (lambda=" << l << ") not contained in grid";
        if (!os.str().empty()) w.push_back(os.str());
    }
    return w;
}

nlohmann::json ModulationFit::to_json() const {
    return {{"config", config.to_json()},
            {"alpha", alpha},
            {"beta", beta},
            {"delta", delta},
            {"gamma", gamma},
            {"iterations", iterations},
            {"residual", residual},
            {"orthogonality", orthogonality},
            {"velocity_orthogonality", velocity_orthogonality},
            {"h", "h.csv"},
            {"g1", "g1.csv"}};
}

void ModulationFit::write_trace_csv(std::ostream& os) const {
    os << "iteration,residual";
    for (std::size_t j = 0; j < config.size(); ++j) os << ",lambda" << j + 1;
    os << '\n';
    os.precision(17);
    for (std::size_t it = 0; it < trace.size(); ++it) {
        os << it;
        for (double v : trace[it]) os << ',' << v;
        os << '\n';
    }
}

ModulationFit fit_modulation(const StatePair& state, const SolitonConfig& guess, const FitOptions& opt) {
    guess.validate();
    if (!state.position.smooth()) throw std::invalid_argument("fit: position must be defined down to r = 0");
    const std::size_t J = guess.size();
    const RadialGrid& grid = state.grid();
    SolitonConfig c = guess;
    const double scale = lambda_w_h1_norm() * std::max(norm::h1_r6(state.position), 1e-300);

    std::vector<std::vector<double>> trace;
    auto o = orthogonality(state.position, c, true);
    double res = scaled_norm(o.f, scale);
    int it = 0;
    const auto record = [&] {
        std::vector<double> row{res};
        row.insert(row.end(), c.scales.begin(), c.scales.end());
        trace.push_back(std::move(row));
    };
    record();
    while (res > opt.tolerance) {
        if (it >= opt.max_iterations) throw FitError("fit: Newton iteration did not converge", res);
        ++it;
        std::vector<double> step;
        std::vector<double> rhs(J);
        for (std::size_t j = 0; j < J; ++j) rhs[j] = -o.f[j];
        if (!solve_dense(o.jac, rhs, step)) throw FitError("fit: singular Jacobian (degenerate scales)", res);
        double damp = 1.0;
        for (double s : step) damp = std::min(damp, 0.5 / std::max(std::abs(s), 1e-300));
        bool accepted = false;
        for (int ls = 0; ls < 30 && !accepted; ++ls, damp /= 2) {
            SolitonConfig trial = c;
            for (std::size_t j = 0; j < J; ++j) trial.scales[j] = c.scales[j] * std::exp(damp * step[j]);
            bool ordered = true;
            for (std::size_t j = 0; j + 1 < J; ++j) ordered = ordered && trial.scales[j + 1] < trial.scales[j];
            if (!ordered) continue;
            const auto ot = orthogonality(state.position, trial, false);
            const double rt = scaled_norm(ot.f, scale);
            if (rt < res || (rt <= 1e-2 * opt.tolerance)) {
                c = trial;
                accepted = true;
            }
        }
        if (!accepted) {
            if (res < 1e3 * opt.tolerance) break; // roundoff floor
            throw FitError("fit: line search failed", res);
        }
        if (J > 1 && c.gamma() > opt.collision_ratio)
            throw FitError("fit: adjacent scales collide (ratio above collision threshold)", res);
        o = orthogonality(state.position, c, true);
        res = scaled_norm(o.f, scale);
        record();
    }

    ModulationFit fit{.config = c, .h = state.position, .g1 = state.velocity};
    fit.iterations = it;
    fit.residual = res;
    fit.orthogonality = o.f;
    fit.trace = std::move(trace);
    fit.gamma = c.gamma();

    const std::size_t n = grid.size();
    const auto m = sample_multisoliton(c, grid);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = state.position.node(i) - m[i];
    std::optional<double> qh;
    if (state.position.tail_exponent()) qh = std::max(*state.position.tail_exponent(), -4.0);
    fit.h = RadialField(state.position.grid_ptr(), std::move(h), Regularity::smooth, 0, qh);

    std::vector<RadialField> dirs;
    for (double l : c.scales) dirs.push_back(lambda_w_l2_field(state.position.grid_ptr(), l));
    std::vector<std::vector<double>> gram(J, std::vector<double>(J));
    std::vector<double> b(J);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < J; ++k) gram[j][k] = norm::inner_l2_r6(dirs[j], dirs[k]);
        b[j] = norm::inner_l2_r6(state.velocity, dirs[j]);
    }
    if (!solve_dense(gram, b, fit.alpha)) throw FitError("fit: singular Gram matrix", res);
    fit.beta.resize(J);
    for (std::size_t j = 0; j < J; ++j) fit.beta[j] = -b[j];
    RadialField g1 = state.velocity;
    for (std::size_t j = 0; j < J; ++j) g1 = g1 - dirs[j] * fit.alpha[j];
    fit.g1 = g1.with_tail(state.velocity.tail_exponent());
    for (std::size_t j = 0; j < J; ++j) fit.velocity_orthogonality.push_back(norm::inner_l2_r6(fit.g1, dirs[j]));

    const double hh = norm::h1_r6(fit.h), vv = norm::l2_r6(state.velocity);
    fit.delta = std::sqrt(hh * hh + vv * vv);
    return fit;
}

double energy_distance(const StatePair& state, const SolitonConfig& c) {
    const RadialGrid& grid = state.grid();
    const auto m = sample_multisoliton(c, grid);
    std::vector<double> h(grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = state.position.node(i) - m[i];
    std::optional<double> q;
    if (state.position.tail_exponent()) q = std::max(*state.position.tail_exponent(), -4.0);
    else q = -4.0;
    const RadialField hf(state.position.grid_ptr(), std::move(h), Regularity::smooth, 0, q);
    const double a = norm::h1_r6(hf), b = norm::l2_r6(state.velocity);
    return std::sqrt(a * a + b * b);
}

nlohmann::json DistanceResult::to_json() const {
    return {{"value", value}, {"scales", scales}, {"starts", starts}, {"evaluations", evaluations}};
}

DistanceResult distance_dj(const StatePair& state, const std::vector<int>& signs) {
    const std::size_t J = signs.size();
    if (J == 0) throw std::invalid_argument("distance: J must be >= 1");
    const RadialGrid& grid = state.grid();
    const double lmin = 20.0 * grid.min_spacing(), lmax = grid.r_max() / 50.0;

    const auto scales_of = [&](const std::vector<double>& x) {
        std::vector<double> l(J);
        l[0] = std::exp(x[0]);
        for (std::size_t j = 1; j < J; ++j) l[j] = l[j - 1] * std::exp(-std::exp(x[j]));
        return l;
    };
    const auto to_x = [&](const std::vector<double>& l) {
        std::vector<double> x(J);
        x[0] = std::log(l[0]);
        for (std::size_t j = 1; j < J; ++j) x[j] = std::log(-std::log(l[j] / l[j - 1]));
        return x;
    };
    DistanceResult best;
    best.value = std::numeric_limits<double>::infinity();
    const auto objective = [&](const std::vector<double>& x) {
        const auto l = scales_of(x);
        for (double v : l)
            if (!(v >= lmin && v <= lmax)) return 1e30;
        SolitonConfig c{signs, l};
        return energy_distance(state, c) + gamma_of(l);
    };

    // Seeds from peaks of the dyadic-shell Dirichlet energy; a bubble W_(l)
    // puts its shell-energy peak near r = 5.8 l.
    const auto du = state.position.derivative();
    std::vector<double> g(du.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = du.values()[k] * du.values()[k] * std::pow(du.radius(k), 5);
    std::vector<std::pair<double, double>> shells; // (radius, energy)
    for (double R = std::max(grid.r(1), lmin); 2.0 * R <= grid.r_max() / 2.0; R *= 2.0)
        shells.emplace_back(1.5 * R, quad::integrate(grid, g, 0, R, 2.0 * R));
    std::vector<std::pair<double, double>> peaks;
    for (std::size_t k = 0; k < shells.size(); ++k) {
        const bool left = k == 0 || shells[k].second >= shells[k - 1].second;
        const bool right = k + 1 == shells.size() || shells[k].second >= shells[k + 1].second;
        if (left && right && shells[k].second > 0.0) peaks.push_back(shells[k]);
    }
    std::sort(peaks.begin(), peaks.end(), [](auto a, auto b) { return a.second > b.second; });
    if (peaks.size() > J + 2) peaks.resize(J + 2);

    std::vector<std::vector<double>> seeds;
    const auto clamp_seed = [&](std::vector<double> l) {
        std::sort(l.begin(), l.end(), std::greater<>());
        for (std::size_t j = 0; j < J; ++j) {
            l[j] = std::clamp(l[j], lmin * 1.01, lmax / 1.01);
            if (j > 0 && l[j] >= l[j - 1] * 0.99) l[j] = l[j - 1] * 0.5;
        }
        return l;
    };
    if (peaks.size() >= J) {
        // all J-subsets of the retained peaks (at most C(J+2, J))
        std::vector<int> pick(peaks.size(), 0);
        std::fill(pick.begin(), pick.begin() + static_cast<long>(J), 1);
        std::sort(pick.begin(), pick.end(), std::greater<>());
        do {
            std::vector<double> l;
            for (std::size_t k = 0; k < peaks.size(); ++k)
                if (pick[k]) l.push_back(peaks[k].first / 5.8);
            seeds.push_back(clamp_seed(l));
        } while (std::prev_permutation(pick.begin(), pick.end()));
    } else {
        std::vector<double> l;
        double top = peaks.empty() ? std::sqrt(lmin * lmax) : peaks.front().first / 5.8;
        for (std::size_t j = 0; j < J; ++j) l.push_back(top * std::pow(0.05, static_cast<double>(j)));
        seeds.push_back(clamp_seed(l));
    }
    try {
        SolitonConfig guess{signs, seeds.front()};
        const auto fit = fit_modulation(state, guess);
        seeds.push_back(clamp_seed(fit.config.scales));
    } catch (const std::exception&) {
        // the modulated fit is an optional extra start
    }

    for (const auto& s : seeds) {
        double f = 0.0;
        const auto x = nelder_mead(objective, to_x(s), 0.3, 3000, 1e-12, best.evaluations, f);
        ++best.starts;
        if (f < best.value) {
            best.value = f;
            best.scales = scales_of(x);
        }
    }
    return best;
}

double project_c1(const RadialField& f, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("c1: R must be positive");
    std::vector<double> g(f.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = f.values()[k] * f.radius(k);
    std::optional<double> q;
    if (f.tail_exponent()) {
        q = *f.tail_exponent() + 1.0;
        if (!(*q < -1.0)) throw std::domain_error("c1: non-integrable tail");
    }
    return 2.0 * R * R * quad::integrate(f.grid(), g, f.first(), R, quad::kInfinity, q);
}

nlohmann::json EllEstimate::to_json() const {
    return {{"ell", ell},
            {"slope", slope},
            {"residual", residual},
            {"fitted_exponent", std::isfinite(fitted_exponent) ? nlohmann::json(fitted_exponent) : nlohmann::json(nullptr)},
            {"clean", clean},
            {"window", {r_lo, r_hi}}};
}

EllEstimate estimate_ell(const RadialField& f, double threshold) {
    EllEstimate e;
    e.r_lo = f.grid().r_max() / 20.0;
    e.r_hi = f.grid().r_max() / 2.0;
    if (e.r_lo < f.r_start()) throw std::domain_error("ell: field does not cover the fit window");
    constexpr int kPoints = 17;
    std::vector<double> R(kPoints), c(kPoints);
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int k = 0; k < kPoints; ++k) {
        R[k] = e.r_lo * std::pow(e.r_hi / e.r_lo, static_cast<double>(k) / (kPoints - 1));
        c[k] = project_c1(f, R[k]);
        const double x = 1.0 / R[k];
        s1 += 1;
        sx += x;
        sxx += x * x;
        sy += c[k];
        sxy += x * c[k];
    }
    const double det = s1 * sxx - sx * sx;
    e.ell = (sxx * sy - sx * sxy) / det;
    e.slope = (s1 * sxy - sx * sy) / det;
    double ss = 0.0;
    for (int k = 0; k < kPoints; ++k) {
        const double d = c[k] - e.ell - e.slope / R[k];
        ss += d * d;
    }
    e.residual = std::sqrt(ss / kPoints);
    e.clean = e.residual <= threshold * std::max(1.0, std::abs(e.ell));
    const double lo = std::abs(c.front() - e.ell), hi = std::abs(c.back() - e.ell);
    e.fitted_exponent = (lo > 1e-12 * std::max(1.0, std::abs(e.ell)) && hi > 0.0)
                            ? std::log(lo / hi) / std::log(R.back() / R.front())
                            : std::numeric_limits<double>::quiet_NaN();
    return e;
}

nlohmann::json LowerBoundReport::to_json() const {
    return {{"lambda1", lambda1}, {"delta", delta}, {"ell", ell}, {"C0", c0}, {"margin", margin},
            {"satisfied", satisfied}, {"hypothesis_violation", hypothesis_violation}};
}

LowerBoundReport check_lower_bound_lambda1(const ModulationFit& fit, double ell, double c0) {
    LowerBoundReport r;
    r.lambda1 = fit.config.scales.front();
    r.delta = fit.delta;
    r.ell = ell;
    r.c0 = c0;
    r.margin = r.lambda1 * c0 * std::sqrt(r.delta) - std::abs(ell);
    r.satisfied = r.margin >= 0.0;
    r.hypothesis_violation = r.delta == 0.0 && ell != 0.0;
    return r;
}

} // namespace sollab
