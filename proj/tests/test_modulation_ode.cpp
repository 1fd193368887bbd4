#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "sollab/modulation_ode.hpp"

using namespace sollab::ode;
using doctest::Approx;

namespace {

OdeState two_bubble(double l1, double gamma) { return {{l1, gamma * l1}, {0.0, 0.0}, {1, 1}, 0.0}; }

} // namespace

TEST_CASE("theta weights") {
    CHECK(theta_weights({1}) == std::vector<double>{1.0});
    CHECK(theta_weights({1, 1}) == std::vector<double>{1.0, 2.0});
    CHECK(theta_weights({1, -1}) == std::vector<double>{1.0, 0.5});
    CHECK(theta_weights({1, 1, -1}) == std::vector<double>{1.0, 2.0, 1.0});
    CHECK(theta_coefficients({1, 1, -1}) == std::vector<double>{0.0, 1.0, 0.5});
}

TEST_CASE("theta identity holds for every sign vector up to length 8") {
    for (int J = 1; J <= 8; ++J)
        for (int mask = 0; mask < (1 << J); ++mask) {
            std::vector<int> s(J);
            for (int j = 0; j < J; ++j) s[j] = (mask >> j) & 1 ? -1 : 1;
            const auto th = theta_weights(s);
            const auto c = theta_coefficients(s);
            CHECK(th[0] == 1.0);
            for (int j = 1; j < J; ++j) {
                CHECK((c[j] == 0.5 || c[j] == 1.0));
                CHECK(s[j] * s[j - 1] * (th[j] - th[j - 1]) == c[j] * th[j - 1]);
            }
        }
}

TEST_CASE("right-hand side examples") {
    const OdeConstants k = OdeConstants::defaults();
    const double g0 = 0.01;
    const auto d = ode_rhs(two_bubble(1.0, g0), k);
    CHECK(d.dbeta[0] == Approx(-k.kappa0 * g0 * g0).epsilon(1e-14));
    CHECK(d.dbeta[1] == Approx(k.kappa0 * g0).epsilon(1e-14));
    CHECK(d.dlambda[0] == 0.0);
    const OdeState one{{2.0}, {0.7}, {1}, 0.0};
    const auto d1 = ode_rhs(one, k);
    CHECK(d1.dbeta[0] == 0.0);
    CHECK(d1.dlambda[0] == Approx(k.kappa2 * 0.7));
}

TEST_CASE("Lyapunov pair") {
    const OdeState s{{1.0, 0.1}, {0.3, -0.2}, {1, 1}, 0.0};
    const auto l = lyapunov(s);
    CHECK(l.A == Approx(0.26).epsilon(1e-15));
    CHECK(l.V == Approx(1.02).epsilon(1e-15));
    CHECK(lyapunov(two_bubble(1.0, 0.1)).A == 0.0);
}

TEST_CASE("Step-1 identity at random states") {
    const OdeConstants k = OdeConstants::defaults();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int J = 1 + trial % 5;
        OdeState s;
        double l = 1.0;
        for (int j = 0; j < J; ++j) {
            s.lambda.push_back(l);
            l *= 0.01 + 0.2 * u(rng);
            s.beta.push_back((2 * u(rng) - 1) * 1e3);
            s.signs.push_back(u(rng) < 0.5 ? 1 : -1);
        }
        const double lhs = a_prime(s, ode_rhs(s, k)), rhs = step1_identity(s, k);
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
        CHECK(rhs >= 0.0);
    }
}

TEST_CASE("same-sign pair exits through gamma") {
    IntegrateOptions opt;
    const auto tr = integrate(two_bubble(1.0, 0.01), opt);
    CHECK(tr.cause == ExitCause::gamma_exceeds_eps0);
    CHECK(tr.exit_time == Approx(2.67413130675672).epsilon(1e-8));
    CHECK(tr.gamma.back() == Approx(0.1).epsilon(1e-9));
    for (std::size_t i = 1; i < tr.lyap.size(); ++i) CHECK(tr.lyap[i].A >= tr.lyap[i - 1].A);
    CHECK(tr.a_prime.front() > 0.0);
    CHECK(tr.a_prime.front() == Approx(tr.identity.front()).epsilon(1e-14));
}

TEST_CASE("single bubble runs to the horizon") {
    IntegrateOptions opt;
    opt.horizon = 10.0;
    const auto tr = integrate({{1.0}, {0.0}, {1}, 0.0}, opt);
    CHECK(tr.cause == ExitCause::horizon);
    CHECK(tr.exit_time == Approx(10.0));
}

TEST_CASE("flow is scale covariant") {
    IntegrateOptions opt;
    const double base = integrate(two_bubble(1.0, 0.01), opt).exit_time;
    for (double mu : {0.1, 10.0, 1000.0}) {
        const auto tr = integrate(two_bubble(mu, 0.01), opt);
        CHECK(tr.exit_time / mu == Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("Lyapunov margins along the two-bubble flow") {
    const auto tr = integrate(two_bubble(1.0, 0.02), {});
    const auto rep = verify_sd_properties(tr, {0.5, 1.0});
    CHECK(rep.identity_residual < 1e-8);
    CHECK(rep.c_margins[0] >= -1e-12);
    CHECK(rep.a_margin > 0.0);
    CHECK(rep.sd21_margin >= -1e-12);
    CHECK(rep.c0 >= 0.5);
}

TEST_CASE("A stays monotone under injected slack") {
    IntegrateOptions opt;
    opt.perturbation = Perturbation{0.5, 0.5, 17, 1.0};
    const auto tr = integrate(two_bubble(1.0, 0.02), opt);
    for (std::size_t i = 1; i < tr.lyap.size(); ++i) CHECK(tr.lyap[i].A >= tr.lyap[i - 1].A - 1e-12);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(integrate({{0.01, 1.0}, {0.0, 0.0}, {1, 1}, 0.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(integrate({{1.0, 0.1}, {0.0}, {1, 1}, 0.0}, {}), std::invalid_argument);
}

TEST_CASE("exit-time scan") {
    ScanOptions so;
    so.family = 6;
    const auto a = exit_time_scan({1e-5, 1e-4}, {1, 1}, 0.1, so);
    const auto b = exit_time_scan({1e-5, 1e-4}, {1, 1}, 0.2, so);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(std::isfinite(a.rows[i].t_star));
        CHECK(b.rows[i].t_star >= a.rows[i].t_star);
    }
    std::ostringstream os;
    a.write_csv(os);
    CHECK(os.str().rfind("L,t_star,family_size", 0) == 0);
}

TEST_CASE("small battery") {
    BatteryOptions bo;
    bo.trajectories = 6;
    bo.max_bubbles = 3;
    const auto b = ode_battery(bo);
    CHECK(b.entries.size() == 6);
    CHECK(b.half_monotone);
    CHECK(b.same_sign_exit);
    CHECK(b.identity_residual < 1e-8);
}
