#include <cmath>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "sollab/kernels.hpp"
#include "sollab/profiles.hpp"
#include "sollab/quadrature.hpp"
#include "sollab/wave_solver.hpp"

using namespace sollab;
using doctest::Approx;

namespace {

constexpr double kPi3 = 31.006276680299820175;

std::vector<double> random_smooth(const RadialGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double c[3], w[3], a[3];
    for (int k = 0; k < 3; ++k) {
        c[k] = 0.5 + 3 * u(rng);
        w[k] = 0.4 + 0.6 * u(rng);
        a[k] = 0.3 * (2 * u(rng) - 1);
    }
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            const double x = (g.r(i) - c[k]) / w[k];
            out[i] += a[k] * std::exp(-x * x);
        }
    return out;
}

StatePair bumps(const GridPtr& g, unsigned seed) {
    return {RadialField(g, random_smooth(*g, seed), Regularity::smooth),
            RadialField(g, random_smooth(*g, seed + 1000), Regularity::smooth)};
}

} // namespace

TEST_CASE("conservative Laplacian") {
    auto g = make_graded(1e-2, 64, 50.0);
    const kernels::LaplacianStencil st(*g, 3);
    kernels::WaveRhs op{&st, kernels::Source::none, {}};
    const std::size_t n = g->size();
    std::vector<double> u(n, 1.0), v(n, 0.0), du(n), dv(n);
    kernels::rhs_serial(op, u, v, du, dv);
    for (std::size_t i = 0; i < st.active; ++i) CHECK(std::abs(dv[i]) < 1e-6);
    for (std::size_t i = 0; i < n; ++i) u[i] = g->r(i) * g->r(i);
    kernels::rhs_serial(op, u, v, du, dv);
    // Laplacian r^2 = 12 in six dimensions
    for (std::size_t i = 0; i < st.active; ++i) CHECK(dv[i] == Approx(12.0).epsilon(1e-4));
    for (std::size_t i = st.active; i < n; ++i) CHECK(dv[i] == 0.0);
}

TEST_CASE("serial and OpenMP kernels agree bitwise") {
    auto g = make_graded(1e-3, 64, 100.0);
    const kernels::LaplacianStencil st(*g, 3);
    const auto pot = potential_values(
        [] {
            EvolutionSpec s;
            s.nonlinearity = Nonlinearity::linearized;
            s.potential = SolitonConfig::same_sign({1.0});
            return s;
        }(),
        *g);
    const std::size_t n = g->size();
    for (auto src : {kernels::Source::quadratic, kernels::Source::signed_quadratic, kernels::Source::none}) {
        kernels::WaveRhs op{&st, src, src == kernels::Source::none ? std::span<const double>(pot) : std::span<const double>()};
        const auto u = random_smooth(*g, 3), v = random_smooth(*g, 4);
        std::vector<double> a(n), b(n), c(n), d(n);
        kernels::rhs_serial(op, u, v, a, b);
        kernels::rhs_parallel(op, u, v, c, d);
        CHECK(a == c);
        CHECK(b == d);
        std::vector<double> y1(n), y2(n);
        kernels::axpy_serial(u, 0.37, v, y1);
        kernels::axpy_parallel(u, 0.37, v, y2);
        CHECK(y1 == y2);
        std::vector<double> x1 = u, x2 = u;
        kernels::rk4_combine_serial(x1, 0.01, u, v, a, b);
        kernels::rk4_combine_parallel(x2, 0.01, u, v, a, b);
        CHECK(x1 == x2);
    }
}

TEST_CASE("evolution spec validation") {
    auto g = make_graded(1e-2, 32, 100.0);
    EvolutionSpec s;
    CHECK_NOTHROW(s.validate(*g));
    s.cfl = 0.9;
    CHECK_THROWS_AS(s.validate(*g), std::invalid_argument);
    s = {};
    s.nonlinearity = Nonlinearity::linearized;
    CHECK_THROWS_AS(s.validate(*g), std::invalid_argument);
    s = {};
    s.potential = SolitonConfig::same_sign({1.0});
    CHECK_THROWS_AS(s.validate(*g), std::invalid_argument);
    s = {};
    s.t_end = 200.0;
    CHECK_THROWS_AS(s.validate(*g), std::invalid_argument);
    s = {};
    s.nonlinearity = Nonlinearity::signed_quadratic;
    s.t_end = 2.5;
    const auto back = EvolutionSpec::from_json(s.to_json());
    CHECK(back.nonlinearity == s.nonlinearity);
    CHECK(back.t_end == s.t_end);
    CHECK(nonlinearity_from_string("free") == Nonlinearity::free);
    CHECK_THROWS(nonlinearity_from_string("cubic"));
}

TEST_CASE("energy functional") {
    auto g = make_graded(1e-3, 64, 1e3);
    const StatePair w(profile::ground_state_field(g), RadialField::zero(g));
    CHECK(energy(w, Nonlinearity::quadratic) == Approx(192.0 / 5.0 * kPi3).epsilon(1e-6));
    const StatePair z(RadialField::zero(g), RadialField::zero(g));
    CHECK(energy(z, Nonlinearity::quadratic) == 0.0);
    CHECK(exterior_energy(w, 0.0) * kPi3 == Approx(energy_norm_sq(w)).epsilon(1e-10));
    for (double R : {1.0, 50.0}) {
        const double exact = quad::integrate_to_infinity(
            [](double r) { return std::pow(profile::ground_state_dr(r), 2) * std::pow(r, 5); }, R, -5.0);
        CHECK(exterior_energy(w, R) == Approx(exact).epsilon(1e-5));
    }
    auto h = make_uniform(0.05, 20.0);
    const StatePair c(RadialField::sample(h, [](double r) { return std::exp(-10 * (r - 2) * (r - 2)); }), RadialField::zero(h));
    CHECK(exterior_energy(c, 10.0) < 1e-30);
}

TEST_CASE("energy conservation on random data") {
    auto g = make_uniform(0.025, 20.0);
    for (unsigned seed : {1u, 2u}) {
        const auto s = bumps(g, seed);
        for (auto nl : {Nonlinearity::free, Nonlinearity::quadratic}) {
            EvolutionSpec sp;
            sp.nonlinearity = nl;
            sp.t_end = 5.0;
            sp.support_radius = 8.0;
            const auto tr = evolve(s, sp);
            CHECK_FALSE(tr.blowup);
            CHECK(tr.max_energy_drift() < 1e-6);
        }
    }
}

TEST_CASE("serial and parallel evolutions coincide") {
    auto g = make_uniform(0.05, 20.0);
    const auto s = bumps(g, 9);
    EvolutionSpec sp;
    sp.t_end = 2.0;
    sp.support_radius = 8.0;
    const auto a = evolve(s, sp);
    sp.parallel = false;
    const auto b = evolve(s, sp);
    const auto& ua = a.snapshots.back().state.position.values();
    const auto& ub = b.snapshots.back().state.position.values();
    CHECK(std::equal(ua.begin(), ua.end(), ub.begin()));
}

TEST_CASE("time reversal returns the initial data") {
    auto g = make_uniform(0.05, 20.0);
    const auto s = bumps(g, 5);
    EvolutionSpec sp;
    sp.t_end = 2.0;
    sp.support_radius = 8.0;
    const auto fwd = evolve(s, sp);
    const auto back = evolve(reversed(fwd.snapshots.back().state), sp);
    const auto end = reversed(back.snapshots.back().state);
    CHECK(energy_distance(end, s) < 1e-5 * std::sqrt(energy_norm_sq(s)));
}

TEST_CASE("stationary ground states") {
    auto g = make_graded(1e-3, 32, 1e3);
    EvolutionSpec sp;
    sp.t_end = 1.0;
    SUBCASE("W under the quadratic flow") {
        const StatePair w(profile::ground_state_field(g), RadialField::zero(g).with_tail(-4.0));
        const auto tr = evolve(w, sp);
        for (const auto& snap : tr.snapshots) CHECK(energy_distance(snap.state, w) < 1e-3);
    }
    SUBCASE("-W under the signed flow") {
        sp.nonlinearity = Nonlinearity::signed_quadratic;
        const StatePair w(profile::ground_state_field(g, 1.0, -1.0), RadialField::zero(g).with_tail(-4.0));
        const auto tr = evolve(w, sp);
        for (const auto& snap : tr.snapshots) CHECK(energy_distance(snap.state, w) < 1e-3);
    }
}

TEST_CASE("supercritical multiple of W blows up at a grid-stable time") {
    double t[2];
    int k = 0;
    for (double npd : {32.0, 64.0}) {
        auto g = make_graded(1e-3, npd, 1e3);
        const StatePair s(profile::ground_state_field(g) * 1.2, RadialField::zero(g).with_tail(-4.0));
        EvolutionSpec sp;
        sp.t_end = 20.0;
        const auto tr = evolve(s, sp);
        REQUIRE(tr.blowup);
        t[k++] = tr.blowup->time;
    }
    CHECK(std::abs(t[1] - t[0]) / t[1] < 0.05);
}

TEST_CASE("channel series of a stationary state") {
    auto g = make_graded(1e-2, 32, 1e3);
    const StatePair w(profile::ground_state_field(g), RadialField::zero(g).with_tail(-4.0));
    EvolutionSpec sp;
    sp.t_end = 3.0;
    const auto tr = evolve(w, sp);
    const auto ch = channel_profile(tr, 0.0, 1.0);
    for (const auto& [t, e] : ch.samples) CHECK(e == Approx(exterior_energy(w, 1.0 + t)).epsilon(1e-3));
    for (std::size_t k = 1; k < ch.samples.size(); ++k) CHECK(ch.samples[k].second <= ch.samples[k - 1].second);

    const StatePair z(RadialField::zero(g), RadialField::zero(g));
    const auto zc = channel_profile(evolve(z, sp), 0.0, 0.5);
    for (const auto& [t, e] : zc.samples) CHECK(e == 0.0);
}

TEST_CASE("trajectory files round trip with a content hash") {
    auto g = make_uniform(0.1, 20.0);
    EvolutionSpec sp;
    sp.t_end = 1.0;
    sp.support_radius = 8.0;
    sp.record_stride = 20;
    const auto tr = evolve(bumps(g, 2), sp);
    const auto dir = std::filesystem::temp_directory_path() / "sollab_traj_test";
    std::filesystem::remove_all(dir);
    const auto hash = tr.write(dir);
    CHECK(hash.size() == 40);
    const auto back = Trajectory::read(dir);
    REQUIRE(back.snapshots.size() == tr.snapshots.size());
    CHECK(back.snapshots.back().t == tr.snapshots.back().t);
    const auto a = back.snapshots.back().state.position.values(), b = tr.snapshots.back().state.position.values();
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    CHECK(back.write(dir / "copy") == hash);
    std::filesystem::remove_all(dir);
}
