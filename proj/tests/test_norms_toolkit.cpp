#include <cmath>

#include <doctest.h>

#include "sollab/field.hpp"
#include "sollab/norms.hpp"
#include "sollab/profiles.hpp"
#include "sollab/toolkit.hpp"

using namespace sollab;
using doctest::Approx;

TEST_CASE("L2_R norm of r^-4") {
    auto g = make_graded(1e-2, 64, 1e4);
    for (double R : {0.5, 1.0, 10.0}) {
        const auto f = RadialField::sample_exterior(g, R, [](double r) { return std::pow(r, -4); }, -4.0);
        CHECK(norm::l2(f, R) == Approx(1.0 / (R * std::sqrt(2.0))).epsilon(1e-8));
    }
}

TEST_CASE("norms of zero vanish") {
    auto g = make_graded(1e-2, 32, 10.0);
    const auto z = RadialField::zero(g);
    CHECK(norm::l2(z) == 0.0);
    CHECK(norm::h1(z) == 0.0);
    CHECK(norm::lp(z, 3.0) == 0.0);
    CHECK(norm::z_alpha(z, -3.0) == 0.0);
    CHECK(norm::l2_r6(z) == 0.0);
    CHECK(norm::h1_r6(z) == 0.0);
}

TEST_CASE("Z_alpha detects logarithmic growth beyond one power") {
    const double alpha = -3.0;
    auto z_of = [alpha](double r_max, double s) {
        auto g = make_graded(1e-2, 32, r_max);
        const auto f = RadialField::sample(g, [alpha, s](double r) {
            return r < 1.0 ? 0.0 : std::pow(norm::japanese(std::log(r)), s) * std::pow(r, alpha);
        });
        return norm::z_alpha(f, alpha, {1.0, 0.0});
    };
    const double a1 = z_of(1e4, 1.0), b1 = z_of(1e8, 1.0);
    const double a2 = z_of(1e4, 2.0), b2 = z_of(1e8, 2.0);
    CHECK(b1 / a1 == Approx(1.0).epsilon(0.05));
    CHECK(b2 / a2 > 1.6);
}

TEST_CASE("inner products on R^6 carry the sphere factor") {
    auto g = make_graded(1e-2, 64, 1e3);
    const auto w = profile::ground_state_field(g);
    CHECK(norm::inner_h1_r6(w, w) == Approx(profile::kSphere * norm::h1(w) * norm::h1(w)).epsilon(1e-12));
    CHECK(norm::h1_r6(w) * norm::h1_r6(w) == Approx(norm::inner_h1_r6(w, w)).epsilon(1e-12));
}

TEST_CASE("inward extension") {
    auto g = make_graded(1e-2, 64, 100.0);
    const double R = 2.0;
    SUBCASE("constants are preserved") {
        const auto f = RadialField::sample_exterior(g, R, [](double) { return 3.0; });
        const auto e = extend_inward(f);
        CHECK(e.smooth());
        for (double r : {0.1, 1.0, 1.9}) CHECK(e.at(r) == Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("value and slope continue across R") {
        const auto f = RadialField::sample_exterior(g, R, [](double r) { return std::exp(-r); }, std::nullopt);
        const auto e = extend_inward(f);
        const double R0 = f.r_start(), h = 1e-3;
        CHECK(e.at(R0 - h) == Approx(std::exp(-R0) * (1 + h)).epsilon(1e-5));
    }
    SUBCASE("extension of W outside r = 1 stays comparable in L2") {
        const auto w = RadialField::sample_exterior(g, 1.0, profile::ground_state, -4.0);
        const double ratio = norm::l2(extend_inward(w)) / norm::l2(w, 1.0);
        CHECK(ratio >= 1.0);
        CHECK(ratio < 10.0);
    }
    SUBCASE("rejects R beyond half the grid") {
        const auto f = RadialField::sample_exterior(g, 60.0, [](double) { return 1.0; });
        CHECK_THROWS(extend_inward(f));
    }
}

TEST_CASE("field arithmetic and serialization") {
    auto g = make_graded(1e-2, 32, 50.0);
    const auto a = RadialField::sample(g, [](double r) { return std::exp(-r); });
    const auto b = RadialField::sample(g, [](double r) { return r * std::exp(-r); });
    const auto c = 2.0 * a - b;
    for (std::size_t i = 0; i < g->size(); i += 11) CHECK(c.node(i) == Approx(2 * a.node(i) - b.node(i)));
    const auto back = RadialField::from_envelope(c.envelope());
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(back.node(i) == c.node(i));
    CHECK(back.grid() == c.grid());
    const auto ext = a.restricted(1.0);
    CHECK_FALSE(ext.smooth());
    CHECK(ext.r_start() >= 1.0);
    CHECK(ext.node(ext.first()) == a.node(ext.first()));
}
