#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nlpot/error.hpp"
#include "nlpot/measure.hpp"

using namespace nlpot;

namespace {

constexpr double kPi = std::numbers::pi;

/// Random radial measure: 1 to 6 knots with increasing radii and masses, and a
/// constant or power-law tail.
RadialMeasure random_radial(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int count = 1 + static_cast<int>(U(rng) * 6);
    std::vector<Knot> knots;
    double r = 0.2 + U(rng), m = 0.0;
    for (int i = 0; i < count; ++i) {
        m += U(rng) < 0.2 ? 0.0 : U(rng);
        knots.push_back({r, m});
        r += 0.1 + U(rng);
    }
    if (m == 0.0) return RadialMeasure(n, knots, {});
    if (U(rng) < 0.5) return RadialMeasure(n, knots, {{m, 0.0, 0.0}});
    return RadialMeasure::with_power_tail(n, knots, U(rng) * (n - 1.0), 0.0);
}

} // namespace

TEST_CASE("ball mass of the Lebesgue unit ball") {
    const Measure ball = RadialMeasure::lebesgue_ball(3, 1.0);
    CHECK(ball_mass(ball, 1.0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(ball_mass(ball, 0.5) == doctest::Approx(4.0 * kPi / 3.0 * 0.125).epsilon(1e-14));
    CHECK(ball_mass(ball, 5.0) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    CHECK(ball_mass(Measure(RadialMeasure::zero(3)), 2.0) == 0.0);

    // direct cell count of the indicator on a fine grid
    const GridGeometry g(3, 1.0, 0.025);
    const Measure grid = GridMeasure::sample(g, [](std::span<const double> x) {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 1.0 ? 1.0 : 0.0;
    });
    CHECK(std::abs(ball_mass(grid, 0.5) / (4.0 * kPi / 3.0 * 0.125) - 1.0) < 0.01);
    CHECK_THROWS_AS(ball_mass(grid, 1.5), DomainError);
    CHECK_THROWS_AS(ball_mass(ball, 0.0), DomainError);
}

TEST_CASE("ball mass is nondecreasing in the radius") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 3;
        const auto m = random_radial(rng, n);
        double prev = 0.0, r = 1e-3;
        while (r < 50.0) {
            const double v = m.cumulative(r);
            CHECK(v >= prev);
            CHECK(m.derivative(r) >= 0.0);
            prev = v;
            r *= 1.0 + 0.3 * U(rng);
        }
        // continuity across every knot
        for (const auto& k : m.knots()) {
            CHECK(m.cumulative(k.radius) == doctest::Approx(k.mass).epsilon(1e-12));
            CHECK(std::abs(m.cumulative(k.radius * (1.0 + 1e-12)) - k.mass) <= 1e-9 * (1.0 + k.mass));
        }
    }
}

TEST_CASE("restriction to a ball") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = random_radial(rng, 3);
        const double R = 0.1 + 5.0 * U(rng);
        const auto mr = restrict_to_ball(m, R);
        CHECK(mr.has_finite_total_mass());
        for (double r : {0.05, 0.5, 1.0, 2.0, 4.0, 8.0, 100.0}) {
            const double expect = m.cumulative(std::min(r, R));
            // a curved tail between the last knot and R is resampled at 32 points per decade
            const double tol = r > m.last_radius() && r < R ? 1e-3 : 1e-12;
            CHECK(std::abs(mr.cumulative(r) - expect) <= tol * (1.0 + expect));
        }
    }
    const auto ball = RadialMeasure::lebesgue_ball(3, 1.0);
    const auto half = restrict_to_ball(ball, 0.5);
    CHECK(half.cumulative(0.5) == doctest::Approx(0.5235987755982988).epsilon(1e-12));
    CHECK(half.cumulative(3.0) == doctest::Approx(0.5235987755982988).epsilon(1e-12));
    CHECK(restrict_to_ball(RadialMeasure::zero(3), 2.0).is_zero());
    const auto same = restrict_to_ball(ball, kUnboundedRadius);
    CHECK(same.knots().size() == ball.knots().size());
    CHECK(same.cumulative(0.7) == ball.cumulative(0.7));

    const GridGeometry g(2, 1.0, 0.125);
    const auto dens = GridMeasure::sample(g, [](std::span<const double>) { return 1.0; });
    const auto cut = restrict_to_ball(dens, 0.5);
    CHECK(ball_mass(Measure(cut), 1.0) == doctest::Approx(ball_mass(Measure(dens), 0.5)).epsilon(1e-14));
}

TEST_CASE("scaling multiplies every ball mass") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = random_radial(rng, 3);
        const double lambda = std::exp(6.0 * U(rng) - 3.0);
        const auto s = scale(m, lambda);
        for (double r : {0.01, 0.3, 1.0, 3.0, 30.0})
            CHECK(std::abs(s.cumulative(r) - lambda * m.cumulative(r)) <= 4e-16 * lambda * m.cumulative(r));
    }
    const auto ball = RadialMeasure::lebesgue_ball(3, 1.0);
    CHECK(scale(ball, 1.0).cumulative(0.4) == ball.cumulative(0.4));
    CHECK(scale(RadialMeasure::zero(3), 7.0).is_zero());
    CHECK_THROWS_AS(scale(ball, 0.0), DomainError);
    CHECK_THROWS_AS(scale(ball, -1.0), DomainError);
}

TEST_CASE("sum of radial measures") {
    const auto a = RadialMeasure::uniform_ball(3, 1.0, 2.0);
    const auto b = RadialMeasure::with_power_tail(3, {{0.5, 0.1}, {2.0, 1.0}}, 0.5, 0.0);
    const auto s = add(a, b);
    for (double r : {0.1, 0.5, 1.0, 1.5, 2.0, 10.0, 1e3})
        CHECK(s.cumulative(r) == doctest::Approx(a.cumulative(r) + b.cumulative(r)).epsilon(1e-12));
    // the head of a between b's first knot and r = 1 is resampled
    for (double r : {0.6, 0.75, 0.9})
        CHECK(s.cumulative(r) == doctest::Approx(a.cumulative(r) + b.cumulative(r)).epsilon(1e-2));
    CHECK_FALSE(s.has_finite_total_mass());
    CHECK_THROWS_AS(add(a, RadialMeasure::zero(2)), DomainError);
}

TEST_CASE("measure invariants are enforced") {
    CHECK_THROWS_AS(RadialMeasure(3, {{1.0, 2.0}, {2.0, 1.0}}, {{1.0, 0.0, 0.0}}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(3, {{1.0, -1.0}}, {}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(3, {{2.0, 1.0}, {1.0, 2.0}}, {{2.0, 0.0, 0.0}}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(3, {{1.0, 1.0}}, {{1.5, 0.0, 0.0}}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(3, {{1.0, 1.0}}, {{1.0, -0.5, 0.0}}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(1, {{1.0, 1.0}}, {{1.0, 0.0, 0.0}}), InvariantError);
    CHECK_THROWS_AS(RadialMeasure(3, {}, {}), InvariantError);
    CHECK_NOTHROW(RadialMeasure(3, {{1.0, 4.18879}}, {{4.18879, 0.0, 0.0}}));

    const GridGeometry g(2, 1.0, 0.5);
    std::vector<double> dens(g.size(), 1.0);
    dens[3] = -1e-3;
    CHECK_THROWS_AS(GridMeasure(g, dens), InvariantError);
    CHECK_THROWS_AS(GridMeasure(g, std::vector<double>(g.size() - 1, 1.0)), InvariantError);
    CHECK(GridMeasure::zero(g).total_mass() == 0.0);
}
