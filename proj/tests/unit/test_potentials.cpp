#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nlpot/potentials.hpp"
#include "oracles.hpp"

using namespace nlpot;

namespace {

std::vector<double> point(int n, double r) {
    std::vector<double> x(n, 0.0);
    x[0] = r;
    return x;
}

double wolff_at(const Measure& m, double p, double r) {
    return wolff_potential(m, p, point(dimension_of(m), r)).value();
}

} // namespace

TEST_CASE("Wolff potential of the unit ball at the origin matches the closed form") {
    const Measure ball = RadialMeasure::lebesgue_ball(3, 1.0);
    CHECK(wolff_at(ball, 2.0, 0.0) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    for (auto [n, p] : std::vector<std::pair<int, double>>{{3, 1.5}, {3, 2.5}, {4, 2.0}, {4, 3.0}, {5, 2.2}}) {
        const Measure m = RadialMeasure::uniform_ball(n, 1.0, 0.7);
        CHECK(wolff_at(m, p, 0.0) == doctest::Approx(oracle::wolff_unit_ball_center(n, p, 0.7)).epsilon(1e-12));
    }
}

TEST_CASE("Riesz potential of the unit ball at the origin") {
    const Measure ball = RadialMeasure::lebesgue_ball(3, 1.0);
    // (4 pi / 3) (int_0^1 dt + int_1^inf t^-3 dt) = 2 pi
    CHECK(riesz_potential(ball, point(3, 0.0)).value() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("zero measure has zero potentials") {
    const Measure z = RadialMeasure::zero(3);
    CHECK(wolff_at(z, 2.0, 0.0) == 0.0);
    CHECK(wolff_at(z, 2.0, 1.5) == 0.0);
    const Measure g = GridMeasure::zero(GridGeometry(2, 1.0, 0.25));
    CHECK(wolff_potential(g, 1.5, std::vector<double>{0.0, 0.0}).value() == 0.0);
}

TEST_CASE("p outside (1, n) is a domain error") {
    const Measure ball = RadialMeasure::lebesgue_ball(3, 1.0);
    CHECK_THROWS_AS(wolff_potential(ball, 3.0, point(3, 0.0)), DomainError);
    CHECK_THROWS_AS(wolff_potential(ball, 1.0, point(3, 0.0)), DomainError);
}

TEST_CASE("off-center ball mass matches the slicing oracle") {
    for (int n : {2, 3, 4, 5}) {
        const auto m = RadialMeasure::lebesgue_ball(n, 1.0);
        for (auto [r, t] : std::vector<std::pair<double, double>>{{0.5, 0.2}, {0.5, 1.0}, {0.5, 1.6}, {1.5, 1.0},
                                                                  {2.0, 2.5}, {0.9, 0.05}}) {
            const double ref = oracle::ball_intersection(n, r, t, 200000);
            CHECK(off_center_ball_mass(m, r, t) == doctest::Approx(ref).epsilon(1e-7));
        }
    }
}

TEST_CASE("off-center Wolff potential matches a lens-volume quadrature") {
    const Measure m = RadialMeasure::lebesgue_ball(3, 1.0);
    const double V = 4.0 * std::numbers::pi / 3.0;
    for (double r : {0.5, 2.0}) {
        auto f = [&](double t) { return oracle::ball_intersection(3, r, t, 200) / t; };
        const double lo = std::abs(r - 1.0), hi = r + 1.0;
        double ref = oracle::log_trapezoid(f, lo, hi, 4000) + V / hi;
        if (r < 1.0) ref += V * lo * lo / 2.0; // B(x, t) inside the ball for t < 1 - r
        CHECK(wolff_at(m, 2.0, r) == doctest::Approx(ref).epsilon(1e-5));
    }
}

TEST_CASE("Wolff profile decays like r^((p-n)/(p-1)) outside the support") {
    const auto m = RadialMeasure::lebesgue_ball(3, 1.0);
    const std::vector<double> mesh{0.0, 2.0, 4.0};
    const auto prof = wolff_radial_profile(m, 2.0, mesh);
    CHECK(prof.values[0] == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(prof.values[2] / prof.values[1] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(prof.tail_exponent == doctest::Approx(-1.0));
}

TEST_CASE("Wolff potential is homogeneous of degree 1/(p-1)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.05, 20.0);
    const auto base = RadialMeasure::from_density(3, [](double r) { return std::exp(-r * r); }, 3.0, 60);
    for (int i = 0; i < 5; ++i) {
        const double l = lam(rng);
        for (double r : {0.0, 0.7, 2.5}) {
            const double w = wolff_at(Measure(base), 2.5, r);
            const double ws = wolff_at(Measure(scale(base, l)), 2.5, r);
            CHECK(ws == doctest::Approx(std::pow(l, 1.0 / 1.5) * w).epsilon(1e-12));
        }
    }
}

TEST_CASE("Wolff potential is monotone in the measure and satisfies the additivity bound") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Knot> k1, k2;
        double m1 = 0.1 + u(rng), m2 = 0.1 + u(rng);
        for (int i = 1; i <= 5; ++i) {
            m1 += u(rng);
            m2 += u(rng);
            k1.push_back({0.4 * i, m1});
            k2.push_back({0.4 * i, m2});
        }
        const RadialMeasure a(3, k1, {{m1, 0.0, 0.0}});
        const RadialMeasure b(3, k2, {{m2, 0.0, 0.0}});
        const auto s = add(a, b);
        for (double r : {0.0, 0.3, 1.1, 3.0}) {
            const double wa = wolff_at(Measure(a), 1.8, r), wb = wolff_at(Measure(b), 1.8, r);
            const double ws = wolff_at(Measure(s), 1.8, r);
            CHECK(ws >= wa);
            CHECK(ws >= wb);
            CHECK(ws <= std::pow(2.0, 1.0 / 0.8) * (wa + wb));
        }
    }
}

TEST_CASE("finiteness classifier on the critical tail family") {
    for (auto [n, p] : std::vector<std::pair<int, double>>{{3, 2.0}, {3, 1.5}, {4, 2.5}}) {
        const double b = n - p;
        const std::vector<double> cs{0.0, p - 1.0, 2.0 * (p - 1.0)};
        const std::vector<bool> expect{false, false, true};
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const double r_last = std::exp(cs[i] / b) * 2.0 + 2.0;
            const auto m = RadialMeasure::with_power_tail(n, {{1.0, 1.0}, {r_last, 2.0 * r_last}}, b, cs[i]);
            const auto rep = check_finiteness(m, p);
            CHECK(rep.finite == expect[i]);
            CHECK(rep.tail_integral.is_finite() == expect[i]);
            CHECK(wolff_potential(m, p, point(n, 0.0)).is_finite() == expect[i]);
        }
    }
    const auto compact = RadialMeasure::lebesgue_ball(3, 1.0);
    CHECK(check_finiteness(compact, 2.0).finite);
}

TEST_CASE("finiteness breakdown adds up") {
    // M(rho) = rho^(1/2) beyond 4: n = 3, p = 2, integrand rho^(-3/2)
    const auto m = RadialMeasure::with_power_tail(3, {{1.0, 1.0}, {4.0, 2.0}}, 0.5, 0.0);
    const auto rep = check_finiteness(m, 2.0);
    REQUIRE(rep.finite);
    const double tail = 1.0 * 2.0 / std::sqrt(4.0);              // int_4^inf rho^(-3/2) drho
    const double core = oracle::log_trapezoid([&](double t) { return m.cumulative(t) / t; }, 1.0, 4.0, 200000);
    CHECK(rep.analytic_tail.value() == doctest::Approx(tail).epsilon(1e-12));
    CHECK(rep.core == doctest::Approx(core).epsilon(1e-8));
    CHECK(rep.tail_integral.value() == doctest::Approx(core + tail).epsilon(1e-8));
}

TEST_CASE("grid Wolff potential of an isolated node is the Dirac formula") {
    const GridGeometry geo(2, 2.0, 0.25);
    std::vector<double> d(geo.size(), 0.0);
    const std::size_t center = geo.linear_index({8, 8, 0});
    d[center] = 3.0;
    const GridMeasure g(geo, d);
    const double mass = 3.0 * geo.cell_volume();
    const double p = 1.5, n = 2.0;
    std::vector<std::size_t> nodes{geo.linear_index({8, 12, 0}), geo.linear_index({11, 12, 0})};
    const auto w = wolff_at_nodes(g, p, nodes);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const auto pos = geo.position(nodes[j]);
        const double dist = std::hypot(pos[0], pos[1]);
        const double ref = (p - 1.0) / (n - p) * std::pow(mass, 1.0 / (p - 1.0)) * std::pow(dist, (p - n) / (p - 1.0));
        CHECK(w[j] == doctest::Approx(ref).epsilon(1e-12));
        const auto direct = wolff_potential(Measure(g), p, std::vector<double>{pos[0], pos[1]});
        CHECK(direct.value() == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("grid Wolff potential approaches the radial value under refinement") {
    const double p = 2.0;
    const auto radial = RadialMeasure::lebesgue_ball(3, 1.0);
    const double ref = wolff_at(Measure(radial), p, 0.0);
    double prev_err = 1e9;
    for (double h : {0.25, 0.125}) {
        const GridGeometry geo(3, 1.5, h);
        const auto g = GridMeasure::sample(geo, [](std::span<const double> x) {
            return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 1.0 ? 1.0 : 0.0;
        });
        const std::vector<std::size_t> origin{geo.linear_index({geo.points_per_axis() / 2, geo.points_per_axis() / 2,
                                                               geo.points_per_axis() / 2})};
        const double err = std::abs(wolff_at_nodes(g, p, origin)[0] - ref) / ref;
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.05);
}

TEST_CASE("kappa lower bound on the unit ball with a Dirac at the origin") {
    const Measure ball = RadialMeasure::lebesgue_ball(3, 1.0);
    const std::vector<std::vector<double>> samples{{0.0, 0.0, 0.0}};
    const auto est = kappa_lower_bound(ball, Ball{{0.0, 0.0, 0.0}, 1.0}, 2.0, 0.5, samples);
    const double ref = std::pow(8.0 * std::numbers::pi / 5.0, 2.0);
    CHECK(est.lower_bound == doctest::Approx(ref).epsilon(1e-8));
    CHECK(est.witness.find("dirac") != std::string::npos);
    REQUIRE(est.candidates.size() == 2);
    CHECK(est.candidates[1].value < est.lower_bound);
    CHECK(est.candidates[1].value > 0.0);
}

TEST_CASE("kappa lower bound scales like lambda^(1/q) and handles off-axis samples") {
    const auto base = RadialMeasure::lebesgue_ball(3, 1.0);
    const std::vector<std::vector<double>> samples{{0.0, 0.0, 0.0}, {0.3, 0.0, 0.0}, {-0.4, 0.0, 0.0}};
    const Ball ball{{0.2, 0.0, 0.0}, 0.6};
    const auto a = kappa_lower_bound(Measure(base), ball, 2.0, 0.5, samples);
    const auto b = kappa_lower_bound(Measure(scale(base, 3.0)), ball, 2.0, 0.5, samples);
    CHECK(b.lower_bound == doctest::Approx(9.0 * a.lower_bound).epsilon(1e-8));
    for (std::size_t i = 0; i < a.candidates.size(); ++i) CHECK(a.candidates[i].value <= a.lower_bound);

    const std::vector<std::vector<double>> off{{0.0, 0.5, 0.0}};
    CHECK_THROWS_AS(kappa_lower_bound(Measure(base), ball, 2.0, 0.5, off), DomainError);
    CHECK_THROWS_AS(kappa_lower_bound(Measure(base), ball, 2.0, 0.5, {}), DomainError);
    CHECK_THROWS_AS(kappa_lower_bound(Measure(base), ball, 2.0, 1.0, samples), DomainError);
}

TEST_CASE("kappa of a Dirac candidate against a closed-form shell moment in other dimensions") {
    // Dirac at the origin: int_{B(0,R)} |x|^(-s) dx = s_{n-1} R^(n-s) / (n-s)
    for (auto [n, p] : std::vector<std::pair<int, double>>{{2, 1.5}, {4, 2.0}, {5, 3.0}}) {
        const Measure m = RadialMeasure::lebesgue_ball(n, 2.0);
        const double q = 0.3 * (p - 1.0);
        const double s = q * (n - p) / (p - 1.0);
        const double R = 1.5;
        const double area = n * oracle::unit_ball_volume(n);
        const double ref = (p - 1.0) / (n - p) * std::pow(area * std::pow(R, n - s) / (n - s), 1.0 / q);
        const std::vector<std::vector<double>> samples{std::vector<double>(n, 0.0)};
        const auto est = kappa_lower_bound(m, Ball{std::vector<double>(n, 0.0), R}, p, q, samples);
        CHECK(est.candidates[0].value == doctest::Approx(ref).epsilon(1e-7));
    }
}

TEST_CASE("kappa Dirac candidate off center agrees with a direct sphere quadrature") {
    // n = 3, Dirac at eta e_1 inside B(0, 1): shell average of |x - y|^-s has the closed form
    // ((rho + eta)^(2-s) - |rho - eta|^(2-s)) / (2 rho eta (2 - s))
    const double p = 2.0, q = 0.5, s = 0.5, eta = 0.4;
    auto avg = [&](double rho) {
        return (std::pow(rho + eta, 2.0 - s) - std::pow(std::abs(rho - eta), 2.0 - s)) / (2.0 * rho * eta * (2.0 - s));
    };
    auto f = [&](double rho) { return 4.0 * std::numbers::pi * rho * rho * avg(rho); };
    const double I = oracle::simpson(f, 1e-12, eta, 20000) + oracle::simpson(f, eta, 1.0, 20000);
    const Measure m = RadialMeasure::lebesgue_ball(3, 1.0);
    const std::vector<std::vector<double>> samples{{eta, 0.0, 0.0}};
    const auto est = kappa_lower_bound(m, Ball{{0.0, 0.0, 0.0}, 1.0}, p, q, samples);
    CHECK(est.candidates[0].value == doctest::Approx(I * I).epsilon(1e-7));
}

TEST_CASE("grid kappa with a Dirac in an empty cell follows the point formula") {
    const GridGeometry geo(2, 1.0, 0.5);
    std::vector<double> d(geo.size(), 0.0);
    d[geo.linear_index({2, 3, 0})] = 2.0; // node (0, 0.5)
    const GridMeasure g(geo, d);
    const double p = 1.5, q = 0.25, n = 2.0;
    const double s = q * (n - p) / (p - 1.0);
    const std::vector<std::vector<double>> samples{{0.0, -0.5}};
    const auto est = kappa_lower_bound(Measure(g), Ball{{0.0, 0.0}, 1.0}, p, q, samples);
    const double I = 2.0 * geo.cell_volume() * std::pow(1.0, -s);
    CHECK(est.candidates[0].value == doctest::Approx((p - 1.0) / (n - p) * std::pow(I, 1.0 / q)).epsilon(1e-12));
}

TEST_CASE("intrinsic potential exponent and estimate") {
    CHECK(intrinsic_kappa_exponent(2.0, 0.5) == doctest::Approx(1.0));
    CHECK(intrinsic_kappa_exponent(2.0, 0.9) > intrinsic_kappa_exponent(2.0, 0.45));
    const auto zero = RadialMeasure::zero(3);
    const std::vector<double> tmesh{0.5, 1.0, 2.0};
    const auto z = intrinsic_potential(zero, 2.0, 0.5, point(3, 0.0), tmesh);
    CHECK(z.value.value() == 0.0);

    const auto m = RadialMeasure::lebesgue_ball(3, 1.0);
    const auto mesh = radial_mesh(0.05, 50.0, 12, false);
    const auto est = intrinsic_potential(m, 2.0, 0.5, point(3, 0.0), mesh);
    CHECK(est.lower_bound);
    CHECK(est.finite == Verdict::holds);
    CHECK(est.value.is_finite());
    CHECK(est.value.value() > 0.0);
    CHECK(std::abs(est.kappa_tail_exponent) < 0.05);
}

TEST_CASE("Wolff sublevel restriction") {
    const auto m = RadialMeasure::lebesgue_ball(3, 1.0);
    const auto big = restrict_to_wolff_sublevel(m, 10.0, 2.0);
    const auto ref = restrict_to_ball(m, 10.0);
    for (double r : {0.3, 0.9, 1.0, 5.0, 10.0}) CHECK(big.cumulative(r) == ref.cumulative(r));
    const auto tiny = restrict_to_wolff_sublevel(m, 0.1, 2.0);
    CHECK(tiny.is_zero());
    CHECK(restrict_to_wolff_sublevel(RadialMeasure::zero(3), 1.0, 2.0).is_zero());

    // W(0) = 2 pi and W decreases away from the origin: k = 5 keeps an outer shell only
    const auto shell = restrict_to_wolff_sublevel(m, 5.0, 2.0);
    CHECK(shell.cumulative(0.2) == 0.0);
    CHECK(shell.total_mass() > 0.0);
    CHECK(shell.total_mass() < m.total_mass());
    // the shell's inner edge sits where W crosses 5
    double edge = 0.0;
    for (const auto& k : shell.knots())
        if (k.mass == 0.0) edge = k.radius;
    CHECK(wolff_at(Measure(m), 2.0, edge) == doctest::Approx(5.0).epsilon(1e-6));
}
