#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nlpot/error.hpp"
#include "nlpot/potentials.hpp"
#include "nlpot/radial_solver.hpp"
#include "oracles.hpp"

using namespace nlpot;

namespace {

constexpr double kPi = std::numbers::pi;

double sup_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        s = std::max(s, std::abs(b[i]));
    }
    return d / s;
}

SublinearProblem ball_problem(double p, double q, bool with_mu = true) {
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    return {ball, with_mu ? ball : RadialMeasure::zero(3), p, q};
}

SublinearStart wolff_seed() {
    SublinearStart s;
    s.kind = StartKind::wolff_seed;
    return s;
}

} // namespace

TEST_CASE("Newtonian potential of the unit-mass ball") {
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const EntireRadialSolution u(ball, 2.0);
    CHECK(u(1.0) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
    CHECK(u(0.0) == doctest::Approx(3.0 / (8.0 * kPi)).epsilon(1e-12));
    CHECK(u(3.0) == doctest::Approx(1.0 / (12.0 * kPi)).epsilon(1e-12));
    auto mass = [](double t) { return std::pow(std::min(t, 1.0), 3.0); };
    for (double r : {1e-3, 0.2, 0.5, 0.9}) CHECK(u(r) == doctest::Approx(oracle::radial_ode_solution(3, 2.0, mass, r, 1.0)).epsilon(1e-9));
}

TEST_CASE("entire solutions match the ODE formula for other exponents") {
    for (auto [n, p] : std::vector<std::pair<int, double>>{{3, 1.5}, {3, 2.5}, {4, 2.0}, {4, 3.0}}) {
        const auto m = RadialMeasure::uniform_ball(n, 1.0, 2.0);
        auto mass = [n = n](double t) { return 2.0 * std::pow(std::min(t, 1.0), n); };
        const EntireRadialSolution u(m, p);
        for (double r : {0.05, 0.5, 1.0, 4.0})
            CHECK(u(r) == doctest::Approx(oracle::radial_ode_solution(n, p, mass, r, 1.0)).epsilon(1e-9));
    }
}

TEST_CASE("zero measure gives the zero solution") {
    const auto prof = solve_entire_radial(RadialMeasure::zero(3), 2.0, radial_mesh(1e-3, 10.0, 20));
    for (double v : prof.values) CHECK(v == 0.0);
}

TEST_CASE("infinite Wolff potential raises FinitenessError") {
    const double p = 2.0, n = 3;
    const auto m = RadialMeasure::with_power_tail(3, {{1.0, 1.0}}, n - p, 0.0);
    CHECK_THROWS_AS(EntireRadialSolution(m, p), FinitenessError);
    try {
        EntireRadialSolution bad(m, p);
    } catch (const FinitenessError& e) {
        CHECK_FALSE(e.report().finite);
    }
}

TEST_CASE("center identity u(0) / W(0) = s^(-1/(p-1))") {
    for (auto [n, p] : std::vector<std::pair<int, double>>{{3, 1.5}, {3, 2.0}, {3, 2.5}, {4, 2.0}, {4, 3.0}}) {
        for (const auto& m : {RadialMeasure::uniform_ball(n, 1.0, 1.0),
                              RadialMeasure(n, {{1.0, 0.0}, {2.0, 1.0}}, {{1.0, 0.0, 0.0}}),
                              RadialMeasure::with_power_tail(n, {{1.0, 1.0}}, 0.5 * (n - p), 0.0)}) {
            const auto c = radial_center_identity_check(m, p);
            CHECK(c.passed);
            CHECK(c.expected == doctest::Approx(std::pow(oracle::sphere_area(n), -1.0 / (p - 1.0))).epsilon(1e-14));
        }
    }
    const auto c = radial_center_identity_check(RadialMeasure::lebesgue_ball(3, 1.0), 2.0);
    CHECK(c.u0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.w0 == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(c.ratio == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-12));
    const auto z = radial_center_identity_check(RadialMeasure::zero(3), 2.0);
    CHECK(z.vacuous);
    CHECK(z.passed);
}

TEST_CASE("entire solutions scale like lambda^(1/(p-1))") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(0.01, 100.0), pick(1.2, 2.8);
    const auto mesh = radial_mesh(1e-3, 20.0, 40);
    for (int trial = 0; trial < 10; ++trial) {
        const double p = pick(rng), l = lam(rng);
        const auto m = RadialMeasure(3, {{0.5, 0.3}, {1.0, 0.4}, {2.0, 1.5}}, {{1.5, 0.0, 0.0}});
        const auto a = solve_entire_radial(m, p, mesh);
        const auto b = solve_entire_radial(scale(m, l), p, mesh);
        const double f = std::pow(l, 1.0 / (p - 1.0));
        for (std::size_t i = 0; i < mesh.size(); ++i) CHECK(b.values[i] == doctest::Approx(f * a.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("ordered measures give ordered solutions at every mesh point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto mesh = radial_mesh(1e-3, 10.0, 50);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Knot> a, b;
        double ma = 0.0, mb = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const double da = 0.05 + U(rng);
            ma += da;
            mb += da + U(rng) * 0.2;
            a.push_back({0.4 * k, ma});
            b.push_back({0.4 * k, mb});
        }
        const auto ua = solve_entire_radial(RadialMeasure(3, a, {{ma, 0.0, 0.0}}), 2.0, mesh);
        const auto ub = solve_entire_radial(RadialMeasure(3, b, {{mb, 0.0, 0.0}}), 2.0, mesh);
        for (std::size_t i = 0; i < mesh.size(); ++i) CHECK(ua.values[i] <= ub.values[i]);
    }
}

TEST_CASE("Dirichlet solution is u - u(R) and vanishes at R") {
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const auto mesh = radial_mesh(1e-3, 3.0, 30);
    const auto d = solve_dirichlet_radial(ball, 2.0, 2.0, mesh);
    const EntireRadialSolution u(ball, 2.0);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double expect = mesh[i] >= 2.0 ? 0.0 : u(mesh[i]) - u(2.0);
        CHECK(d.values[i] == doctest::Approx(expect).epsilon(1e-12).scale(1e-14));
    }
}

TEST_CASE("profile interpolation is exact for power laws") {
    RadialProfile prof;
    prof.radii = {0.5, 1.0, 2.0, 4.0};
    for (double r : prof.radii) prof.values.push_back(std::pow(r, -1.5));
    prof.tail_exponent = -1.5;
    prof.dimension = 3;
    const auto f = interpolate_profile(prof);
    for (double r : {0.7, 1.3, 3.9, 10.0}) CHECK(f(r) == doctest::Approx(std::pow(r, -1.5)).epsilon(1e-13));
    CHECK(f(0.1) == doctest::Approx(prof.values.front()));
}

TEST_CASE("sublinear problem validation") {
    CHECK_THROWS_AS(ball_problem(2.0, 1.0).validate(), DomainError);
    CHECK_THROWS_AS(ball_problem(2.0, 0.0).validate(), DomainError);
    SublinearProblem bad = ball_problem(2.0, 0.5);
    bad.mu = RadialMeasure::with_power_tail(3, {{1.0, 1.0}}, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), FinitenessError);
}

TEST_CASE("trivial sublinear problems") {
    const auto mesh = radial_mesh(1e-3, 10.0, 30);
    SublinearProblem zero{RadialMeasure::zero(3), RadialMeasure::zero(3), 2.0, 0.5};
    const auto r0 = sublinear_fixed_point_radial(zero, mesh);
    CHECK(r0.trace.converged);
    CHECK(r0.trace.iterations == 1);
    for (double v : r0.solution.values) CHECK(v == 0.0);

    const auto mu = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    SublinearProblem decoupled{RadialMeasure::zero(3), mu, 2.0, 0.5};
    const auto r1 = sublinear_fixed_point_radial(decoupled, mesh);
    CHECK(r1.trace.converged);
    CHECK(r1.trace.iterations == 2);
    const auto direct = solve_entire_radial(mu, 2.0, mesh);
    CHECK(sup_rel(r1.solution.values, direct.values) < 1e-14);
}

TEST_CASE("ascending iteration converges monotonically to a self-consistent limit") {
    const auto mesh = radial_mesh(1e-3, 20.0, 60);
    const auto prob = ball_problem(2.0, 0.5);
    const auto res = sublinear_fixed_point_radial(prob, mesh);
    CHECK(res.trace.converged);
    CHECK(res.trace.all_monotone());
    CHECK(res.trace.final_change < 1e-8);
    CHECK(self_consistency_residual(prob, mesh, res.evaluator) <= 1e-6);
    // the limit dominates the decoupled solution U[mu]
    const auto base = solve_entire_radial(prob.mu, 2.0, mesh);
    for (std::size_t i = 0; i < mesh.size(); ++i) CHECK(res.solution.values[i] >= base.values[i]);
    CHECK(res.trace.to_csv().rfind("j,sup_value,sup_ratio,monotone\n", 0) == 0);
}

TEST_CASE("sublinear fixed point scales like lambda^(1/(p-1-q))") {
    const auto mesh = radial_mesh(1e-3, 20.0, 40);
    const auto prob = ball_problem(2.0, 0.5, false);
    const auto base = sublinear_fixed_point_radial(prob, mesh, wolff_seed());
    REQUIRE(base.trace.converged);
    for (double l : {0.1, 10.0}) {
        auto scaled = prob;
        scaled.sigma = scale(prob.sigma, l);
        const auto r = sublinear_fixed_point_radial(scaled, mesh, wolff_seed());
        REQUIRE(r.trace.converged);
        auto expect = base.solution.values;
        for (double& v : expect) v *= std::pow(l, 1.0 / (prob.p - 1.0 - prob.q));
        CHECK(sup_rel(r.solution.values, expect) <= 1e-6);
    }
}

TEST_CASE("divergence bound raises DivergenceError") {
    const auto mesh = radial_mesh(1e-3, 10.0, 20);
    auto prob = ball_problem(2.0, 0.5);
    prob.mu = scale(prob.mu, 1e20);
    CHECK_THROWS_AS(sublinear_fixed_point_radial(prob, mesh), DivergenceError);
}

TEST_CASE("contraction from C0 u follows the geometric bound") {
    const auto mesh = radial_mesh(1e-3, 20.0, 40);
    const auto prob = ball_problem(2.0, 0.5, false);
    const auto asc = sublinear_fixed_point_radial(prob, mesh, wolff_seed());
    REQUIRE(asc.trace.converged);

    const auto one = contraction_experiment(prob, mesh, asc, 1.0);
    CHECK(one.converged);
    CHECK(one.iterations == 0);
    CHECK(std::abs(one.ln_rho[0]) < 1e-14);

    const auto ten = contraction_experiment(prob, mesh, asc, 10.0);
    CHECK(ten.bound_holds);
    CHECK(ten.converged);
    CHECK(ten.agreement <= 1e-5);
    REQUIRE(ten.ln_rho.size() > 10);
    CHECK(std::exp(ten.ln_rho[10]) <= std::pow(10.0, 1.0 / 1024.0) * (1.0 + 1e-6));
    // mu = 0: the descending iterates are exactly C0^((q/(p-1))^j) u
    for (std::size_t j = 0; j < ten.ln_rho.size(); ++j)
        CHECK(std::abs(ten.ln_rho[j] - ten.bound[j]) < 1e-7);

    CHECK_THROWS_AS(contraction_experiment(prob, mesh, asc, 0.5), DomainError);
}

TEST_CASE("contraction rejects a reference that vanishes on supp sigma") {
    const auto mesh = radial_mesh(1e-3, 4.0, 20);
    const auto prob = ball_problem(2.0, 0.5);
    SublinearResult fake;
    fake.evaluator = [](double r) { return r < 0.5 ? 1.0 : 0.0; };
    fake.solution.dimension = 3;
    CHECK_THROWS_AS(contraction_experiment(prob, mesh, fake, 2.0), DomainError);
}
