#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "nlpot/error.hpp"
#include "nlpot/verify.hpp"
#include "oracles.hpp"

using namespace nlpot;

namespace {

constexpr double kPi = std::numbers::pi;

/// sup_t t |{|Du| > t}|^(2/3) for the unit-mass Newtonian ball potential in R^3:
/// |Du| = r / (4 pi) inside, 1 / (4 pi r^2) outside, so the supremum is the t -> 0 limit.
double newtonian_weak_norm() { return std::pow(4.0 * kPi / 3.0, 2.0 / 3.0) / (4.0 * kPi); }

} // namespace

TEST_CASE("weak norm of simple fields") {
    const GridGeometry g(2, 1.0, 0.25);
    GridField u;
    u.geometry = g;
    u.values.assign(g.size(), 0.0);
    u.fixed.assign(g.size(), 0);
    CHECK(weak_lorentz_norm(u, 1.5) == 0.0);

    // one node raised by a: the cells touching it have gradients a/h and a sqrt(2)/h
    const double a = 0.3, h = 0.25;
    u.values[g.linear_index({2, 2, 0})] = a;
    const auto mags = gradient_magnitudes(u);
    int big = 0, small = 0;
    for (double m : mags) {
        if (std::abs(m - a * std::sqrt(2.0) / h) < 1e-12) ++big;
        if (std::abs(m - a / h) < 1e-12) ++small;
    }
    CHECK(big == 1);
    CHECK(small == 2);
    const double gamma = 1.5, vol = h * h;
    const double expect = std::max(a * std::sqrt(2.0) / h * std::pow(vol, 1.0 / gamma), a / h * std::pow(3 * vol, 1.0 / gamma));
    CHECK(weak_lorentz_norm(u, gamma) == doctest::Approx(expect).epsilon(1e-14));

    const std::vector<double> one{2.0}, cell{0.125};
    CHECK(weak_lorentz_norm(one, cell, 0.75) == doctest::Approx(2.0 * std::pow(0.125, 1.0 / 0.75)).epsilon(1e-14));
    CHECK_THROWS_AS(weak_lorentz_norm(one, cell, 0.0), DomainError);
}

TEST_CASE("weak norm is monotone under domination") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(40), b(40), v(40);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = U(rng);
            b[i] = a[i] + U(rng) * 0.5;
            v[i] = 0.1 + U(rng);
        }
        for (double gamma : {0.5, 1.5, 3.0}) CHECK(weak_lorentz_norm(a, v, gamma) <= weak_lorentz_norm(b, v, gamma));
    }
}

TEST_CASE("weak norm of the Newtonian ball potential") {
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const double expect = newtonian_weak_norm();
    double prev = 0.0;
    for (int count : {400, 800}) {
        const auto u = solve_entire_radial(ball, 2.0, radial_mesh(1e-3, 1e4, count));
        const double w = weak_lorentz_norm(u, 1.5);
        CHECK(w == doctest::Approx(expect).epsilon(0.02));
        if (prev > 0.0) CHECK(std::abs(w / prev - 1.0) < 0.01);
        prev = w;
    }
}

TEST_CASE("bilateral ratios of entire solutions") {
    for (auto [n, p] : std::vector<std::pair<int, double>>{{3, 2.0}, {4, 3.0}}) {
        const auto sigma = RadialMeasure::uniform_ball(n, 1.0, 1.0);
        const auto mesh = radial_mesh(1e-3, 1e3, 60);
        const auto rep = bilateral_ratio_report(solve_entire_radial(sigma, p, mesh), sigma, p);
        const double s = std::pow(oracle::sphere_area(n), -1.0 / (p - 1.0));
        CHECK(rep.status == Verdict::holds);
        CHECK(rep.evaluated == mesh.size());
        CHECK(rep.center_ratio == doctest::Approx(s).epsilon(1e-8));
        CHECK(rep.min_ratio <= s * (1.0 + 1e-8));
        CHECK(rep.k_empirical >= 1.0);
        CHECK(std::isfinite(rep.k_empirical));
    }
    const auto zero = bilateral_ratio_report(solve_entire_radial(RadialMeasure::zero(3), 2.0, radial_mesh(1e-3, 10.0, 5)),
                                             RadialMeasure::zero(3), 2.0);
    CHECK(zero.status == Verdict::inconclusive);
}

TEST_CASE("reachability of radial solutions") {
    const auto mesh = radial_mesh(1e-3, 1e4, 120);
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const auto finite = reachability_classifier(solve_entire_radial(ball, 2.0, mesh), ball, 2.0);
    CHECK(finite.condition_i.verdict == Verdict::holds);
    CHECK(finite.condition_ii.verdict == Verdict::holds);
    CHECK(finite.condition_iii.verdict == Verdict::holds);
    CHECK(finite.overall == Verdict::holds);
    CHECK(finite.gamma_low == doctest::Approx(1.5));

    const auto tail = RadialMeasure::with_power_tail(3, {{1.0, 1.0}}, 0.3, 0.0);
    const auto rep = reachability_classifier(solve_entire_radial(tail, 2.0, mesh), tail, 2.0);
    CHECK(rep.condition_iii.verdict == Verdict::fails);
    CHECK(rep.total_mass.is_infinite());
    CHECK(rep.condition_ii.verdict == Verdict::holds);
    CHECK(rep.condition_i.verdict == Verdict::holds);

    // b = (n-p)/2 puts the tail gradient exactly at the weak L^p endpoint
    const auto edge = RadialMeasure::with_power_tail(3, {{1.0, 1.0}}, 0.5, 0.0);
    CHECK(reachability_classifier(solve_entire_radial(edge, 2.0, mesh), edge, 2.0).condition_i.verdict ==
          Verdict::inconclusive);

    // sigma(B_r) = r (ln r)^-2 gives u ~ 1 / (4 pi ln r): decaying, but slower than any power
    const double e2 = std::exp(2.0);
    const RadialMeasure slow(3, {{1.0, 0.5}, {e2, e2 / 4.0}}, {{1.0, 1.0, 2.0}});
    const auto log_rep = reachability_classifier(solve_entire_radial(slow, 2.0, mesh), slow, 2.0);
    CHECK(log_rep.condition_ii.verdict == Verdict::inconclusive);
    CHECK(log_rep.condition_iii.verdict == Verdict::fails);
    CHECK(log_rep.overall == Verdict::inconclusive);
}

TEST_CASE("reachability of grid fields is decided by finite mass") {
    const GridGeometry g(2, 1.0, 0.125);
    const auto nu = GridMeasure::sample(g, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] < 0.25 ? 1.0 : 0.0; });
    SolveConfig cfg;
    cfg.domain = {DomainKind::ball, 1.0};
    OperatorSpec op;
    op.p = 1.5;
    const auto rep = reachability_classifier(solve_dirichlet_grid(nu, op, cfg), nu, 1.5);
    CHECK(rep.overall == Verdict::holds);
    CHECK(rep.weak_norm_gamma_low > 0.0);
}

TEST_CASE("uniqueness battery with the pure power problem") {
    const auto sigma = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const SublinearProblem prob{sigma, RadialMeasure::zero(3), 2.0, 0.5};
    const auto mesh = radial_mesh(1e-3, 50.0, 40);
    const std::vector<double> C0{2.0, 10.0, 100.0};
    const auto rep = uniqueness_battery(prob, mesh, C0);
    CHECK(rep.passed);
    CHECK(rep.start == "wolff_seed");
    REQUIRE(rep.entries.size() == 3);
    for (const auto& e : rep.entries) {
        CHECK(e.within_prediction);
        // x_{j+1} = x_j / 2 from x_0 = ln C0 reaches 1e-6 after ceil(log2(ln C0 / 1e-6)) steps
        CHECK(e.predicted_iterations == static_cast<int>(std::ceil(std::log2(std::log(e.C0) / 1e-6))));
    }
    const auto csv = rep.rate_csv();
    CHECK(csv.rfind("C0,j,ln_rho,bound\n", 0) == 0);

    const std::vector<double> one{1.0};
    const auto trivial = uniqueness_battery(prob, mesh, one);
    CHECK(trivial.passed);
    CHECK(trivial.entries[0].report.iterations == 0);
}

TEST_CASE("uniqueness battery with a source term") {
    const auto ball = RadialMeasure::uniform_ball(3, 1.0, 1.0);
    const SublinearProblem prob{ball, ball, 2.5, 1.0};
    const std::vector<double> C0{2.0, 10.0};
    const auto rep = uniqueness_battery(prob, radial_mesh(1e-3, 50.0, 40), C0);
    CHECK(rep.passed);
    CHECK(rep.start == "zero");
    for (const auto& e : rep.entries) CHECK(e.within_prediction);
}
