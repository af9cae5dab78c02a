#include "nlpot/radial_solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"
#include "nlpot/potentials.hpp"

namespace nlpot {

namespace {

constexpr double kMonotoneSlack = 1e-12;
constexpr double kContractionSlack = 1e-6;
constexpr double kContractionTarget = 1e-6;
constexpr double kTailReach = 1e3;
constexpr int kPartitionPerDecade = 48;

using Rule10 = boost::math::quadrature::gauss<double, 10>;

std::vector<double> evaluate(const RadialFunction& u, std::span<const double> mesh) {
    std::vector<double> v(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = u(mesh[i]);
    return v;
}

double sup(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, x);
    return s;
}

RadialProfile make_profile(std::span<const double> mesh, std::vector<double> values, int n, double tail,
                           const std::string& label) {
    RadialProfile prof;
    prof.radii.assign(mesh.begin(), mesh.end());
    prof.values = std::move(values);
    prof.dimension = n;
    prof.tail_exponent = tail;
    prof.label = label;
    prof.validate();
    return prof;
}

double gl10(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return Rule10::integrate(f, a, b);
}

} // namespace

// ---------------------------------------------------------------------------

EntireRadialSolution::EntireRadialSolution(const RadialMeasure& sigma, double p, std::span<const double> breakpoints,
                                           double outer_radius)
    : sigma_(sigma), p_(p), outer_(outer_radius),
      constant_(0.0), tail_exponent_(0.0),
      integral_((require_exponent(p, sigma.dimension()), sigma), sigma.dimension() - p, 1.0 / (p - 1.0), breakpoints) {
    const int n = sigma_.dimension();
    const double gamma = 1.0 / (p - 1.0);
    if (integral_.tail().is_infinite()) throw FinitenessError(check_finiteness(sigma_, p));
    constant_ = std::pow(sphere_area(n), -gamma);
    tail_exponent_ = sigma_.has_finite_total_mass() ? (p - n) * gamma
                                                     : (sigma_.tail_growth_exponent() - (n - p)) * gamma;
    if (std::isfinite(outer_)) {
        if (!(outer_ > 0.0)) throw DomainError("Dirichlet radius must be positive");
        boundary_value_ = constant_ * integral_.at(outer_).value();
        tail_exponent_ = 0.0;
    }
}

double EntireRadialSolution::operator()(double r) const {
    if (std::isfinite(outer_)) {
        if (r >= outer_) return 0.0;
        return std::max(0.0, constant_ * integral_.at(r).value() - boundary_value_);
    }
    return constant_ * integral_.at(r).value();
}

RadialProfile EntireRadialSolution::profile(std::span<const double> mesh, const std::string& label) const {
    std::vector<double> v(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = (*this)(mesh[i]);
    return make_profile(mesh, std::move(v), sigma_.dimension(), tail_exponent_, label);
}

RadialProfile solve_entire_radial(const RadialMeasure& sigma, double p, std::span<const double> mesh) {
    return EntireRadialSolution(sigma, p, mesh).profile(mesh);
}

RadialProfile solve_dirichlet_radial(const RadialMeasure& sigma, double p, double R, std::span<const double> mesh) {
    return EntireRadialSolution(restrict_to_ball(sigma, R), p, mesh, R).profile(mesh);
}

CenterIdentity radial_center_identity_check(const RadialMeasure& sigma, double p) {
    const int n = sigma.dimension();
    require_exponent(p, n);
    CenterIdentity out;
    out.expected = std::pow(sphere_area(n), -1.0 / (p - 1.0));
    if (sigma.is_zero()) {
        out.vacuous = out.passed = true;
        return out;
    }
    const std::vector<double> origin(n, 0.0);
    out.u0 = EntireRadialSolution(sigma, p)(0.0);
    out.w0 = wolff_potential(sigma, p, origin).value();
    out.ratio = out.u0 / out.w0;
    out.passed = std::abs(out.ratio / out.expected - 1.0) <= 1e-8;
    return out;
}

RadialFunction interpolate_profile(const RadialProfile& prof) {
    prof.validate();
    if (prof.radii.empty()) return [](double) { return 0.0; };
    return [prof](double r) {
        const auto& R = prof.radii;
        const auto& V = prof.values;
        if (r <= R.front()) return V.front();
        if (r >= R.back()) return V.back() * std::pow(r / R.back(), prof.tail_exponent);
        const auto it = std::upper_bound(R.begin(), R.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - R.begin()) - 1;
        const double r0 = R[i], r1 = R[i + 1], v0 = V[i], v1 = V[i + 1];
        if (r0 > 0.0 && v0 > 0.0 && v1 > 0.0) {
            const double th = std::log(r / r0) / std::log(r1 / r0);
            return v0 * std::pow(v1 / v0, th);
        }
        return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
    };
}

// ---------------------------------------------------------------------------

void SublinearProblem::validate() const {
    if (sigma.dimension() != mu.dimension()) throw DomainError("sublinear problem: sigma and mu differ in dimension");
    require_exponent(p, sigma.dimension());
    if (!(q > 0.0) || !(q < p - 1.0)) throw DomainError("sublinear problem: need 0 < q < p - 1");
    for (const RadialMeasure* m : {&sigma, &mu}) {
        if (m->is_zero()) continue;
        const auto rep = check_finiteness(*m, p);
        if (!rep.finite) throw FinitenessError(rep);
    }
}

SublinearMap::SublinearMap(const SublinearProblem& prob, std::span<const double> mesh, double outer_radius)
    : prob_(prob), mesh_(mesh.begin(), mesh.end()), outer_(outer_radius) {
    prob_.validate();
    for (double r : mesh_)
        if (r > 0.0) partition_.push_back(r);
    for (const RadialMeasure* m : {&prob_.sigma, &prob_.mu})
        for (const auto& k : m->knots()) partition_.push_back(k.radius);
    if (!prob_.sigma.has_finite_total_mass() || !prob_.mu.has_finite_total_mass()) {
        // push the fitted product tail far beyond every knot and mesh point
        double top = 0.0;
        for (double r : partition_) top = std::max(top, r);
        const auto extra = log_spaced(top, kTailReach * top, 32);
        partition_.insert(partition_.end(), extra.begin(), extra.end());
    }
    if (!partition_.empty()) {
        // the product measure is linear between partition points
        const auto [lo, hi] = std::minmax_element(partition_.begin(), partition_.end());
        const auto dense = log_spaced(*lo, *hi, kPartitionPerDecade);
        partition_.insert(partition_.end(), dense.begin(), dense.end());
    }
    if (std::isfinite(outer_)) {
        partition_.erase(std::remove_if(partition_.begin(), partition_.end(), [&](double r) { return r > outer_; }),
                         partition_.end());
        partition_.push_back(outer_);
    }
    std::sort(partition_.begin(), partition_.end());
    partition_.erase(std::unique(partition_.begin(), partition_.end()), partition_.end());
    if (partition_.empty()) throw DomainError("sublinear map: mesh and measures give an empty partition");
}

RadialMeasure SublinearMap::product_measure(const RadialFunction& u) const {
    const int n = prob_.sigma.dimension();
    const auto& sigma = prob_.sigma;
    const double q = prob_.q;
    if (sigma.is_zero()) return restrict_to_ball(prob_.mu, outer_);
    auto density = [&](double rho) {
        const double d = sigma.derivative(rho);
        if (d == 0.0) return 0.0;
        return std::pow(std::max(0.0, u(rho)), q) * d;
    };
    std::vector<Knot> knots;
    knots.reserve(partition_.size());
    double S = sigma.is_zero() ? 0.0 : gl10(density, 0.0, partition_.front());
    double prev = partition_.front();
    for (std::size_t k = 0; k < partition_.size(); ++k) {
        const double r = partition_[k];
        if (k > 0 && !sigma.is_zero()) S += gl10(density, prev, r);
        prev = r;
        double m = S + prob_.mu.cumulative(std::isfinite(outer_) ? std::min(r, outer_) : r);
        if (!knots.empty()) m = std::max(m, knots.back().mass);
        knots.push_back({r, m});
    }

    const double last = partition_.back();
    std::vector<TailTerm> tail;
    const bool finite_outer = std::isfinite(outer_);
    if (finite_outer || (sigma.has_finite_total_mass() && prob_.mu.has_finite_total_mass())) {
        tail.push_back({knots.back().mass, 0.0, 0.0});
        return RadialMeasure(n, std::move(knots), std::move(tail));
    }
    // mu continues with its own terms; the sigma part follows u^q d sigma with u ~ r^theta
    double mu_part = prob_.mu.cumulative(last);
    for (const auto& t : prob_.mu.tail()) tail.push_back(t);
    if (prob_.mu.has_finite_total_mass()) {
        tail.clear();
        tail.push_back({mu_part, 0.0, 0.0});
    }
    const double S_last = knots.back().mass - mu_part;
    if (S_last > 0.0) {
        const double u1 = u(last), u2 = u(2.0 * last);
        const double theta = (u1 > 0.0 && u2 > 0.0) ? std::log(u2 / u1) / std::log(2.0) : 0.0;
        double b = 0.0, c = 0.0;
        for (const auto& t : sigma.tail())
            if (t.a > 0.0 && t.b >= b) {
                b = t.b;
                c = t.c;
            }
        const double beta = b + theta * q;
        if (beta > 0.0 && !sigma.has_finite_total_mass()) {
            double a = S_last / std::pow(last, beta);
            if (c != 0.0) a *= std::pow(std::log(last), c);
            tail.push_back({a, beta, c});
        } else {
            tail.push_back({S_last, 0.0, 0.0});
        }
    }
    if (tail.empty()) tail.push_back({0.0, 0.0, 0.0});
    return RadialMeasure(n, std::move(knots), std::move(tail));
}

std::shared_ptr<EntireRadialSolution> SublinearMap::apply(const RadialFunction& u) const {
    return std::make_shared<EntireRadialSolution>(product_measure(u), prob_.p, mesh_, outer_);
}

// ---------------------------------------------------------------------------

SublinearResult sublinear_fixed_point_radial(const SublinearProblem& prob, std::span<const double> mesh,
                                             const SublinearStart& start, const SublinearOptions& opts) {
    const SublinearMap map(prob, mesh, opts.outer_radius);
    const int n = prob.sigma.dimension();

    RadialFunction u;
    switch (start.kind) {
    case StartKind::zero: u = [](double) { return 0.0; }; break;
    case StartKind::profile: u = interpolate_profile(start.profile); break;
    case StartKind::wolff_seed: {
        if (!(start.c0 > 0.0)) throw DomainError("Wolff seed constant c0 must be positive");
        auto seed = prob.sigma.is_zero() ? RadialProfile{{mesh.begin(), mesh.end()}, std::vector<double>(mesh.size()),
                                                         0.0, n, "seed"}
                                         : wolff_radial_profile(prob.sigma, prob.p, mesh);
        const double expo = (prob.p - 1.0) / (prob.p - 1.0 - prob.q);
        for (double& v : seed.values) v = start.c0 * std::pow(v, expo);
        seed.tail_exponent *= expo;
        u = interpolate_profile(seed);
        break;
    }
    }

    SublinearResult res;
    auto prev = evaluate(u, mesh);
    res.trace.records.push_back({0, sup(prev), 1.0, true});
    std::shared_ptr<EntireRadialSolution> current;
    for (int j = 1; j <= opts.max_iterations; ++j) {
        current = map.apply(u);
        auto cur = evaluate([&](double r) { return (*current)(r); }, mesh);
        const double s = sup(cur);
        if (!(s <= opts.divergence_bound))
            throw DivergenceError("sublinear iteration diverged: sup u_" + std::to_string(j) + " = " + format_double(s));
        double change = 0.0, ratio = 0.0;
        bool monotone = true;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            change = std::max(change, std::abs(cur[i] - prev[i]));
            if (prev[i] > 0.0) ratio = std::max(ratio, cur[i] / prev[i]);
            if (cur[i] < prev[i] - kMonotoneSlack * std::max(std::abs(prev[i]), s)) monotone = false;
        }
        change = s > 0.0 ? change / s : 0.0;
        res.trace.records.push_back({j, s, ratio, monotone});
        res.trace.iterations = j;
        res.trace.final_change = change;
        const auto sol = current;
        u = [sol](double r) { return (*sol)(r); };
        prev = std::move(cur);
        if (change < opts.tolerance) {
            res.trace.converged = true;
            break;
        }
    }
    res.solution = make_profile(mesh, prev, n, current->tail_exponent(), "u");
    res.evaluator = u;
    return res;
}

double self_consistency_residual(const SublinearProblem& prob, std::span<const double> mesh, const RadialFunction& u,
                                 double outer_radius) {
    const SublinearMap map(prob, mesh, outer_radius);
    const auto next = map.apply(u);
    double diff = 0.0, s = 0.0;
    for (double r : mesh) {
        const double a = u(r), b = (*next)(r);
        diff = std::max(diff, std::abs(a - b));
        s = std::max(s, std::abs(a));
    }
    return s > 0.0 ? diff / s : diff;
}

ContractionReport contraction_experiment(const SublinearProblem& prob, std::span<const double> mesh,
                                         const SublinearResult& ascending, double C0, const SublinearOptions& opts) {
    if (!(C0 >= 1.0)) throw DomainError("contraction experiment: C0 must be at least 1");
    const SublinearMap map(prob, mesh, opts.outer_radius);
    const int n = prob.sigma.dimension();
    const auto u = ascending.evaluator;
    const auto u_mesh = evaluate(u, mesh);
    const bool compact = prob.sigma.has_finite_total_mass();
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double r = mesh[i];
        const bool in_support = !prob.sigma.is_zero() && r < opts.outer_radius &&
                                (!compact || r <= prob.sigma.last_radius());
        if (in_support && !(u_mesh[i] > 0.0))
            throw DomainError("contraction experiment: the reference solution vanishes on the support of sigma at r = " +
                              format_double(r));
    }

    ContractionReport rep;
    rep.C0 = C0;
    const double factor = prob.q / (prob.p - 1.0);
    RadialFunction v = [u, C0](double r) { return C0 * u(r); };
    auto v_mesh = evaluate(v, mesh);
    auto rho_of = [&](std::span<const double> vm) {
        double rho = 0.0;
        for (std::size_t i = 0; i < vm.size(); ++i)
            if (u_mesh[i] > 0.0) rho = std::max(rho, vm[i] / u_mesh[i]);
        return rho;
    };
    std::vector<double> prev = v_mesh;
    for (int j = 0; j <= opts.max_iterations; ++j) {
        if (j > 0) {
            const auto next = map.apply(v);
            v = [next](double r) { return (*next)(r); };
            v_mesh = evaluate(v, mesh);
        }
        const double rho = rho_of(v_mesh);
        const double ln_rho = std::log(rho);
        const double bound = std::pow(factor, j) * std::log(C0);
        bool monotone = true;
        for (std::size_t i = 0; i < v_mesh.size(); ++i)
            if (v_mesh[i] > prev[i] + kMonotoneSlack * std::max(1.0, std::abs(prev[i]))) monotone = false;
        rep.trace.records.push_back({j, sup(v_mesh), rho, monotone});
        rep.ln_rho.push_back(ln_rho);
        rep.bound.push_back(bound);
        if (ln_rho > bound + kContractionSlack) rep.bound_holds = false;
        prev = v_mesh;
        rep.trace.iterations = j;
        if (rho - 1.0 < kContractionTarget) {
            rep.converged = rep.trace.converged = true;
            rep.iterations = j;
            break;
        }
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < v_mesh.size(); ++i) diff = std::max(diff, std::abs(v_mesh[i] - u_mesh[i]));
    const double s = sup(u_mesh);
    rep.agreement = s > 0.0 ? diff / s : diff;
    rep.limit = make_profile(mesh, v_mesh, n, ascending.solution.tail_exponent, "descending_limit");
    return rep;
}

} // namespace nlpot
