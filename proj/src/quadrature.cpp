#include "nlpot/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace nlpot::quad {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kCriticalSlack = 1e-12;

std::vector<double> sorted_edges(std::span<const double> breakpoints, double lo, double hi) {
    std::vector<double> edges{lo, hi};
    for (double b : breakpoints)
        if (b > lo && b < hi) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// s-panel [ln a, ln b] cut into pieces no wider than ln 2
double log_panel(const std::function<double(double)>& f, double a, double b) {
    const double sa = std::log(a), sb = std::log(b);
    const int pieces = std::max(1, static_cast<int>(std::ceil((sb - sa) / kLn2 - 1e-12)));
    const double ds = (sb - sa) / pieces;
    auto g = [&f](double s) { return f(std::exp(s)); };
    double sum = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double lo = sa + k * ds;
        const double hi = (k + 1 == pieces) ? sb : lo + ds;
        sum += boost::math::quadrature::gauss<double, 20>::integrate(g, lo, hi);
    }
    return sum;
}

const PowerLogTerm* dominant(std::span<const PowerLogTerm> terms) {
    const PowerLogTerm* best = nullptr;
    for (const auto& t : terms) {
        if (t.a <= 0.0) continue;
        if (!best || t.b > best->b + 1e-14 || (std::abs(t.b - best->b) <= 1e-14 && t.c < best->c))
            best = &t;
    }
    return best;
}

} // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

double gauss_legendre_10(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

void gauss_legendre_10_nodes(double a, double b, std::span<double, 10> nodes,
                             std::span<double, 10> weights) {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    // 10 is even: abscissa() holds the five positive nodes
    for (std::size_t i = 0; i < 5; ++i) {
        nodes[2 * i] = mid - half * x[i];
        nodes[2 * i + 1] = mid + half * x[i];
        weights[2 * i] = weights[2 * i + 1] = half * w[i];
    }
}

double integrate_log_range(const std::function<double(double)>& f, double t_lo, double t_hi,
                           std::span<const double> breakpoints) {
    if (!(t_hi > t_lo) || t_lo <= 0.0) return 0.0;
    const auto edges = sorted_edges(breakpoints, t_lo, t_hi);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) sum += log_panel(f, edges[i], edges[i + 1]);
    return sum;
}

double integrate_log_scale(const std::function<double(double)>& f, double t_top,
                           std::span<const double> breakpoints, const LogScaleOptions& opts) {
    double lowest = t_top;
    for (double b : breakpoints)
        if (b > 0.0 && b < lowest) lowest = b;

    double total = integrate_log_range(f, lowest, t_top, breakpoints);
    double hi = lowest;
    for (int k = 0; k < opts.max_panels; ++k) {
        const double lo = 0.5 * hi;
        const double part = log_panel(f, lo, hi);
        total += part;
        hi = lo;
        if (std::abs(part) <= opts.rel_tol * std::abs(total)) break;
    }
    return total;
}

double PowerLogTerm::value(double t) const {
    if (a == 0.0) return 0.0;
    double v = a * std::pow(t, b);
    if (c != 0.0) v *= std::pow(std::log(t), -c);
    return v;
}

double PowerLogTerm::derivative(double t) const {
    if (a == 0.0) return 0.0;
    if (c == 0.0) return b == 0.0 ? 0.0 : a * b * std::pow(t, b - 1.0);
    const double L = std::log(t);
    return a * std::pow(t, b - 1.0) * std::pow(L, -c) * (b - c / L);
}

bool power_log_tail_converges(std::span<const PowerLogTerm> terms, double e, double gamma) {
    const PowerLogTerm* d = dominant(terms);
    if (!d) return true;
    const double alpha = gamma * (d->b - e);
    if (alpha > kCriticalSlack) return false;
    if (alpha < -kCriticalSlack) return true;
    return gamma * d->c > 1.0 + kCriticalSlack;
}

ExtendedReal power_log_tail_integral(std::span<const PowerLogTerm> terms, double e, double gamma,
                                     double T) {
    const PowerLogTerm* d = dominant(terms);
    if (!d) return ExtendedReal(0.0);
    if (!power_log_tail_converges(terms, e, gamma)) return ExtendedReal::infinite();

    std::size_t active = 0;
    for (const auto& t : terms)
        if (t.a > 0.0) ++active;

    const double alpha = gamma * (d->b - e);
    if (active == 1) {
        const double ag = std::pow(d->a, gamma);
        if (d->c == 0.0) return ExtendedReal(ag * std::pow(T, alpha) / (-alpha));
        if (std::abs(alpha) <= kCriticalSlack) {
            const double beta = -gamma * d->c;
            return ExtendedReal(ag * std::pow(std::log(T), beta + 1.0) / (-beta - 1.0));
        }
    }

    // log-sum-exp keeps the integrand finite far out in s
    auto integrand = [&](double s) {
        double top = -std::numeric_limits<double>::infinity();
        std::vector<double> logs;
        logs.reserve(terms.size());
        for (const auto& term : terms) {
            if (term.a <= 0.0) continue;
            double l = std::log(term.a) + term.b * s;
            if (term.c != 0.0) l -= term.c * std::log(s);
            logs.push_back(l);
            top = std::max(top, l);
        }
        double acc = 0.0;
        for (double l : logs) acc += std::exp(l - top);
        return std::exp(gamma * (top + std::log(acc) - e * s));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    return ExtendedReal(integrator.integrate(integrand, std::log(T),
                                             std::numeric_limits<double>::infinity(), 1e-12));
}

} // namespace nlpot::quad
