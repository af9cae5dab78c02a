#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nlpot/numeric.hpp"

namespace nlpot::quad {

/// 20-point Gauss-Legendre rule on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

/// 10-point Gauss-Legendre rule on [a, b]; used for inner integrals in hot loops.
double gauss_legendre_10(const std::function<double(double)>& f, double a, double b);

/// Nodes and weights of the 10-point rule mapped to [a, b], for callers that
/// want to evaluate the integrand themselves.
void gauss_legendre_10_nodes(double a, double b, std::span<double, 10> nodes,
                             std::span<double, 10> weights);

struct LogScaleOptions {
    double rel_tol = 1e-10;
    int max_panels = 4000;
};

/// Integral of f(t) dt/t over (0, t_top].
///
/// The variable is t = e^s. Panels are dyadic in t, every breakpoint in (0, t_top)
/// is a panel edge, and each panel gets a 20-point Gauss-Legendre rule in s.
/// Below the smallest edge, dyadic panels are appended until one contributes
/// less than rel_tol of the running total.
double integrate_log_scale(const std::function<double(double)>& f, double t_top,
                           std::span<const double> breakpoints, const LogScaleOptions& opts = {});

/// Integral of f(t) dt/t over [t_lo, t_hi] on dyadic panels split at breakpoints.
double integrate_log_range(const std::function<double(double)>& f, double t_lo, double t_hi,
                           std::span<const double> breakpoints);

/// One term a * t^b * (ln t)^(-c) of an analytic cumulative-mass tail.
struct PowerLogTerm {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double value(double t) const;
    double derivative(double t) const;
};

/// Integral over [T, inf) of (S(t) / t^e)^gamma dt/t with S the sum of the terms.
///
/// Convergence is decided by the dominant term (largest b, then smallest c):
/// divergent iff gamma (b - e) > 0, or gamma (b - e) = 0 and gamma c <= 1.
/// Single-term integrals use closed forms; the rest use exp-sinh quadrature in ln t.
/// Requires T > 1 whenever a term carries a logarithm.
ExtendedReal power_log_tail_integral(std::span<const PowerLogTerm> terms, double e, double gamma,
                                     double T);

/// True iff the tail integral above converges; no quadrature is performed.
bool power_log_tail_converges(std::span<const PowerLogTerm> terms, double e, double gamma);

} // namespace nlpot::quad
