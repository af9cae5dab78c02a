#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlpot/error.hpp"
#include "nlpot/measure.hpp"
#include "nlpot/numeric.hpp"
#include "nlpot/profile.hpp"

namespace nlpot {

/// Throws DomainError unless 1 < p < n.
void require_exponent(double p, int n);

/// Integral over t in (0, inf) of (sigma(B(x, t)) / t^exponent)^power dt/t.
///
/// The Wolff potential W_{1,p} is exponent n - p, power 1/(p-1); the Riesz
/// potential I_1 is exponent n - 1, power 1.
struct PotentialKind {
    double exponent;
    double power;

    static PotentialKind wolff(double p, int n) { return {n - p, 1.0 / (p - 1.0)}; }
    static PotentialKind riesz_first_order(int n) { return {n - 1.0, 1.0}; }
};

/// sigma(B(x, t)) for a radial measure and |x| = r, by the spherical-cap
/// fraction integrated against dM. Exact up to quadrature for every n >= 2.
double off_center_ball_mass(const RadialMeasure& m, double r, double t);

/// Potential of the given kind at x (x.size() == dimension).
///
/// Radial measures: log-substituted dyadic Gauss-Legendre panels plus the analytic
/// tail; +inf is returned as an explicit marker when the tail integral diverges.
/// Grid measures: nodes are lumped point masses, integrated exactly step by step,
/// with the ball of radius h/2 around x replaced by the local density.
ExtendedReal potential(const Measure& m, PotentialKind kind, std::span<const double> x);

/// W_{1,p} sigma(x).
ExtendedReal wolff_potential(const Measure& m, double p, std::span<const double> x);

/// I_1 sigma(x).
ExtendedReal riesz_potential(const Measure& m, std::span<const double> x);

/// W_{1,p} sigma at |x| = mesh[i], x on the first axis. Infinite values raise
/// NumericalError because a profile cannot hold the marker.
RadialProfile wolff_radial_profile(const RadialMeasure& m, double p, std::span<const double> mesh);

/// W_{1,p} of a grid measure at the listed nodes (lumped-mass evaluation).
std::vector<double> wolff_at_nodes(const GridMeasure& m, double p, std::span<const std::size_t> nodes);

struct FinitenessReport {
    bool finite = true;
    /// Integral over [1, inf) of (sigma(B(0, rho)) / rho^(n-p))^(1/(p-1)) drho/rho.
    ExtendedReal tail_integral;
    /// Contribution of [1, r_last] by quadrature.
    double core = 0.0;
    /// Contribution of [max(1, r_last), inf) from the analytic tail.
    ExtendedReal analytic_tail;
};

class FinitenessError : public NumericalError {
public:
    explicit FinitenessError(FinitenessReport report)
        : NumericalError("Wolff potential is infinite: the finiteness integral diverges"), report_(report) {}
    const FinitenessReport& report() const noexcept { return report_; }

private:
    FinitenessReport report_;
};

/// Decides the finiteness condition for a radial measure. For a tail a rho^b (ln rho)^(-c)
/// the verdict is infinite iff b > n - p, or b = n - p and c <= p - 1.
FinitenessReport check_finiteness(const RadialMeasure& m, double p);

struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

struct KappaCandidate {
    std::string description;
    double value = 0.0; ///< (int_B (W mu)^q dsigma)^(1/q) / |mu|^(1/(p-1))
};

/// Certified-from-below estimate of the localized embedding constant kappa(B).
struct KappaEstimate {
    Ball ball;
    double lower_bound = 0.0;
    std::string witness;
    std::vector<KappaCandidate> candidates;
};

/// Maximizes the embedding ratio over Dirac masses at the sample points and over
/// the normalized restriction sigma_B / sigma(B).
///
/// For radial measures every sample must be collinear with the origin and the ball
/// center; the sigma_B candidate is only used for balls centered at the origin.
/// Requires 0 < q < p - 1 and a nonempty sample list.
KappaEstimate kappa_lower_bound(const Measure& sigma, const Ball& ball, double p, double q,
                                std::span<const std::vector<double>> samples);

struct IntrinsicEstimate {
    ExtendedReal value;              ///< lower-bound estimate of K_{p,q} sigma(x)
    Verdict finite = Verdict::inconclusive;
    double kappa_tail_exponent = 0.0; ///< fitted growth of kappa(B(x, t)) in t on the last mesh points
    std::vector<double> t;
    std::vector<double> kappa;
    bool lower_bound = true;
};

/// Exponent q (p - 1) / (p - 1 - q) carried by kappa inside the intrinsic potential.
double intrinsic_kappa_exponent(double p, double q);

/// Lower-bound estimate of the intrinsic potential of a radial measure at x.
///
/// kappa(B(x, t)) is replaced by kappa_lower_bound on every mesh ball, with samples at
/// the center and at half radius along the axes (along the radial axis when x != 0).
/// The t-integral is trapezoidal in ln t; the head and the tail are closed with the
/// power law fitted on the outermost mesh points, which also decides finiteness.
IntrinsicEstimate intrinsic_potential(const RadialMeasure& sigma, double p, double q,
                                      std::span<const double> x, std::span<const double> t_mesh);

} // namespace nlpot
