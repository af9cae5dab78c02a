#pragma once

#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "nlpot/grid.hpp"
#include "nlpot/quadrature.hpp"

namespace nlpot {

using TailTerm = quad::PowerLogTerm;

struct Knot {
    double radius = 0.0; ///< r_i > 0
    double mass = 0.0;   ///< sigma(B(0, r_i))
};

/// Radially symmetric density measure described by its cumulative mass
/// M(rho) = sigma(B(0, rho)).
///
/// * rho <= r_1: M(rho) = m_1 (rho / r_1)^n, i.e. constant density near the origin.
/// * r_i <= rho <= r_{i+1}: linear in rho.
/// * rho >= r_K: sum of analytic terms a rho^b (ln rho)^(-c).
///
/// The cumulative function is continuous, so the measure has no atoms.
class RadialMeasure {
public:
    /// Validates every invariant; throws InvariantError on violation.
    RadialMeasure(int dimension, std::vector<Knot> knots, std::vector<TailTerm> tail);

    static RadialMeasure zero(int dimension);
    /// Uniform density on B(0, radius) with the given total mass.
    static RadialMeasure uniform_ball(int dimension, double radius, double total_mass);
    /// Lebesgue measure restricted to B(0, radius).
    static RadialMeasure lebesgue_ball(int dimension, double radius);
    /// Compactly supported measure with volume density f(|x|) on B(0, support),
    /// sampled on `knots` log-spaced knots plus the origin head.
    static RadialMeasure from_density(int dimension, const std::function<double(double)>& f,
                                      double support, int knots = 400);
    /// Knot list ending at r_last followed by the single tail term (a, b, c) with a fitted
    /// so the tail matches the last knot.
    static RadialMeasure with_power_tail(int dimension, std::vector<Knot> knots, double b, double c);

    int dimension() const noexcept { return n_; }
    std::span<const Knot> knots() const noexcept { return knots_; }
    std::span<const TailTerm> tail() const noexcept { return tail_; }
    double last_radius() const noexcept { return knots_.back().radius; }

    /// sigma(B(0, rho)).
    double cumulative(double rho) const;
    /// d/drho sigma(B(0, rho)).
    double derivative(double rho) const;

    bool is_zero() const noexcept;
    bool has_finite_total_mass() const noexcept;
    /// Total mass; only meaningful when has_finite_total_mass().
    double total_mass() const noexcept { return knots_.back().mass; }
    /// Exponent b of the fastest-growing tail term (0 for compact support).
    double tail_growth_exponent() const noexcept;

private:
    int n_;
    std::vector<Knot> knots_;
    std::vector<TailTerm> tail_;
};

/// Nonnegative density sampled on the nodes of a GridGeometry.
class GridMeasure {
public:
    GridMeasure(GridGeometry geometry, std::vector<double> density);
    static GridMeasure zero(const GridGeometry& geometry);
    /// Samples f(x) at every node.
    static GridMeasure sample(const GridGeometry& geometry,
                              const std::function<double(std::span<const double>)>& f);

    const GridGeometry& geometry() const noexcept { return geometry_; }
    int dimension() const noexcept { return geometry_.dimension(); }
    std::span<const double> density() const noexcept { return density_; }
    double total_mass() const noexcept;
    bool is_zero() const noexcept;

private:
    GridGeometry geometry_;
    std::vector<double> density_;
};

using Measure = std::variant<RadialMeasure, GridMeasure>;

constexpr double kUnboundedRadius = std::numeric_limits<double>::infinity();

int dimension_of(const Measure& m);

/// sigma(B(0, radius)); for grids, sums nodes with |x| <= radius. Throws DomainError
/// when the ball leaves the grid box.
double ball_mass(const Measure& m, double radius);

/// sigma restricted to B(0, R); R = kUnboundedRadius returns m unchanged.
RadialMeasure restrict_to_ball(const RadialMeasure& m, double R);
GridMeasure restrict_to_ball(const GridMeasure& m, double R);
Measure restrict_to_ball(const Measure& m, double R);

/// Restriction of m to B(0, k) intersected with {W_{1,p} m < k}.
///
/// The sublevel set is located on a radial Wolff profile and its shell edges are
/// refined by bisection to 1e-9 in radius; W = k counts as excluded.
RadialMeasure restrict_to_wolff_sublevel(const RadialMeasure& m, double k, double p);

RadialMeasure scale(const RadialMeasure& m, double lambda);
GridMeasure scale(const GridMeasure& m, double lambda);
Measure scale(const Measure& m, double lambda);

/// Sum of two radial measures of the same dimension. Exact at the union of the knots
/// and beyond both last knots; where one summand is still in its power-n head or
/// already in its curved tail, the sum is resampled at 32 points per decade.
RadialMeasure add(const RadialMeasure& a, const RadialMeasure& b);

/// Radial measure with cumulative function `mass` sampled at the given radii,
/// linear between them; `tail` must continue the last sample.
RadialMeasure resample(int dimension, const std::function<double(double)>& mass,
                       std::vector<double> radii, std::vector<TailTerm> tail);

/// Log-spaced radii in [lo, hi] with `per_decade` points per decade (both ends included).
std::vector<double> log_spaced(double lo, double hi, int per_decade);

} // namespace nlpot
