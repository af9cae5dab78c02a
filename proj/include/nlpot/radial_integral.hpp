#pragma once

#include <span>
#include <vector>

#include "nlpot/measure.hpp"
#include "nlpot/numeric.hpp"

namespace nlpot {

/// F(r) = integral over [r, inf) of (M(t) / t^e)^gamma dt/t for a radial measure
/// with cumulative mass M, on a panel set fixed at construction.
///
/// Panels are the knot radii plus the extra breakpoints that fall inside
/// [r_1, r_last]; each panel is cut into log pieces no wider than ln 2 with a
/// 20-point Gauss-Legendre rule in ln t. A panel whose left end carries zero mass
/// is graded geometrically toward that end. Below r_1 the integral is closed-form,
/// beyond r_last the analytic tail takes over.
///
/// Two measures with the same knot radii and the same extra breakpoints are
/// integrated with identical nodes and weights, so M <= M~ at the nodes gives
/// F <= F~ at every breakpoint without quadrature error.
class RadialTailIntegral {
public:
    RadialTailIntegral(const RadialMeasure& m, double exponent, double power,
                       std::span<const double> extra_breakpoints = {});

    /// F(r) for any r >= 0; +inf marker when the tail diverges.
    ExtendedReal at(double r) const;

    /// F(0): the full integral.
    ExtendedReal total() const { return at(0.0); }

    /// Integral over [1, max(1, r_last)] on the same panels.
    double core_from_one() const;

    /// Integral over [r_last, inf) from the analytic tail.
    ExtendedReal tail() const { return tail_; }

private:
    double head(double r) const;
    double panel(double a, double b) const;

    RadialMeasure m_;
    double e_;
    double gamma_;
    std::vector<double> edges_;
    std::vector<double> suffix_; ///< integral from edges_[i] to r_last
    ExtendedReal tail_;
};

} // namespace nlpot
