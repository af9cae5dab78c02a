#include "nlpot/radial_integral.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "nlpot/quadrature.hpp"

namespace nlpot {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kGradedLevels = 64;
using Rule = boost::math::quadrature::gauss<double, 20>;

} // namespace

RadialTailIntegral::RadialTailIntegral(const RadialMeasure& m, double exponent, double power,
                                       std::span<const double> extra_breakpoints)
    : m_(m), e_(exponent), gamma_(power) {
    const double r1 = m_.knots().front().radius;
    const double rl = m_.last_radius();
    for (const auto& k : m_.knots()) edges_.push_back(k.radius);
    for (double b : extra_breakpoints)
        if (b > r1 && b < rl) edges_.push_back(b);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

    suffix_.assign(edges_.size(), 0.0);
    for (std::size_t i = edges_.size() - 1; i-- > 0;) suffix_[i] = suffix_[i + 1] + panel(edges_[i], edges_[i + 1]);
    tail_ = quad::power_log_tail_integral(m_.tail(), e_, gamma_, rl);
}

double RadialTailIntegral::head(double r) const {
    // M(t) = m_1 (t / r_1)^n below the first knot
    const Knot& k = m_.knots().front();
    if (k.mass == 0.0 || r >= k.radius) return 0.0;
    const int n = m_.dimension();
    const double kappa = (n - e_) * gamma_;
    const double coef = std::pow(k.mass / std::pow(k.radius, e_), gamma_);
    return coef * (1.0 - std::pow(r / k.radius, kappa)) / kappa;
}

double RadialTailIntegral::panel(double a, double b) const {
    auto f = [this](double t) { return std::pow(m_.cumulative(t) / std::pow(t, e_), gamma_); };
    const double ma = m_.cumulative(a);
    if (ma == 0.0) {
        if (m_.cumulative(b) == 0.0) return 0.0;
        // M vanishes linearly at a: grade toward a so every piece is smooth
        double sum = 0.0;
        double hi = b;
        const double len = b - a;
        for (int k = 0; k < kGradedLevels; ++k) {
            const double lo = a + len * std::ldexp(1.0, -(k + 1));
            const double part = Rule::integrate([&](double t) { return f(t) / t; }, lo, hi);
            sum += part;
            hi = lo;
            if (part <= 1e-17 * sum) break;
        }
        return sum;
    }
    const double sa = std::log(a), sb = std::log(b);
    const int pieces = std::max(1, static_cast<int>(std::ceil((sb - sa) / kLn2 - 1e-12)));
    const double ds = (sb - sa) / pieces;
    auto g = [&f](double s) { return f(std::exp(s)); };
    double sum = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double lo = sa + k * ds;
        const double hi = (k + 1 == pieces) ? sb : lo + ds;
        sum += Rule::integrate(g, lo, hi);
    }
    return sum;
}

ExtendedReal RadialTailIntegral::at(double r) const {
    const double rl = m_.last_radius();
    if (r >= rl) {
        if (r == rl) return tail_;
        return quad::power_log_tail_integral(m_.tail(), e_, gamma_, r);
    }
    if (tail_.is_infinite()) return ExtendedReal::infinite();
    const double r1 = edges_.front();
    if (r < r1) return ExtendedReal(tail_.value() + (suffix_.front() + head(r)));
    auto it = std::upper_bound(edges_.begin(), edges_.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
    double inner = suffix_[i];
    if (edges_[i] != r) inner = suffix_[i + 1] + panel(r, edges_[i + 1]);
    return ExtendedReal(tail_.value() + inner);
}

double RadialTailIntegral::core_from_one() const {
    const double rl = m_.last_radius();
    if (rl <= 1.0) return 0.0;
    const double r1 = edges_.front();
    if (1.0 < r1) return suffix_.front() + head(1.0);
    auto it = std::upper_bound(edges_.begin(), edges_.end(), 1.0);
    const std::size_t i = static_cast<std::size_t>(it - edges_.begin()) - 1;
    if (edges_[i] == 1.0) return suffix_[i];
    return suffix_[i + 1] + panel(1.0, edges_[i + 1]);
}

} // namespace nlpot
