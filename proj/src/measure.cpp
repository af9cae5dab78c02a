#include "nlpot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"

namespace nlpot {

namespace {

constexpr double kTailMatchTol = 1e-12;
constexpr int kDensePerDecade = 32;

bool constant_tail(std::span<const TailTerm> tail) {
    return std::all_of(tail.begin(), tail.end(),
                       [](const TailTerm& t) { return t.a == 0.0 || (t.b == 0.0 && t.c == 0.0); });
}

double tail_sum(std::span<const TailTerm> tail, double rho) {
    double s = 0.0;
    for (const auto& t : tail) s += t.value(rho);
    return s;
}

} // namespace

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
    if (!(hi > lo) || lo <= 0.0) return {lo};
    const int count = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    std::vector<double> r(count);
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) r[i] = lo * std::exp(step * i);
    r.front() = lo;
    r.back() = hi;
    return r;
}

RadialMeasure::RadialMeasure(int dimension, std::vector<Knot> knots, std::vector<TailTerm> tail)
    : n_(dimension), knots_(std::move(knots)), tail_(std::move(tail)) {
    if (n_ < 2) throw InvariantError("radial measure: dimension must be at least 2");
    if (knots_.empty()) throw InvariantError("radial measure: at least one knot is required");
    double prev_r = 0.0, prev_m = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        if (!std::isfinite(k.radius) || !(k.radius > prev_r))
            throw InvariantError("radial measure: knot radii must be positive and strictly increasing (knot " +
                                 std::to_string(i) + ")");
        if (!std::isfinite(k.mass) || k.mass < 0.0)
            throw InvariantError("radial measure: negative or non-finite mass at knot " + std::to_string(i));
        if (k.mass < prev_m)
            throw InvariantError("radial measure: cumulative mass decreases at knot " + std::to_string(i));
        prev_r = k.radius;
        prev_m = k.mass;
    }
    const double r_last = knots_.back().radius;
    for (const auto& t : tail_) {
        if (!(t.a >= 0.0) || !std::isfinite(t.a) || !std::isfinite(t.b) || !std::isfinite(t.c))
            throw InvariantError("radial measure: tail coefficients must be finite with a >= 0");
        if (t.a == 0.0) continue;
        if (t.b < 0.0) throw InvariantError("radial measure: tail exponent b must be >= 0");
        if (t.c != 0.0) {
            if (r_last <= 1.0)
                throw InvariantError("radial measure: a logarithmic tail needs the last knot beyond radius 1");
            if (t.b * std::log(r_last) < t.c - 1e-12)
                throw InvariantError("radial measure: tail term decreases beyond the last knot");
        }
    }
    const double m_last = knots_.back().mass;
    const double t_last = tail_sum(tail_, r_last);
    if (std::abs(t_last - m_last) > kTailMatchTol * std::max(std::abs(m_last), 0.0) &&
        !(m_last == 0.0 && t_last == 0.0))
        throw InvariantError("radial measure: tail does not match the last knot mass (" +
                             format_double(t_last) + " vs " + format_double(m_last) + ")");
}

RadialMeasure RadialMeasure::zero(int dimension) {
    return RadialMeasure(dimension, {{1.0, 0.0}}, {});
}

RadialMeasure RadialMeasure::uniform_ball(int dimension, double radius, double total_mass) {
    if (!(radius > 0.0)) throw DomainError("uniform_ball: radius must be positive");
    return RadialMeasure(dimension, {{radius, total_mass}}, {{total_mass, 0.0, 0.0}});
}

RadialMeasure RadialMeasure::lebesgue_ball(int dimension, double radius) {
    return uniform_ball(dimension, radius, ball_volume(dimension) * std::pow(radius, dimension));
}

RadialMeasure RadialMeasure::from_density(int dimension, const std::function<double(double)>& f,
                                          double support, int knots) {
    if (!(support > 0.0) || knots < 2) throw DomainError("from_density: bad support or knot count");
    const double area = sphere_area(dimension);
    auto shell = [&](double t) { return area * f(t) * std::pow(t, dimension - 1); };
    std::vector<Knot> out;
    out.reserve(knots);
    const double first = 1e-3 * support;
    const double step = std::log(support / first) / (knots - 1);
    double mass = quad::gauss_legendre(shell, 0.0, first);
    double prev = first;
    out.push_back({first, mass});
    for (int i = 1; i < knots; ++i) {
        const double r = (i + 1 == knots) ? support : first * std::exp(step * i);
        mass += quad::gauss_legendre(shell, prev, r);
        out.push_back({r, std::max(mass, out.back().mass)});
        prev = r;
    }
    const double total = out.back().mass;
    return RadialMeasure(dimension, std::move(out), {{total, 0.0, 0.0}});
}

RadialMeasure RadialMeasure::with_power_tail(int dimension, std::vector<Knot> knots, double b, double c) {
    if (knots.empty()) throw InvariantError("with_power_tail: knots required");
    const Knot last = knots.back();
    double a = last.mass / std::pow(last.radius, b);
    if (c != 0.0) a *= std::pow(std::log(last.radius), c);
    return RadialMeasure(dimension, std::move(knots), {{a, b, c}});
}

double RadialMeasure::cumulative(double rho) const {
    if (!(rho > 0.0)) return 0.0;
    const Knot& first = knots_.front();
    if (rho <= first.radius) return first.mass * std::pow(rho / first.radius, n_);
    const Knot& last = knots_.back();
    if (rho >= last.radius) return rho == last.radius ? last.mass : tail_sum(tail_, rho);
    auto it = std::upper_bound(knots_.begin(), knots_.end(), rho,
                               [](double r, const Knot& k) { return r < k.radius; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const double theta = (rho - lo.radius) / (hi.radius - lo.radius);
    return lo.mass + theta * (hi.mass - lo.mass);
}

double RadialMeasure::derivative(double rho) const {
    if (!(rho > 0.0)) return 0.0;
    const Knot& first = knots_.front();
    if (rho < first.radius)
        return n_ * first.mass * std::pow(rho, n_ - 1) / std::pow(first.radius, n_);
    if (rho >= knots_.back().radius) {
        double d = 0.0;
        for (const auto& t : tail_) d += t.derivative(rho);
        return d;
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), rho,
                               [](double r, const Knot& k) { return r < k.radius; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    return (hi.mass - lo.mass) / (hi.radius - lo.radius);
}

bool RadialMeasure::is_zero() const noexcept {
    if (knots_.back().mass != 0.0) return false;
    return std::all_of(tail_.begin(), tail_.end(), [](const TailTerm& t) { return t.a == 0.0; });
}

bool RadialMeasure::has_finite_total_mass() const noexcept { return constant_tail(tail_); }

double RadialMeasure::tail_growth_exponent() const noexcept {
    double b = 0.0;
    for (const auto& t : tail_)
        if (t.a > 0.0) b = std::max(b, t.b);
    return b;
}

GridMeasure::GridMeasure(GridGeometry geometry, std::vector<double> density)
    : geometry_(std::move(geometry)), density_(std::move(density)) {
    if (density_.size() != geometry_.size())
        throw InvariantError("grid measure: density has " + std::to_string(density_.size()) +
                             " samples, grid has " + std::to_string(geometry_.size()));
    for (std::size_t i = 0; i < density_.size(); ++i)
        if (!std::isfinite(density_[i]) || density_[i] < 0.0)
            throw InvariantError("grid measure: negative or non-finite density at node " + std::to_string(i));
}

GridMeasure GridMeasure::zero(const GridGeometry& geometry) {
    return GridMeasure(geometry, std::vector<double>(geometry.size(), 0.0));
}

GridMeasure GridMeasure::sample(const GridGeometry& geometry,
                                const std::function<double(std::span<const double>)>& f) {
    std::vector<double> d(geometry.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = geometry.position(i);
        d[i] = f(std::span<const double>(x.data(), geometry.dimension()));
    }
    return GridMeasure(geometry, std::move(d));
}

double GridMeasure::total_mass() const noexcept {
    double s = 0.0;
    for (double v : density_) s += v;
    return s * geometry_.cell_volume();
}

bool GridMeasure::is_zero() const noexcept {
    return std::all_of(density_.begin(), density_.end(), [](double v) { return v == 0.0; });
}

int dimension_of(const Measure& m) {
    return std::visit([](const auto& x) { return x.dimension(); }, m);
}

double ball_mass(const Measure& m, double radius) {
    if (!(radius > 0.0)) throw DomainError("ball_mass: radius must be positive");
    if (const auto* r = std::get_if<RadialMeasure>(&m)) return r->cumulative(radius);
    const auto& g = std::get<GridMeasure>(m);
    const auto& geo = g.geometry();
    if (radius > geo.half_width() * (1.0 + 1e-12))
        throw DomainError("ball_mass: ball of radius " + format_double(radius) + " exceeds the grid box");
    const double lim = radius * (1.0 + 1e-12);
    double s = 0.0;
    const auto dens = g.density();
    for (std::size_t i = 0; i < geo.size(); ++i)
        if (dens[i] != 0.0 && geo.radius(i) <= lim) s += dens[i];
    return s * geo.cell_volume();
}

RadialMeasure resample(int dimension, const std::function<double(double)>& mass,
                       std::vector<double> radii, std::vector<TailTerm> tail) {
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    radii.erase(std::remove_if(radii.begin(), radii.end(), [](double r) { return !(r > 0.0); }), radii.end());
    std::vector<Knot> knots;
    knots.reserve(radii.size());
    double prev = 0.0;
    for (double r : radii) {
        const double m = std::max(prev, mass(r));
        knots.push_back({r, m});
        prev = m;
    }
    return RadialMeasure(dimension, std::move(knots), std::move(tail));
}

RadialMeasure restrict_to_ball(const RadialMeasure& m, double R) {
    if (std::isinf(R)) return m;
    if (!(R > 0.0)) throw DomainError("restrict_to_ball: radius must be positive");
    std::vector<double> radii;
    for (const auto& k : m.knots())
        if (k.radius < R) radii.push_back(k.radius);
    radii.push_back(R);
    if (R > m.last_radius() && !constant_tail(m.tail())) {
        auto extra = log_spaced(m.last_radius(), R, kDensePerDecade);
        radii.insert(radii.end(), extra.begin(), extra.end());
    }
    const double total = m.cumulative(R);
    return resample(m.dimension(), [&](double r) { return m.cumulative(std::min(r, R)); }, std::move(radii),
                    {{total, 0.0, 0.0}});
}

GridMeasure restrict_to_ball(const GridMeasure& m, double R) {
    if (std::isinf(R)) return m;
    if (!(R > 0.0)) throw DomainError("restrict_to_ball: radius must be positive");
    const auto& geo = m.geometry();
    std::vector<double> d(m.density().begin(), m.density().end());
    const double lim = R * (1.0 + 1e-12);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (geo.radius(i) > lim) d[i] = 0.0;
    return GridMeasure(geo, std::move(d));
}

Measure restrict_to_ball(const Measure& m, double R) {
    return std::visit([R](const auto& x) -> Measure { return restrict_to_ball(x, R); }, m);
}

RadialMeasure scale(const RadialMeasure& m, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("scale: lambda must be positive");
    std::vector<Knot> knots(m.knots().begin(), m.knots().end());
    for (auto& k : knots) k.mass *= lambda;
    std::vector<TailTerm> tail(m.tail().begin(), m.tail().end());
    for (auto& t : tail) t.a *= lambda;
    return RadialMeasure(m.dimension(), std::move(knots), std::move(tail));
}

GridMeasure scale(const GridMeasure& m, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("scale: lambda must be positive");
    std::vector<double> d(m.density().begin(), m.density().end());
    for (auto& v : d) v *= lambda;
    return GridMeasure(m.geometry(), std::move(d));
}

Measure scale(const Measure& m, double lambda) {
    return std::visit([lambda](const auto& x) -> Measure { return scale(x, lambda); }, m);
}

RadialMeasure add(const RadialMeasure& a, const RadialMeasure& b) {
    if (a.dimension() != b.dimension()) throw DomainError("add: dimension mismatch");
    std::vector<double> radii;
    for (const auto& k : a.knots()) radii.push_back(k.radius);
    for (const auto& k : b.knots()) radii.push_back(k.radius);

    // the union knots are linear in between; densify where one summand is still in
    // its power-n head or its curved tail
    const double r1a = a.knots().front().radius, r1b = b.knots().front().radius;
    if (r1a != r1b) {
        const auto& later = r1a > r1b ? a : b;
        if (later.knots().front().mass > 0.0) {
            auto extra = log_spaced(std::min(r1a, r1b), std::max(r1a, r1b), kDensePerDecade);
            radii.insert(radii.end(), extra.begin(), extra.end());
        }
    }
    const double rka = a.last_radius(), rkb = b.last_radius();
    if (rka != rkb) {
        const auto& earlier = rka < rkb ? a : b;
        if (!constant_tail(earlier.tail())) {
            auto extra = log_spaced(std::min(rka, rkb), std::max(rka, rkb), kDensePerDecade);
            radii.insert(radii.end(), extra.begin(), extra.end());
        }
    }
    std::vector<TailTerm> tail(a.tail().begin(), a.tail().end());
    tail.insert(tail.end(), b.tail().begin(), b.tail().end());
    // merge constant terms so the tail stays compact under repeated addition
    double constant = 0.0;
    std::vector<TailTerm> merged;
    for (const auto& t : tail) {
        if (t.a == 0.0) continue;
        if (t.b == 0.0 && t.c == 0.0)
            constant += t.a;
        else
            merged.push_back(t);
    }
    if (constant > 0.0) merged.insert(merged.begin(), TailTerm{constant, 0.0, 0.0});
    return resample(a.dimension(), [&](double r) { return a.cumulative(r) + b.cumulative(r); },
                    std::move(radii), std::move(merged));
}

} // namespace nlpot
