#include "nlpot/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "nlpot/parallel.hpp"
#include "nlpot/quadrature.hpp"
#include "nlpot/radial_integral.hpp"

namespace nlpot {

namespace {

constexpr int kMaxOffCenterBreakpoints = 48;
constexpr int kMaxCapSplits = 24;
constexpr int kUniformCapPanels = 16;
constexpr int kMinCapPanels = 4;
constexpr int kMaxKappaSplits = 32;
constexpr double kFarFactor = 1048576.0; // 2^20
constexpr int kSublevelMeshCount = 96;
constexpr double kBisectionTol = 1e-9;
constexpr double kSlopeBand = 0.05;

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

/// Fraction of the unit sphere S^{n-1} with polar angle below theta_0, where
/// x = sin^2(theta_0 / 2).
double cap_fraction(int n, double x) {
    x = std::clamp(x, 0.0, 1.0);
    switch (n) {
    case 2: return 2.0 * std::asin(std::sqrt(x)) / std::numbers::pi;
    case 3: return x;
    case 4: {
        const double th = 2.0 * std::asin(std::sqrt(x));
        return (th - std::sin(th) * std::cos(th)) / std::numbers::pi;
    }
    default: {
        const double a = 0.5 * (n - 1);
        return boost::math::ibeta(a, a, x);
    }
    }
}

std::vector<double> subsample(std::vector<double> v, std::size_t limit) {
    if (v.size() <= limit) return v;
    std::vector<double> out;
    out.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) out.push_back(v[(i * (v.size() - 1)) / (limit - 1)]);
    return out;
}

std::vector<double> knot_radii(const RadialMeasure& m) {
    std::vector<double> r;
    r.reserve(m.knots().size());
    for (const auto& k : m.knots()) r.push_back(k.radius);
    return r;
}

bool constant_tail(const RadialMeasure& m) { return m.has_finite_total_mass(); }

ExtendedReal radial_off_center(const RadialMeasure& m, PotentialKind kind, double r) {
    const double e = kind.exponent, g = kind.power;
    if (!quad::power_log_tail_converges(m.tail(), e, g)) return ExtendedReal::infinite();
    auto f = [&](double t) { return std::pow(off_center_ball_mass(m, r, t) / std::pow(t, e), g); };
    const auto radii = subsample(knot_radii(m), kMaxOffCenterBreakpoints);
    std::vector<double> bps{r};
    for (double rk : radii) {
        if (std::abs(r - rk) > 0.0) bps.push_back(std::abs(r - rk));
        bps.push_back(r + rk);
    }
    const double t_top = r + m.last_radius();
    const double near = quad::integrate_log_scale(f, t_top, bps);
    if (constant_tail(m)) {
        const quad::PowerLogTerm whole{m.total_mass(), 0.0, 0.0};
        const auto tail = quad::power_log_tail_integral(std::span(&whole, 1), e, g, t_top);
        return ExtendedReal(near + tail.value());
    }
    // beyond kFarFactor * t_top the ball is centered to within 2^-20 in relative radius
    const double t_far = kFarFactor * t_top;
    const double mid = quad::integrate_log_range(f, t_top, t_far, {});
    const auto far = quad::power_log_tail_integral(m.tail(), e, g, t_far);
    return ExtendedReal(near + mid) + far;
}

struct SupportNode {
    std::array<int, 3> index;
    double mass;
};

std::vector<SupportNode> support_nodes(const GridMeasure& g) {
    const auto& geo = g.geometry();
    const double vol = geo.cell_volume();
    std::vector<SupportNode> out;
    const auto d = g.density();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0.0) out.push_back({geo.multi_index(i), d[i] * vol});
    return out;
}

/// Exact integral of the lumped step function S(t) = sum of masses with distance <= t,
/// with the ball of radius h/2 around x carrying the local density instead.
class LumpedIntegrator {
public:
    LumpedIntegrator(int n, double h, PotentialKind kind) : n_(n), h_(h), kind_(kind) {
        t_min_ = 0.5 * h;
    }

    double near_term(double density) const {
        if (density <= 0.0) return 0.0;
        const double kappa = (n_ - kind_.exponent) * kind_.power;
        return std::pow(density * ball_volume(n_), kind_.power) * std::pow(t_min_, kappa) / kappa;
    }

    /// Sum over consecutive steps; `dist` sorted ascending and clamped below at t_min.
    double steps(std::span<const double> dist, std::span<const double> mass) const {
        const double eg = kind_.exponent * kind_.power;
        double sum = 0.0, S = 0.0;
        std::size_t i = 0;
        while (i < dist.size()) {
            const double a = dist[i];
            while (i < dist.size() && dist[i] == a) S += mass[i++];
            const double b = i < dist.size() ? dist[i] : 0.0;
            const double diff = i < dist.size() ? std::pow(a, -eg) - std::pow(b, -eg) : std::pow(a, -eg);
            sum += std::pow(S, kind_.power) * diff / eg;
        }
        return sum;
    }

    double t_min() const { return t_min_; }

private:
    int n_;
    double h_;
    PotentialKind kind_;
    double t_min_;
};

double grid_potential(const GridMeasure& g, PotentialKind kind, std::span<const double> x) {
    const auto& geo = g.geometry();
    const int n = geo.dimension();
    LumpedIntegrator li(n, geo.spacing(), kind);
    const auto d = g.density();
    std::vector<std::pair<double, double>> items;
    double near_density = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] <= 0.0) continue;
        const auto pos = geo.position(i);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += (pos[k] - x[k]) * (pos[k] - x[k]);
        double dist = std::sqrt(s);
        if (dist < li.t_min()) {
            near_density = d[i];
            dist = li.t_min();
        }
        items.emplace_back(dist, d[i] * geo.cell_volume());
    }
    if (items.empty()) return 0.0;
    std::sort(items.begin(), items.end());
    std::vector<double> dist(items.size()), mass(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) std::tie(dist[i], mass[i]) = items[i];
    return li.near_term(near_density) + li.steps(dist, mass);
}

std::vector<double> grid_potential_at_nodes(const GridMeasure& g, PotentialKind kind,
                                            std::span<const std::size_t> nodes) {
    const auto& geo = g.geometry();
    const int n = geo.dimension();
    const double h = geo.spacing();
    const auto support = support_nodes(g);
    const int P = geo.points_per_axis();
    const std::size_t max_k = static_cast<std::size_t>(n) * (P - 1) * (P - 1);
    LumpedIntegrator li(n, h, kind);
    std::vector<double> out(nodes.size(), 0.0);
    if (support.empty()) return out;
    parallel_for(nodes.size(), [&](std::size_t j) {
        // squared distances are h^2 times an integer: bucket masses by that integer
        std::vector<double> bucket(max_k + 1, 0.0);
        const auto c = geo.multi_index(nodes[j]);
        double self_density = 0.0;
        for (const auto& s : support) {
            std::size_t k2 = 0;
            for (int a = 0; a < n; ++a) {
                const long dd = s.index[a] - c[a];
                k2 += static_cast<std::size_t>(dd * dd);
            }
            bucket[k2] += s.mass;
            if (k2 == 0) self_density = s.mass / geo.cell_volume();
        }
        std::vector<double> dist, mass;
        for (std::size_t k2 = 0; k2 <= max_k; ++k2) {
            if (bucket[k2] == 0.0) continue;
            dist.push_back(k2 == 0 ? li.t_min() : h * std::sqrt(static_cast<double>(k2)));
            mass.push_back(bucket[k2]);
        }
        out[j] = li.near_term(self_density) + li.steps(dist, mass);
    });
    return out;
}

} // namespace

void require_exponent(double p, int n) {
    if (!(p > 1.0) || !(p < n))
        throw DomainError("exponent p = " + format_double(p) + " must satisfy 1 < p < n = " + std::to_string(n));
}

double off_center_ball_mass(const RadialMeasure& m, double r, double t) {
    if (!(t > 0.0)) return 0.0;
    if (r == 0.0) return m.cumulative(t);
    const int n = m.dimension();
    const double lo = std::abs(r - t), hi = r + t;
    const double base = t > r ? m.cumulative(t - r) : 0.0;

    // spheres of radius rho in (lo, hi) meet the ball in a cap; rho = mid - half cos(phi)
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    auto integrand = [&](double phi) {
        const double rho = mid - half * std::cos(phi);
        if (!(rho > 0.0)) return 0.0;
        const double x = (t - rho + r) * (t + rho - r) / (4.0 * rho * r);
        return cap_fraction(n, x) * m.derivative(rho) * half * std::sin(phi);
    };
    std::vector<double> cuts;
    for (int i = 0; i <= kMinCapPanels; ++i) cuts.push_back(std::numbers::pi * i / kMinCapPanels);
    std::vector<double> inside;
    for (const auto& k : m.knots())
        if (k.radius > lo && k.radius < hi) inside.push_back(k.radius);
    if (static_cast<int>(inside.size()) <= kMaxCapSplits) {
        for (double rk : inside) cuts.push_back(std::acos(std::clamp((mid - rk) / half, -1.0, 1.0)));
    } else {
        for (int i = 1; i < kUniformCapPanels; ++i) cuts.push_back(std::numbers::pi * i / kUniformCapPanels);
    }
    std::sort(cuts.begin(), cuts.end());
    double shell = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i])
            shell += boost::math::quadrature::gauss<double, 10>::integrate(integrand, cuts[i], cuts[i + 1]);
    // the ball never holds more than B(0, r + t)
    return std::min(base + shell, m.cumulative(hi));
}

ExtendedReal potential(const Measure& m, PotentialKind kind, std::span<const double> x) {
    const int n = dimension_of(m);
    if (static_cast<int>(x.size()) != n)
        throw DomainError("potential: point has " + std::to_string(x.size()) + " coordinates, measure dimension is " +
                          std::to_string(n));
    if (const auto* rm = std::get_if<RadialMeasure>(&m)) {
        if (rm->is_zero()) return ExtendedReal(0.0);
        const double r = norm(x);
        if (r == 0.0) return RadialTailIntegral(*rm, kind.exponent, kind.power).total();
        return radial_off_center(*rm, kind, r);
    }
    const auto& g = std::get<GridMeasure>(m);
    const double L = g.geometry().half_width();
    for (double c : x)
        if (std::abs(c) > L * (1.0 + 1e-12)) throw DomainError("potential: evaluation point outside the grid box");
    return ExtendedReal(grid_potential(g, kind, x));
}

ExtendedReal wolff_potential(const Measure& m, double p, std::span<const double> x) {
    const int n = dimension_of(m);
    require_exponent(p, n);
    return potential(m, PotentialKind::wolff(p, n), x);
}

ExtendedReal riesz_potential(const Measure& m, std::span<const double> x) {
    return potential(m, PotentialKind::riesz_first_order(dimension_of(m)), x);
}

RadialProfile wolff_radial_profile(const RadialMeasure& m, double p, std::span<const double> mesh) {
    const int n = m.dimension();
    require_exponent(p, n);
    const auto fin = check_finiteness(m, p);
    if (!fin.finite) throw FinitenessError(fin);
    RadialProfile prof;
    prof.radii.assign(mesh.begin(), mesh.end());
    prof.values.assign(mesh.size(), 0.0);
    prof.dimension = n;
    prof.label = "wolff";
    const double gamma = 1.0 / (p - 1.0);
    prof.tail_exponent = m.has_finite_total_mass() ? (p - n) * gamma : (m.tail_growth_exponent() - (n - p)) * gamma;
    if (!m.is_zero()) {
        const Measure mm = m;
        parallel_for(mesh.size(), [&](std::size_t i) {
            std::vector<double> x(n, 0.0);
            x[0] = mesh[i];
            const auto w = wolff_potential(mm, p, x);
            if (w.is_infinite()) throw NumericalError("Wolff potential infinite at r = " + format_double(mesh[i]));
            prof.values[i] = w.value();
        });
    }
    prof.validate();
    return prof;
}

std::vector<double> wolff_at_nodes(const GridMeasure& m, double p, std::span<const std::size_t> nodes) {
    require_exponent(p, m.dimension());
    return grid_potential_at_nodes(m, PotentialKind::wolff(p, m.dimension()), nodes);
}

FinitenessReport check_finiteness(const RadialMeasure& m, double p) {
    const int n = m.dimension();
    require_exponent(p, n);
    const double e = n - p, gamma = 1.0 / (p - 1.0);
    FinitenessReport rep;
    if (m.last_radius() > 1.0) {
        RadialTailIntegral eng(m, e, gamma);
        rep.core = eng.core_from_one();
        rep.analytic_tail = eng.tail();
    } else {
        rep.core = 0.0;
        rep.analytic_tail = quad::power_log_tail_integral(m.tail(), e, gamma, 1.0);
    }
    rep.tail_integral = ExtendedReal(rep.core) + rep.analytic_tail;
    rep.finite = rep.tail_integral.is_finite();
    return rep;
}

RadialMeasure restrict_to_wolff_sublevel(const RadialMeasure& m, double k, double p) {
    const int n = m.dimension();
    require_exponent(p, n);
    if (!(k > 0.0)) throw DomainError("restrict_to_wolff_sublevel: k must be positive");
    if (m.is_zero()) return m;
    const auto fin = check_finiteness(m, p);
    if (!fin.finite) throw FinitenessError(fin);

    const Measure mm = m;
    auto W = [&](double r) {
        std::vector<double> x(n, 0.0);
        x[0] = r;
        return wolff_potential(mm, p, x).value();
    };
    const auto mesh = radial_mesh(1e-4 * k, k, kSublevelMeshCount);
    const auto prof = wolff_radial_profile(m, p, mesh);
    std::vector<bool> in(mesh.size());
    bool all_in = true;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        in[i] = prof.values[i] < k;
        all_in = all_in && in[i];
    }
    if (all_in) return restrict_to_ball(m, k);

    // shells [alpha, beta] of {W < k} within [0, k]
    std::vector<std::pair<double, double>> shells;
    bool is_open = in[0];
    double open_at = 0.0;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        if (in[i] == in[i + 1]) continue;
        double a = mesh[i], b = mesh[i + 1];
        while (b - a > kBisectionTol * std::max(1.0, b)) {
            const double c = 0.5 * (a + b);
            ((W(c) < k) == in[i] ? a : b) = c;
        }
        const double edge = 0.5 * (a + b);
        if (in[i])
            shells.emplace_back(open_at, edge);
        else
            open_at = edge;
        is_open = !in[i];
    }
    if (is_open) shells.emplace_back(open_at, k);

    auto mass = [&](double rho) {
        double s = 0.0;
        for (const auto& [a, b] : shells) {
            if (rho <= a) break;
            s += m.cumulative(std::min(rho, b)) - m.cumulative(a);
        }
        return s;
    };
    std::vector<double> radii;
    for (const auto& kn : m.knots())
        if (kn.radius < k) radii.push_back(kn.radius);
    radii.push_back(k);
    const double r1 = m.knots().front().radius;
    for (const auto& [a, b] : shells) {
        if (a > 0.0) radii.push_back(a);
        radii.push_back(b);
        if (a < r1) {
            // the head is a power law, not linear: densify it
            auto extra = log_spaced(std::max(a, 1e-6 * r1), std::min(b, r1), 32);
            radii.insert(radii.end(), extra.begin(), extra.end());
        }
    }
    if (k > m.last_radius() && !m.has_finite_total_mass()) {
        auto extra = log_spaced(m.last_radius(), k, 32);
        radii.insert(radii.end(), extra.begin(), extra.end());
    }
    const double total = mass(k);
    return resample(n, mass, std::move(radii), {{total, 0.0, 0.0}});
}

// ---------------------------------------------------------------------------
// kappa

namespace {

/// Integral over B(xi e, R) of |x - eta e|^(-s) d sigma(x) for a radial sigma,
/// with xi >= 0 and the Dirac position eta signed along the same axis.
double radial_dirac_moment(const RadialMeasure& m, double xi, double R, double eta, double s) {
    const int n = m.dimension();
    const double Zn = std::sqrt(std::numbers::pi) * gamma_half_integer(n - 1) / gamma_half_integer(n);

    // sphere average of 1_B |x - y|^(-s) at radius rho
    auto sphere_avg = [&](double rho) -> double {
        // below this radius the shell carries no representable mass
        if (!(rho > 1e-150)) return 0.0;
        double U; // 1 - cos(theta*), in [0, 2]
        if (xi == 0.0) {
            if (rho > R) return 0.0;
            U = 2.0;
        } else {
            U = (R - rho + xi) * (R + rho - xi) / (2.0 * rho * xi);
            if (U <= 0.0) return 0.0;
            U = std::min(U, 2.0);
        }
        const double D1 = (rho - eta) * (rho - eta);
        const double B = 2.0 * rho * eta;
        if (n == 3) {
            // (1/2) int_0^U (D1 + B u)^(-s/2) du
            const double a = 1.0 - 0.5 * s;
            if (D1 == 0.0) return 0.5 * std::pow(B * U, a) / (B * a);
            const double z = std::max(-1.0, B * U / D1); // D1 + B U >= 0 up to rounding
            if (z == 0.0) return 0.5 * U * std::pow(D1, -0.5 * s);
            return 0.5 * std::pow(D1, -0.5 * s) * U * std::expm1(a * std::log1p(z)) / (a * z);
        }
        const double th = 2.0 * std::asin(std::sqrt(0.5 * U));
        auto f = [&](double theta) {
            const double sh = std::sin(0.5 * theta);
            const double d2 = D1 + 2.0 * B * sh * sh;
            return std::pow(std::sin(theta), n - 2) * std::pow(d2, -0.5 * s);
        };
        boost::math::quadrature::tanh_sinh<double> ts;
        return ts.integrate(f, 0.0, th, 1e-10) / Zn;
    };

    const double lo = std::max(0.0, xi - R), hi = xi + R;
    std::vector<double> cuts{lo, hi};
    auto radii = subsample(knot_radii(m), kMaxKappaSplits);
    for (double r : radii)
        if (r > lo && r < hi) cuts.push_back(r);
    for (double c : {std::abs(R - xi), std::abs(eta)})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    boost::math::quadrature::tanh_sinh<double> outer;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto g = [&](double rho) { return m.derivative(rho) * sphere_avg(rho); };
        total += outer.integrate(g, cuts[i], cuts[i + 1], 1e-9);
    }
    return total;
}

struct AxisFrame {
    double xi;                  ///< |center|
    std::vector<double> axis;   ///< unit vector, empty when the center is the origin
};

double signed_axis_position(const AxisFrame& f, std::span<const double> y, int n) {
    const double ny = norm(y);
    if (f.axis.empty()) return ny;
    double dot = 0.0;
    for (int k = 0; k < n; ++k) dot += f.axis[k] * y[k];
    double off = 0.0;
    for (int k = 0; k < n; ++k) off += std::pow(y[k] - dot * f.axis[k], 2);
    if (std::sqrt(off) > 1e-9 * (1.0 + ny))
        throw DomainError("kappa_lower_bound: radial measures need samples on the line through 0 and the ball center");
    return dot;
}

KappaEstimate kappa_radial(const RadialMeasure& m, const Ball& ball, double p, double q,
                           std::span<const std::vector<double>> samples) {
    const int n = m.dimension();
    const double a = (n - p) / (p - 1.0);
    const double cdelta = (p - 1.0) / (n - p);
    const double s = q * a;
    KappaEstimate est;
    est.ball = ball;

    AxisFrame frame;
    frame.xi = norm(ball.center);
    if (frame.xi > 0.0)
        for (double c : ball.center) frame.axis.push_back(c / frame.xi);

    for (const auto& y : samples) {
        if (static_cast<int>(y.size()) != n) throw DomainError("kappa_lower_bound: sample dimension mismatch");
        const double eta = signed_axis_position(frame, y, n);
        const double I = m.is_zero() ? 0.0 : radial_dirac_moment(m, frame.xi, ball.radius, eta, s);
        std::string where = "dirac at (";
        for (std::size_t k = 0; k < y.size(); ++k) where += (k ? "," : "") + format_double(y[k]);
        est.candidates.push_back({where + ")", cdelta * std::pow(I, 1.0 / q)});
    }

    if (frame.xi == 0.0) {
        const double total = m.cumulative(ball.radius);
        if (total > 0.0) {
            const RadialMeasure mb = restrict_to_ball(m, ball.radius);
            const Measure mbm = mb;
            const double gamma = 1.0 / (p - 1.0);
            // mass-quantile rule: rho(u) inverts M on [0, R]
            auto rho_of = [&](double u) {
                double lo = 0.0, hi = ball.radius;
                for (int it = 0; it < 80; ++it) {
                    const double c = 0.5 * (lo + hi);
                    (m.cumulative(c) < u ? lo : hi) = c;
                }
                return 0.5 * (lo + hi);
            };
            using Rule = boost::math::quadrature::gauss<double, 8>;
            const auto& xs = Rule::abscissa();
            const auto& ws = Rule::weights();
            std::vector<double> us, wts;
            for (int piece = 0; piece < 2; ++piece) {
                const double ulo = 0.5 * piece * total, uhi = ulo + 0.5 * total;
                const double mid = 0.5 * (ulo + uhi), half = 0.5 * (uhi - ulo);
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    for (int sign : {-1, 1}) {
                        if (xs[i] == 0.0 && sign > 0) continue;
                        us.push_back(mid + sign * half * xs[i]);
                        wts.push_back(half * ws[i]);
                    }
                }
            }
            std::vector<double> vals(us.size());
            parallel_for(us.size(), [&](std::size_t i) {
                std::vector<double> x(n, 0.0);
                x[0] = rho_of(us[i]);
                const double w = wolff_potential(mbm, p, x).value() * std::pow(total, -gamma);
                vals[i] = std::pow(w, q);
            });
            double integral = 0.0;
            for (std::size_t i = 0; i < vals.size(); ++i) integral += wts[i] * vals[i];
            est.candidates.push_back({"sigma_B itself", std::pow(integral, 1.0 / q)});
        }
    }
    return est;
}

KappaEstimate kappa_grid(const GridMeasure& g, const Ball& ball, double p, double q,
                         std::span<const std::vector<double>> samples) {
    const auto& geo = g.geometry();
    const int n = geo.dimension();
    const double a = (n - p) / (p - 1.0);
    const double cdelta = (p - 1.0) / (n - p);
    const double s = q * a;
    const double vol = geo.cell_volume();
    const double r_h = std::pow(vol / ball_volume(n), 1.0 / n);
    KappaEstimate est;
    est.ball = ball;

    std::vector<std::size_t> inside;
    const auto d = g.density();
    const double lim = ball.radius * (1.0 + 1e-12);
    for (std::size_t i = 0; i < geo.size(); ++i) {
        const auto pos = geo.position(i);
        double s2 = 0.0;
        for (int k = 0; k < n; ++k) s2 += std::pow(pos[k] - ball.center[k], 2);
        if (std::sqrt(s2) <= lim) inside.push_back(i);
    }
    for (const auto& y : samples) {
        if (static_cast<int>(y.size()) != n) throw DomainError("kappa_lower_bound: sample dimension mismatch");
        double I = 0.0;
        for (std::size_t i : inside) {
            if (d[i] == 0.0) continue;
            const auto pos = geo.position(i);
            double s2 = 0.0;
            for (int k = 0; k < n; ++k) s2 += std::pow(pos[k] - y[k], 2);
            const double dist = std::sqrt(s2);
            // the cell holding y contributes its average of |z|^(-s) over a ball of volume h^n
            const double kernel = dist < 0.5 * geo.spacing() ? n * std::pow(r_h, -s) / (n - s) : std::pow(dist, -s);
            I += d[i] * vol * kernel;
        }
        std::string where = "dirac at (";
        for (std::size_t k = 0; k < y.size(); ++k) where += (k ? "," : "") + format_double(y[k]);
        est.candidates.push_back({where + ")", cdelta * std::pow(I, 1.0 / q)});
    }
    constexpr std::size_t kMaxSigmaBNodes = 3000;
    if (!inside.empty() && inside.size() <= kMaxSigmaBNodes) {
        std::vector<double> db(geo.size(), 0.0);
        double total = 0.0;
        for (std::size_t i : inside) {
            db[i] = d[i];
            total += d[i] * vol;
        }
        if (total > 0.0) {
            const GridMeasure gb(geo, std::move(db));
            const auto W = wolff_at_nodes(gb, p, inside);
            const double gamma = 1.0 / (p - 1.0);
            double integral = 0.0;
            for (std::size_t j = 0; j < inside.size(); ++j)
                integral += std::pow(W[j] * std::pow(total, -gamma), q) * gb.density()[inside[j]] * vol;
            est.candidates.push_back({"sigma_B itself", std::pow(integral, 1.0 / q)});
        }
    }
    return est;
}

} // namespace

KappaEstimate kappa_lower_bound(const Measure& sigma, const Ball& ball, double p, double q,
                                std::span<const std::vector<double>> samples) {
    const int n = dimension_of(sigma);
    require_exponent(p, n);
    if (!(q > 0.0) || !(q < p - 1.0)) throw DomainError("kappa_lower_bound: need 0 < q < p - 1");
    if (samples.empty()) throw DomainError("kappa_lower_bound: sample list is empty");
    if (static_cast<int>(ball.center.size()) != n || !(ball.radius > 0.0))
        throw DomainError("kappa_lower_bound: ball must have a center in R^n and a positive radius");
    KappaEstimate est = std::holds_alternative<RadialMeasure>(sigma)
                            ? kappa_radial(std::get<RadialMeasure>(sigma), ball, p, q, samples)
                            : kappa_grid(std::get<GridMeasure>(sigma), ball, p, q, samples);
    est.lower_bound = 0.0;
    est.witness = est.candidates.front().description;
    for (const auto& c : est.candidates) {
        if (c.value > est.lower_bound) {
            est.lower_bound = c.value;
            est.witness = c.description;
        }
    }
    return est;
}

double intrinsic_kappa_exponent(double p, double q) {
    if (!(q > 0.0) || !(q < p - 1.0)) throw DomainError("intrinsic potential: need 0 < q < p - 1");
    return q * (p - 1.0) / (p - 1.0 - q);
}

IntrinsicEstimate intrinsic_potential(const RadialMeasure& sigma, double p, double q,
                                      std::span<const double> x, std::span<const double> t_mesh) {
    const int n = sigma.dimension();
    require_exponent(p, n);
    const double beta = intrinsic_kappa_exponent(p, q);
    if (static_cast<int>(x.size()) != n) throw DomainError("intrinsic_potential: point dimension mismatch");
    if (t_mesh.size() < 2) throw DomainError("intrinsic_potential: t mesh needs at least two radii");
    for (std::size_t i = 0; i < t_mesh.size(); ++i)
        if (!(t_mesh[i] > 0.0) || (i > 0 && !(t_mesh[i] > t_mesh[i - 1])))
            throw DomainError("intrinsic_potential: t mesh must be positive and increasing");

    IntrinsicEstimate out;
    out.t.assign(t_mesh.begin(), t_mesh.end());
    out.kappa.assign(t_mesh.size(), 0.0);
    if (sigma.is_zero()) {
        out.value = ExtendedReal(0.0);
        out.finite = Verdict::holds;
        return out;
    }
    const double r = norm(x);
    const Measure sm = sigma;
    for (std::size_t i = 0; i < t_mesh.size(); ++i) {
        const double t = t_mesh[i];
        std::vector<std::vector<double>> samples{std::vector<double>(x.begin(), x.end())};
        auto push_shift = [&](std::span<const double> dir) {
            for (int sign : {-1, 1}) {
                std::vector<double> y(x.begin(), x.end());
                for (int k = 0; k < n; ++k) y[k] += sign * 0.5 * t * dir[k];
                samples.push_back(std::move(y));
            }
        };
        if (r == 0.0) {
            for (int a = 0; a < n; ++a) {
                std::vector<double> dir(n, 0.0);
                dir[a] = 1.0;
                push_shift(dir);
            }
        } else {
            std::vector<double> dir(x.begin(), x.end());
            for (double& v : dir) v /= r;
            push_shift(dir);
        }
        out.kappa[i] = kappa_lower_bound(sm, Ball{{x.begin(), x.end()}, t}, p, q, samples).lower_bound;
    }

    const double gamma = 1.0 / (p - 1.0);
    std::vector<double> g(t_mesh.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(std::pow(out.kappa[i], beta) / std::pow(t_mesh[i], n - p), gamma);

    auto log_slope = [&](std::size_t i, std::size_t j) {
        if (!(g[i] > 0.0) || !(g[j] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return std::log(g[j] / g[i]) / std::log(t_mesh[j] / t_mesh[i]);
    };
    double body = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) body += 0.5 * (g[i] + g[i + 1]) * std::log(t_mesh[i + 1] / t_mesh[i]);
    // head: g ~ t^slope below the first radius, integrable when slope > 0
    const double head_slope = log_slope(0, 1);
    const double head = (head_slope > 0.0) ? g[0] / head_slope : 0.0;

    const std::size_t last = g.size() - 1;
    const double kappa_slope = (out.kappa[last] > 0.0 && out.kappa[last - 1] > 0.0)
                                   ? std::log(out.kappa[last] / out.kappa[last - 1]) /
                                         std::log(t_mesh[last] / t_mesh[last - 1])
                                   : 0.0;
    out.kappa_tail_exponent = kappa_slope;
    const double tail_slope = (kappa_slope * beta - (n - p)) * gamma;
    if (tail_slope < -kSlopeBand) {
        out.finite = Verdict::holds;
        out.value = ExtendedReal(body + head + g[last] / -tail_slope);
    } else if (tail_slope > kSlopeBand) {
        out.finite = Verdict::fails;
        out.value = ExtendedReal::infinite();
    } else {
        out.finite = Verdict::inconclusive;
        out.value = ExtendedReal(body + head);
    }
    return out;
}

} // namespace nlpot
