#include "nlpot/grid_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "nlpot/error.hpp"
#include "nlpot/numeric.hpp"
#include "nlpot/potentials.hpp"

namespace nlpot {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 50;
constexpr int kMaxCgIterations = 5000;
constexpr double kMinFraction = 1e-3;

/// theta in (0, 1]: where the segment from a free node to a fixed node meets the
/// boundary, as a fraction of the segment measured from the free node.
using EdgeFraction = std::function<double(std::size_t free_node, std::size_t fixed_node)>;

/// First crossing of |x| = R on the segment a -> b, as a fraction of its length.
double sphere_crossing(const std::array<double, 3>& a, const std::array<double, 3>& b, double R) {
    double A = 0.0, Bh = 0.0, C = -R * R;
    for (int d = 0; d < 3; ++d) {
        const double v = b[d] - a[d];
        A += v * v;
        Bh += a[d] * v;
        C += a[d] * a[d];
    }
    const double disc = std::max(0.0, Bh * Bh - A * C);
    const double s = std::sqrt(disc);
    // C < 0 when a is inside (exit root), C > 0 when a is outside (entry root)
    const double t = C < 0.0 ? (-Bh + s) / A : (-Bh - s) / A;
    return std::clamp(t, 0.0, 1.0);
}

/// Discrete energy with prescribed values on the fixed nodes.
class EnergyProblem {
public:
    EnergyProblem(const GridGeometry& g, const OperatorSpec& op, std::vector<std::uint8_t> fixed,
                  std::vector<double> rhs, const EdgeFraction& fraction)
        : g_(g), n_(g.dimension()), h_(g.spacing()), hn_(g.cell_volume()), p_(op.p), op_(op),
          fixed_(std::move(fixed)), rhs_(std::move(rhs)), dof_(g.size(), -1) {
        const int P = g.points_per_axis();
        std::size_t stride = 1;
        for (int d = n_ - 1; d >= 0; --d) {
            stride_[d] = stride;
            stride *= static_cast<std::size_t>(P);
        }
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!fixed_[i]) {
                dof_[i] = static_cast<int>(free_.size());
                free_.push_back(i);
            }
        for (std::size_t c = 0; c < g.size(); ++c) {
            const auto mi = g.multi_index(c);
            bool inner = true;
            for (int d = 0; d < n_; ++d) inner = inner && mi[d] < P - 1;
            if (!inner) continue;
            bool touches_free = !fixed_[c];
            for (int d = 0; d < n_; ++d) touches_free = touches_free || !fixed_[c + stride_[d]];
            if (!touches_free) continue;
            cells_.push_back(c);
            for (int d = 0; d < n_; ++d) {
                const std::size_t e = c + stride_[d];
                double f = 1.0;
                if (fixed_[c] != fixed_[e]) {
                    const double theta = fixed_[c] ? fraction(e, c) : fraction(c, e);
                    f = std::pow(std::clamp(theta, kMinFraction, 1.0), -(p_ - 1.0) / p_);
                }
                factor_.push_back(f);
            }
        }
    }

    std::size_t dofs() const noexcept { return free_.size(); }
    std::span<const std::size_t> free_nodes() const noexcept { return free_; }

    /// Forward-difference gradient of u on cell k, steepened on edges cut by the boundary.
    void gradient_at(const std::vector<double>& u, std::size_t k, double* g) const {
        const std::size_t c = cells_[k];
        const double* f = &factor_[k * static_cast<std::size_t>(n_)];
        for (int d = 0; d < n_; ++d) g[d] = f[d] * (u[c + stride_[d]] - u[c]) / h_;
    }

    double energy(const std::vector<double>& u, double eps) const {
        double e = 0.0, g[3];
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const std::size_t c = cells_[k];
            gradient_at(u, k, g);
            double s = eps * eps;
            for (int d = 0; d < n_; ++d) s += g[d] * g[d];
            e += op_.w(c) * std::pow(s, 0.5 * p_) / p_;
        }
        e *= hn_;
        double lin = 0.0;
        for (std::size_t i : free_) lin += u[i] * rhs_[i];
        return e - lin * hn_;
    }

    /// J(u + t du) - J(u), computed cellwise without cancellation.
    double energy_change(const std::vector<double>& u, const std::vector<double>& du, double t, double eps) const {
        double e = 0.0, g[3], dg[3];
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const std::size_t c = cells_[k];
            gradient_at(u, k, g);
            gradient_at(du, k, dg);
            double B = eps * eps, ds = 0.0;
            for (int d = 0; d < n_; ++d) {
                B += g[d] * g[d];
                ds += t * dg[d] * (2.0 * g[d] + t * dg[d]);
            }
            if (ds == 0.0) continue;
            e += op_.w(c) * std::pow(B, 0.5 * p_) * std::expm1(0.5 * p_ * std::log1p(ds / B)) / p_;
        }
        double lin = 0.0;
        for (std::size_t i : free_) lin += du[i] * rhs_[i];
        return (e - t * lin) * hn_;
    }

    /// dJ/du over the free nodes.
    Vec gradient(const std::vector<double>& u, double eps) const {
        Vec G = Vec::Zero(static_cast<Eigen::Index>(free_.size()));
        double g[3];
        const double scale = hn_ / h_;
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const std::size_t c = cells_[k];
            gradient_at(u, k, g);
            double B = eps * eps;
            for (int d = 0; d < n_; ++d) B += g[d] * g[d];
            const double a = op_.w(c) * std::pow(B, 0.5 * p_ - 1.0) * scale;
            const double* fac = &factor_[k * static_cast<std::size_t>(n_)];
            for (int d = 0; d < n_; ++d) {
                const double f = a * g[d] * fac[d];
                if (dof_[c] >= 0) G[dof_[c]] -= f;
                const int j = dof_[c + stride_[d]];
                if (j >= 0) G[j] += f;
            }
        }
        for (std::size_t k = 0; k < free_.size(); ++k) G[static_cast<Eigen::Index>(k)] -= rhs_[free_[k]] * hn_;
        return G;
    }

    SpMat hessian(const std::vector<double>& u, double eps) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(cells_.size() * static_cast<std::size_t>((n_ + 1) * (n_ + 1)));
        double g[3], H[3][3];
        const double scale = hn_ / (h_ * h_);
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const std::size_t c = cells_[k];
            gradient_at(u, k, g);
            double B = eps * eps;
            for (int d = 0; d < n_; ++d) B += g[d] * g[d];
            const double a = op_.w(c) * std::pow(B, 0.5 * p_ - 2.0) * scale;
            const double* fac = &factor_[k * static_cast<std::size_t>(n_)];
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    H[i][j] = a * fac[i] * fac[j] * ((i == j ? B : 0.0) + (p_ - 2.0) * g[i] * g[j]);
            int loc[4];
            loc[0] = dof_[c];
            for (int d = 0; d < n_; ++d) loc[d + 1] = dof_[c + stride_[d]];
            // local matrix D^T H D with D = [-1 | I] / h
            double K[4][4];
            double total = 0.0;
            for (int i = 0; i < n_; ++i) {
                double row = 0.0;
                for (int j = 0; j < n_; ++j) {
                    row += H[i][j];
                    K[i + 1][j + 1] = H[i][j];
                }
                K[0][i + 1] = K[i + 1][0] = -row;
                total += row;
            }
            K[0][0] = total;
            for (int i = 0; i <= n_; ++i) {
                if (loc[i] < 0) continue;
                for (int j = 0; j <= n_; ++j)
                    if (loc[j] >= 0) trip.emplace_back(loc[i], loc[j], K[i][j]);
            }
        }
        const auto N = static_cast<Eigen::Index>(free_.size());
        SpMat A(N, N);
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }

    /// sum_cells w |D u|^p h^n.
    double p_energy(const std::vector<double>& u) const {
        double e = 0.0, g[3];
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const std::size_t c = cells_[k];
            gradient_at(u, k, g);
            double s = 0.0;
            for (int d = 0; d < n_; ++d) s += g[d] * g[d];
            e += op_.w(c) * std::pow(s, 0.5 * p_);
        }
        return e * hn_;
    }

private:
    GridGeometry g_;
    int n_;
    double h_;
    double hn_;
    double p_;
    const OperatorSpec& op_;
    std::vector<std::uint8_t> fixed_;
    std::vector<double> rhs_;
    std::vector<int> dof_;
    std::vector<std::size_t> free_;
    std::vector<std::size_t> cells_;
    std::vector<double> factor_; ///< n per cell: theta^(-(p-1)/p) on cut edges, else 1
    std::size_t stride_[3] = {0, 0, 0};
};

/// Newton continuation through the eps schedule; u holds the start and receives the result.
/// eps in the schedule is relative to grad_scale, so the discrete problem keeps the
/// homogeneity u[lambda nu] = lambda^(1/(p-1)) u[nu] exactly.
void minimize(const EnergyProblem& prob, std::vector<double>& u, const std::vector<double>& u_ref,
              const SolveConfig& cfg, double grad_scale, SolveStats& stats) {
    if (prob.dofs() == 0 || !(grad_scale > 0.0)) {
        u = u_ref;
        return;
    }
    const double ref = prob.gradient(u_ref, cfg.epsilon_schedule.front() * grad_scale).norm();
    if (ref == 0.0) {
        u = u_ref;
        return;
    }
    const auto free = prob.free_nodes();
    std::vector<double> du(u.size(), 0.0);
    for (std::size_t stage = 0; stage < cfg.epsilon_schedule.size(); ++stage) {
        const double eps = cfg.epsilon_schedule[stage] * grad_scale;
        const bool last = stage + 1 == cfg.epsilon_schedule.size();
        const double tol = last ? cfg.inner_tolerance : std::max(cfg.inner_tolerance, cfg.stage_tolerance);
        bool done = false;
        auto& energies = stats.energy_history.emplace_back();
        for (int it = 0; it <= cfg.max_inner_iterations; ++it) {
            energies.push_back(prob.energy(u, eps));
            const Vec G = prob.gradient(u, eps);
            const double res = G.norm() / ref;
            stats.residual_history.push_back(res);
            stats.final_residual = res;
            if (res <= tol) {
                done = true;
                break;
            }
            if (it == cfg.max_inner_iterations) break;

            const SpMat A = prob.hessian(u, eps);
            Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
            cg.setMaxIterations(kMaxCgIterations);
            cg.setTolerance(std::clamp(0.1 * res, 1e-14, 1e-3));
            cg.compute(A);
            if (cg.info() != Eigen::Success) throw NumericalError("grid solver: preconditioner setup failed");
            const Vec step = cg.solve(-G);
            stats.cg_iterations += static_cast<int>(cg.iterations());
            ++stats.newton_steps;

            for (std::size_t k = 0; k < free.size(); ++k) du[free[k]] = step[static_cast<Eigen::Index>(k)];
            const double slope = G.dot(step);
            if (!(slope < 0.0)) break;
            double t = 1.0;
            bool accepted = false;
            for (int halving = 0; halving < kMaxHalvings; ++halving, t *= 0.5) {
                if (prob.energy_change(u, du, t, eps) <= kArmijo * t * slope) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
            for (std::size_t i : free) u[i] += t * du[i];
        }
        if (!done)
            throw ConvergenceError("grid solver: no convergence at eps = " + format_double(cfg.epsilon_schedule[stage]) +
                                       " (residual " +
                                       format_double(stats.final_residual) + ", tolerance " + format_double(tol) + ")",
                                   stats.residual_history);
    }
    stats.final_energy = prob.energy(u, cfg.epsilon_schedule.back() * grad_scale);
}

std::vector<std::uint8_t> domain_mask(const GridGeometry& g, const DomainSpec& dom) {
    std::vector<std::uint8_t> fixed(g.size(), 0);
    const int P = g.points_per_axis();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto mi = g.multi_index(i);
        bool face = false;
        for (int d = 0; d < g.dimension(); ++d) face = face || mi[d] == 0 || mi[d] == P - 1;
        const auto x = g.position(i);
        fixed[i] = face || !dom.contains(std::span<const double>(x.data(), static_cast<std::size_t>(g.dimension())));
    }
    return fixed;
}

/// Boundary fraction of the domain: sphere crossing for balls, first face crossing for boxes.
EdgeFraction domain_fraction(const GridGeometry& g, const DomainSpec& dom) {
    return [g, dom](std::size_t in, std::size_t out) {
        const auto a = g.position(in), b = g.position(out);
        if (dom.kind == DomainKind::ball) return dom.size * dom.size > 0.0 && g.radius(out) >= dom.size
                                                     ? sphere_crossing(a, b, dom.size)
                                                     : 1.0;
        double t = 1.0;
        for (int d = 0; d < g.dimension(); ++d) {
            const double v = b[d] - a[d];
            if (v == 0.0 || std::abs(b[d]) < dom.size) continue;
            t = std::min(t, std::clamp(((v > 0.0 ? dom.size : -dom.size) - a[d]) / v, 0.0, 1.0));
        }
        return t;
    };
}

GridField solve_impl(const GridMeasure& nu, const OperatorSpec& op, const SolveConfig& cfg, const GridField* start,
                     SolveStats* stats) {
    const auto& g = nu.geometry();
    cfg.validate();
    op.validate(g.dimension(), g.size());
    GridField out;
    out.geometry = g;
    out.fixed = domain_mask(g, cfg.domain);
    out.label = "u";
    const auto dens = nu.density();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (out.fixed[i] && dens[i] != 0.0)
            throw DomainError("grid solver: the measure charges node " + std::to_string(i) + " outside the domain");
    std::vector<double> zero(g.size(), 0.0);
    out.values = zero;
    if (start) {
        if (!start->geometry.same_as(g)) throw DomainError("grid solver: warm start on a different grid");
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!out.fixed[i]) out.values[i] = start->values[i];
    }
    const EnergyProblem prob(g, op, out.fixed, std::vector<double>(dens.begin(), dens.end()),
                             domain_fraction(g, cfg.domain));
    // flux balance |grad u|^(p-1) ~ nu(domain) / size^(n-1)
    const double flux = nu.total_mass() / std::pow(cfg.domain.size, g.dimension() - 1.0);
    SolveStats local;
    minimize(prob, out.values, zero, cfg, std::pow(flux, 1.0 / (op.p - 1.0)), stats ? *stats : local);
    for (double& v : out.values) v = std::max(0.0, v);
    return out;
}

} // namespace

double GridField::max_value() const noexcept {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

double GridField::interpolate(std::span<const double> x) const {
    const int n = geometry.dimension();
    if (x.size() != static_cast<std::size_t>(n)) throw DomainError("interpolate: point has the wrong dimension");
    const int P = geometry.points_per_axis();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
        const double s = std::clamp((x[d] + geometry.half_width()) / geometry.spacing(), 0.0, P - 1.0);
        base[d] = std::min(static_cast<int>(std::floor(s)), P - 2);
        frac[d] = s - base[d];
    }
    double v = 0.0;
    for (int corner = 0; corner < (1 << n); ++corner) {
        auto mi = base;
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const bool up = (corner >> d) & 1;
            mi[d] += up;
            w *= up ? frac[d] : 1.0 - frac[d];
        }
        if (w != 0.0) v += w * values[geometry.linear_index(mi)];
    }
    return v;
}

bool DomainSpec::contains(std::span<const double> x) const noexcept {
    if (kind == DomainKind::ball) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        return r2 < size * size;
    }
    for (double c : x)
        if (!(std::abs(c) < size)) return false;
    return true;
}

void SolveConfig::validate() const {
    if (epsilon_schedule.empty()) throw InvariantError("solve config: empty epsilon schedule");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        if (!(epsilon_schedule[i] > 0.0)) throw InvariantError("solve config: epsilon must be positive");
        if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1]))
            throw InvariantError("solve config: epsilon schedule must decrease strictly");
    }
    if (epsilon_schedule.back() > 1e-6) throw InvariantError("solve config: final epsilon must be at most 1e-6");
    if (max_inner_iterations < 1) throw InvariantError("solve config: max_inner_iterations must be positive");
    if (!(inner_tolerance > 0.0)) throw InvariantError("solve config: inner_tolerance must be positive");
    if (!(domain.size > 0.0)) throw InvariantError("solve config: domain size must be positive");
}

GridField solve_dirichlet_grid(const GridMeasure& nu, const OperatorSpec& op, const SolveConfig& cfg,
                               SolveStats* stats) {
    return solve_impl(nu, op, cfg, nullptr, stats);
}

GridField solve_dirichlet_grid(const GridMeasure& nu, const OperatorSpec& op, const SolveConfig& cfg,
                               const GridField& start, SolveStats* stats) {
    return solve_impl(nu, op, cfg, &start, stats);
}

std::vector<std::size_t> ball_nodes(const GridGeometry& geometry, double radius) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < geometry.size(); ++i)
        if (geometry.radius(i) <= radius) out.push_back(i);
    return out;
}

LadderReport minimal_solution_grid(const GridMeasure& sigma, const OperatorSpec& op, std::span<const double> k_list,
                                   const SolveConfig& cfg) {
    const auto& g = sigma.geometry();
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (!(k_list[i] > 0.0)) throw DomainError("ladder: k must be positive");
        if (i > 0 && !(k_list[i] > k_list[i - 1])) throw DomainError("ladder: k_list must increase strictly");
    }
    if (!k_list.empty() && k_list.back() > g.half_width())
        throw DomainError("ladder: B_k leaves the grid box for k = " + format_double(k_list.back()));

    LadderReport rep;
    rep.slack = discretization_slack(g.spacing());
    const auto dens = sigma.density();
    for (double k : k_list) {
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.radius(i) < k && dens[i] > 0.0) nodes.push_back(i);
        const auto W = sigma.is_zero() ? std::vector<double>(nodes.size(), 0.0) : wolff_at_nodes(sigma, op.p, nodes);
        std::vector<double> restricted(g.size(), 0.0);
        LadderStep step;
        step.k = k;
        step.sublevel_is_whole_ball = true;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (W[j] < k)
                restricted[nodes[j]] = dens[nodes[j]];
            else
                step.sublevel_is_whole_ball = false;
        }
        const GridMeasure sk(g, std::move(restricted));
        step.restricted_mass = sk.total_mass();
        SolveConfig c = cfg;
        c.domain = {DomainKind::ball, k};
        step.field = solve_dirichlet_grid(sk, op, c);
        step.field.label = "u_k=" + format_double(k);
        rep.steps.push_back(std::move(step));
    }
    for (std::size_t s = 1; s < rep.steps.size(); ++s) {
        const auto& a = rep.steps[s - 1].field.values;
        const auto& b = rep.steps[s].field.values;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a[i] - b[i]);
        rep.max_decrease = s == 1 ? worst : std::max(rep.max_decrease, worst);
    }
    rep.monotone = rep.max_decrease <= rep.slack;
    return rep;
}

GridSublinearResult sublinear_minimal_grid(const GridMeasure& sigma, const GridMeasure& mu, double q,
                                           const OperatorSpec& op, const SolveConfig& cfg,
                                           const GridSublinearOptions& opts) {
    const auto& g = sigma.geometry();
    if (!g.same_as(mu.geometry())) throw DomainError("sublinear grid: sigma and mu live on different grids");
    if (!(q > 0.0) || !(q < op.p - 1.0)) throw DomainError("sublinear grid: need 0 < q < p - 1");
    const double slack = discretization_slack(g.spacing());
    const auto s = sigma.density();
    const auto m = mu.density();

    GridSublinearResult res;
    GridField u;
    u.geometry = g;
    u.values.assign(g.size(), 0.0);
    u.fixed = domain_mask(g, cfg.domain);
    res.trace.records.push_back({0, 0.0, 1.0, true});
    for (int j = 1; j <= opts.max_iterations; ++j) {
        std::vector<double> nu(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) nu[i] = s[i] * std::pow(u.values[i], q) + m[i];
        GridField next = solve_dirichlet_grid(GridMeasure(g, std::move(nu)), op, cfg, u);
        const double sup = next.max_value();
        if (!(sup <= opts.divergence_bound))
            throw DivergenceError("sublinear grid iteration diverged: sup u_" + std::to_string(j) + " = " +
                                  format_double(sup));
        double change = 0.0, ratio = 0.0;
        bool monotone = true;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double a = u.values[i], b = next.values[i];
            change = std::max(change, std::abs(b - a));
            if (a > 0.0) ratio = std::max(ratio, b / a);
            if (b < a - slack) monotone = false;
        }
        change = sup > 0.0 ? change / sup : 0.0;
        res.trace.records.push_back({j, sup, ratio, monotone});
        res.trace.iterations = j;
        res.trace.final_change = change;
        u = std::move(next);
        if (change < opts.tolerance) {
            res.trace.converged = true;
            break;
        }
    }
    u.label = "u";
    res.solution = std::move(u);
    return res;
}

namespace {

double capacity_impl(const GridGeometry& geometry, std::span<const std::size_t> K, double radius,
                     const OperatorSpec& op, const SolveConfig& cfg, SolveStats* stats) {
    cfg.validate();
    op.validate(geometry.dimension(), geometry.size());
    if (K.empty()) return 0.0;
    auto fixed = domain_mask(geometry, cfg.domain);
    std::vector<double> u(geometry.size(), 0.0);
    for (std::size_t i : K) {
        if (i >= geometry.size() || fixed[i])
            throw DomainError("capacity: the condenser set must lie strictly inside the domain");
    }
    std::vector<std::uint8_t> in_k(geometry.size(), 0);
    for (std::size_t i : K) {
        fixed[i] = in_k[i] = 1;
        u[i] = 1.0;
    }
    const auto outer = domain_fraction(geometry, cfg.domain);
    EdgeFraction fraction = [&](std::size_t free_node, std::size_t fixed_node) {
        if (!in_k[fixed_node]) return outer(free_node, fixed_node);
        if (!(radius > 0.0)) return 1.0;
        return sphere_crossing(geometry.position(free_node), geometry.position(fixed_node), radius);
    };
    const EnergyProblem prob(geometry, op, std::move(fixed), std::vector<double>(geometry.size(), 0.0), fraction);
    const std::vector<double> ref = u;
    SolveStats local;
    minimize(prob, u, ref, cfg, 1.0 / cfg.domain.size, stats ? *stats : local);
    return prob.p_energy(u);
}

} // namespace

double p_capacity(const GridGeometry& geometry, std::span<const std::size_t> K, const OperatorSpec& op,
                  const SolveConfig& cfg, SolveStats* stats) {
    return capacity_impl(geometry, K, 0.0, op, cfg, stats);
}

double p_capacity_ball(const GridGeometry& geometry, double radius, const OperatorSpec& op, const SolveConfig& cfg,
                       SolveStats* stats) {
    if (!(radius > 0.0)) throw DomainError("capacity: ball radius must be positive");
    const auto K = ball_nodes(geometry, radius);
    return capacity_impl(geometry, K, radius, op, cfg, stats);
}

ComparisonReport compare_fields(const GridField& u, const GridField& v, double tol) {
    if (!u.geometry.same_as(v.geometry) || u.values.size() != v.values.size())
        throw DomainError("compare_fields: fields live on different grids");
    ComparisonReport rep;
    rep.tolerance = tol;
    rep.max_violation = u.values.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double d = u.values[i] - v.values[i];
        rep.max_violation = std::max(rep.max_violation, d);
        if (d > tol) ++rep.violating_nodes;
    }
    if (!u.values.empty()) rep.violating_fraction = static_cast<double>(rep.violating_nodes) / u.values.size();
    return rep;
}

} // namespace nlpot
