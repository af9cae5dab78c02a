#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlpot/grid.hpp"
#include "nlpot/measure.hpp"
#include "nlpot/operator.hpp"
#include "nlpot/trace.hpp"

namespace nlpot {

/// Nodal field on a GridGeometry. Nodes flagged in `fixed` lie outside the
/// computational domain (or on its boundary) and hold prescribed values.
struct GridField {
    GridGeometry geometry;
    std::vector<double> values;
    std::vector<std::uint8_t> fixed;
    std::string label;

    int dimension() const noexcept { return geometry.dimension(); }
    double spacing() const noexcept { return geometry.spacing(); }
    double max_value() const noexcept;
    /// Linear interpolation of the nodal values at x (multilinear in the box cell).
    double interpolate(std::span<const double> x) const;
};

enum class DomainKind { box, ball };

/// Computational domain: nodes strictly inside the box max|x_d| < size or the ball
/// |x| < size are free; every other node is held at zero.
struct DomainSpec {
    DomainKind kind = DomainKind::box;
    double size = 1.0;

    bool contains(std::span<const double> x) const noexcept;
};

struct SolveConfig {
    /// Regularization levels relative to the gradient scale of the data:
    /// (nu(domain) / size^(n-1))^(1/(p-1)) for solves, 1 / size for capacities.
    std::vector<double> epsilon_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    int max_inner_iterations = 100;
    /// Final-stage bound on |grad J| / |grad J at the zero start| (Euclidean norms over free nodes).
    double inner_tolerance = 1e-9;
    /// Bound used for the stages before the last.
    double stage_tolerance = 1e-4;
    DomainSpec domain;

    /// Throws InvariantError unless the schedule is strictly decreasing, positive and ends at or below 1e-6.
    void validate() const;
};

struct SolveStats {
    int newton_steps = 0;
    int cg_iterations = 0;
    double final_residual = 0.0;
    double final_energy = 0.0;
    std::vector<double> residual_history; ///< one entry per Newton step, all stages
    /// Regularized energy before each Newton step, one list per eps stage.
    std::vector<std::vector<double>> energy_history;
};

/// Minimizer of the regularized p-Dirichlet energy
///
///     J(u) = sum_cells w (|D u|^2 + (eps s)^2)^(p/2) / p h^n - sum_nodes u nu h^n
///
/// over nodal functions vanishing off the domain, where D is the forward-difference
/// gradient and s the gradient scale of SolveConfig::epsilon_schedule. An edge from a free node to a node off the domain is cut where it meets
/// the boundary at fraction theta of its length, and its difference quotient is
/// scaled by theta^(-(p-1)/p), which makes the one-dimensional energy exact for
/// profiles linear up to the boundary. Each eps stage is solved by Newton steps
/// with a preconditioned conjugate gradient inner solve and an Armijo line search
/// on J, warm-started from the previous stage. Throws ConvergenceError with the residual history when a stage
/// exhausts max_inner_iterations, DomainError unless 1 < p < n and nu vanishes off
/// the domain.
GridField solve_dirichlet_grid(const GridMeasure& nu, const OperatorSpec& op, const SolveConfig& cfg,
                               SolveStats* stats = nullptr);

/// As above, warm-started from `start` (same geometry; off-domain values ignored).
GridField solve_dirichlet_grid(const GridMeasure& nu, const OperatorSpec& op, const SolveConfig& cfg,
                               const GridField& start, SolveStats* stats = nullptr);

/// Acceptance slack for order-type comparisons on a grid of spacing h.
inline double discretization_slack(double h) noexcept { return 10.0 * h; }

struct LadderStep {
    double k = 0.0;
    GridField field;
    double restricted_mass = 0.0;
    bool sublevel_is_whole_ball = false; ///< W < k at every node of B_k
};

struct LadderReport {
    std::vector<LadderStep> steps;
    /// max over consecutive steps of max(u_k - u_{k'}) (k < k'); <= 0 means exactly nondecreasing.
    double max_decrease = 0.0;
    double slack = 0.0;    ///< discretization_slack(h)
    bool monotone = true;  ///< max_decrease <= slack
};

/// Minimal-solution ladder: for each k the density restricted to B_k and to
/// {W sigma < k} is solved on the ball B_k and extended by zero.
LadderReport minimal_solution_grid(const GridMeasure& sigma, const OperatorSpec& op, std::span<const double> k_list,
                                   const SolveConfig& cfg);

struct GridSublinearOptions {
    double tolerance = 1e-8;
    int max_iterations = 200;
    double divergence_bound = 1e12;
};

struct GridSublinearResult {
    GridField solution;
    IterationTrace trace;
};

/// Ascending scheme u_0 = 0, u_{j+1} = solve_dirichlet_grid(sigma u_j^q + mu) with
/// nodewise products; monotone flags use the slack discretization_slack(h).
GridSublinearResult sublinear_minimal_grid(const GridMeasure& sigma, const GridMeasure& mu, double q,
                                           const OperatorSpec& op, const SolveConfig& cfg,
                                           const GridSublinearOptions& opts = {});

/// Condenser p-capacity of the node set K (linear indices) in the configured domain:
/// the minimized sum_cells w |D u|^p h^n over u = 1 on K and 0 off the domain.
/// The minimizer of the energy with u >= 1 on K equals 1 there, so K is held at 1.
/// Edges into K are not cut (K is a bare node set). Off-domain nodes in K raise DomainError.
double p_capacity(const GridGeometry& geometry, std::span<const std::size_t> K, const OperatorSpec& op,
                  const SolveConfig& cfg, SolveStats* stats = nullptr);

/// Capacity of the closed ball B(0, radius): K is its node set and edges into K are
/// cut at the sphere.
double p_capacity_ball(const GridGeometry& geometry, double radius, const OperatorSpec& op, const SolveConfig& cfg,
                       SolveStats* stats = nullptr);

/// Nodes with |x| <= radius.
std::vector<std::size_t> ball_nodes(const GridGeometry& geometry, double radius);

struct ComparisonReport {
    double max_violation = 0.0;      ///< max over nodes of u - v (may be negative)
    double violating_fraction = 0.0; ///< share of nodes with u - v > tol
    std::size_t violating_nodes = 0;
    double tolerance = 0.0;
};

/// Throws DomainError unless u and v share a geometry.
ComparisonReport compare_fields(const GridField& u, const GridField& v, double tol);

} // namespace nlpot
