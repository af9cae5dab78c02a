#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlpot/measure.hpp"
#include "nlpot/profile.hpp"
#include "nlpot/radial_integral.hpp"
#include "nlpot/trace.hpp"

namespace nlpot {

/// Entire radial solution of -div(|grad u|^(p-2) grad u) = sigma with u -> 0 at infinity:
///
///     u(r) = int_r^inf (sigma(B(0, t)) / (s_{n-1} t^(n-1)))^(1/(p-1)) dt.
///
/// Evaluates u exactly (up to quadrature) at any radius. The breakpoints join the
/// panel set, so two measures with equal knots solved with equal breakpoints are
/// ordered exactly at every breakpoint. With a finite outer_radius R the evaluator
/// returns the Dirichlet solution on B_R, u(r) - u(R) for r <= R and 0 beyond.
class EntireRadialSolution {
public:
    /// Throws FinitenessError when the Wolff potential of sigma is infinite.
    EntireRadialSolution(const RadialMeasure& sigma, double p, std::span<const double> breakpoints = {},
                         double outer_radius = kUnboundedRadius);

    double operator()(double r) const;
    const RadialMeasure& measure() const noexcept { return sigma_; }
    double p() const noexcept { return p_; }
    /// Decay exponent of u beyond the mesh.
    double tail_exponent() const noexcept { return tail_exponent_; }

    RadialProfile profile(std::span<const double> mesh, const std::string& label = "u") const;

private:
    RadialMeasure sigma_;
    double p_;
    double outer_;
    double constant_;
    double boundary_value_ = 0.0;
    double tail_exponent_;
    RadialTailIntegral integral_;
};

/// u on the mesh (mesh points are panel edges). Throws FinitenessError if the
/// finiteness condition fails for sigma.
RadialProfile solve_entire_radial(const RadialMeasure& sigma, double p, std::span<const double> mesh);

/// Dirichlet solution on B_R for sigma supported in B_R: u(r) - u(R), zero beyond R.
RadialProfile solve_dirichlet_radial(const RadialMeasure& sigma, double p, double R, std::span<const double> mesh);

/// sigma u^q + mu for the sublinear equation; requires 0 < q < p - 1.
struct SublinearProblem {
    RadialMeasure sigma;
    RadialMeasure mu;
    double p = 2.0;
    double q = 0.5;

    /// Throws DomainError / FinitenessError when the invariants fail.
    void validate() const;
};

enum class StartKind { zero, profile, wolff_seed };

struct SublinearStart {
    StartKind kind = StartKind::zero;
    RadialProfile profile;  ///< used by StartKind::profile
    double c0 = 0.5;        ///< seed c0 (W sigma)^((p-1)/(p-1-q)) for StartKind::wolff_seed
};

struct SublinearOptions {
    double tolerance = 1e-8;          ///< stop when the sup-relative change falls below
    int max_iterations = 200;
    double divergence_bound = 1e12;   ///< sup of an iterate beyond this raises DivergenceError
    double outer_radius = kUnboundedRadius;
};

/// Iterate of the radial scheme: an exact evaluator of U[nu] or a fixed function.
using RadialFunction = std::function<double(double)>;

struct SublinearResult {
    RadialProfile solution;
    IterationTrace trace;
    /// Exact evaluator of the last iterate (valid at any radius).
    RadialFunction evaluator;
};

/// One application of the scheme map: U[sigma u^q + mu] on the shared partition.
///
/// The product measure has cumulative mass int_0^r u^q d sigma(B_t) + mu(B_r),
/// integrated by a 10-point Gauss-Legendre rule on every cell of the partition
/// (mesh, sigma knots and mu knots), with u evaluated exactly at the nodes.
class SublinearMap {
public:
    SublinearMap(const SublinearProblem& prob, std::span<const double> mesh, double outer_radius = kUnboundedRadius);

    /// The measure sigma u^q + mu.
    RadialMeasure product_measure(const RadialFunction& u) const;
    /// Evaluator of U[sigma u^q + mu].
    std::shared_ptr<EntireRadialSolution> apply(const RadialFunction& u) const;

    std::span<const double> partition() const noexcept { return partition_; }
    std::span<const double> mesh() const noexcept { return mesh_; }

private:
    SublinearProblem prob_;
    std::vector<double> mesh_;
    std::vector<double> partition_;
    double outer_;
};

/// Ascending (from zero) or seeded fixed-point iteration u_{j+1} = U[sigma u_j^q + mu].
SublinearResult sublinear_fixed_point_radial(const SublinearProblem& prob, std::span<const double> mesh,
                                             const SublinearStart& start = {}, const SublinearOptions& opts = {});

/// sup over the mesh of |U[sigma u^q + mu] - u| / sup u.
double self_consistency_residual(const SublinearProblem& prob, std::span<const double> mesh, const RadialFunction& u,
                                 double outer_radius = kUnboundedRadius);

struct ContractionReport {
    double C0 = 1.0;
    IterationTrace trace;      ///< sup_ratio is rho_j = sup_mesh v_j / u
    std::vector<double> ln_rho;
    std::vector<double> bound; ///< (q/(p-1))^j ln C0
    bool bound_holds = true;   ///< ln rho_j <= bound_j + 1e-6 at every j
    bool converged = false;    ///< rho_j - 1 < 1e-6 reached
    int iterations = 0;        ///< first j with rho_j - 1 < 1e-6
    RadialProfile limit;
    double agreement = 0.0;    ///< sup-relative distance between the limit and u
};

/// Descending iteration from v_0 = C0 u with u a converged ascending limit.
/// Throws DomainError unless u > 0 at every mesh radius inside supp sigma and C0 >= 1.
ContractionReport contraction_experiment(const SublinearProblem& prob, std::span<const double> mesh,
                                         const SublinearResult& ascending, double C0,
                                         const SublinearOptions& opts = {});

struct CenterIdentity {
    double u0 = 0.0;
    double w0 = 0.0;
    double ratio = 0.0;
    double expected = 0.0; ///< s_{n-1}^(-1/(p-1))
    bool vacuous = false;  ///< sigma = 0: the ratio is undefined and the identity holds trivially
    bool passed = false;   ///< |ratio / expected - 1| <= 1e-8 or vacuous
};

CenterIdentity radial_center_identity_check(const RadialMeasure& sigma, double p);

/// Linear interpolation of a profile in (ln r, ln value), continued by its tail exponent.
RadialFunction interpolate_profile(const RadialProfile& prof);

} // namespace nlpot
