#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlpot/grid_solver.hpp"
#include "nlpot/measure.hpp"
#include "nlpot/numeric.hpp"
#include "nlpot/profile.hpp"
#include "nlpot/radial_solver.hpp"

namespace nlpot {

/// Extremes of u / W_{1,p} sigma over the mesh points where either is at least 1e-14.
struct BilateralReport {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double k_empirical = 0.0; ///< max(max_ratio, 1 / min_ratio)
    double center_ratio = 0.0; ///< u(0) / W(0) when the mesh starts at the origin, else 0
    std::size_t evaluated = 0;
    std::string evaluation_set;
    Verdict status = Verdict::inconclusive; ///< holds when the set is nonempty and every ratio is finite and positive
};

/// Requires u to be the entire solution for sigma on its own mesh.
BilateralReport bilateral_ratio_report(const RadialProfile& u, const RadialMeasure& sigma, double p);

/// sup over t > 0 of t |{|Du| > t}|^(1/gamma) for a step function taking the value
/// magnitudes[i] on a set of measure volumes[i]. Evaluated exactly: the supremum is
/// approached as t rises to one of the magnitudes.
double weak_lorentz_norm(std::span<const double> magnitudes, std::span<const double> volumes, double gamma);

/// Forward-difference gradient magnitudes on every grid cell (cell volume h^n each).
std::vector<double> gradient_magnitudes(const GridField& u);

/// Weak L^gamma norm of |D_h u| over the grid cells.
double weak_lorentz_norm(const GridField& u, double gamma);

/// Weak L^gamma norm of |u'| for a radial profile. Difference quotients sit at the
/// geometric midpoints of the mesh shells and are interpolated linearly between
/// them; the supremum is taken over the sampled levels. Nothing beyond the last
/// midpoint is counted, so the mesh range bounds the estimate from below.
double weak_lorentz_norm(const RadialProfile& u, double gamma);

struct ConditionVerdict {
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

struct ReachabilityReport {
    double gamma_low = 0.0;             ///< (p-1) n / (n-1)
    double weak_norm_gamma_low = 0.0;
    double weak_norm_gamma_p = 0.0;
    ConditionVerdict condition_i;       ///< |Du| in weak L^gamma for some gamma in [gamma_low, p)
    double outer_min = 0.0;             ///< min of u over the outermost decade of the mesh
    double outer_max = 0.0;
    ConditionVerdict condition_ii;      ///< liminf of u at infinity is 0 (proxy)
    ExtendedReal total_mass;
    ConditionVerdict condition_iii;     ///< sigma has finite total mass
    Verdict overall = Verdict::inconclusive; ///< holds if any condition holds, fails if all fail
};

ReachabilityReport reachability_classifier(const RadialProfile& u, const RadialMeasure& sigma, double p);
ReachabilityReport reachability_classifier(const GridField& u, const GridMeasure& sigma, double p);

struct UniquenessEntry {
    double C0 = 1.0;
    ContractionReport report;
    int predicted_iterations = 0; ///< ceil(ln(ln C0 / 1e-6) / ln((p-1)/q)), 0 for C0 = 1
    bool within_prediction = true; ///< |actual - predicted| <= 2 (mu = 0) or actual <= predicted + 2
    bool passed = false;           ///< bound holds, converged, agreement <= 1e-5
};

struct UniquenessReport {
    SublinearResult ascending;
    std::string start; ///< "zero" or "wolff_seed"
    std::vector<UniquenessEntry> entries;
    std::vector<double> failed_C0;
    bool passed = false;

    /// Rate table with header `C0,j,ln_rho,bound`.
    std::string rate_csv() const;
};

/// Runs the ascending scheme (zero start, or the Wolff seed when mu = 0) and the
/// descending contraction for every C0.
UniquenessReport uniqueness_battery(const SublinearProblem& prob, std::span<const double> mesh,
                                    std::span<const double> C0_list, const SublinearOptions& opts = {});

} // namespace nlpot
