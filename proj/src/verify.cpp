#include "nlpot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nlpot/error.hpp"
#include "nlpot/potentials.hpp"

namespace nlpot {

namespace {

constexpr double kNegligible = 1e-14;
constexpr double kDecayProxy = 1e-6;
constexpr double kAgreement = 1e-5;
constexpr double kContractionTarget = 1e-6;
constexpr int kPredictionSlack = 2;

Verdict any_of(std::initializer_list<Verdict> vs) {
    bool all_fail = true;
    for (Verdict v : vs) {
        if (v == Verdict::holds) return Verdict::holds;
        all_fail = all_fail && v == Verdict::fails;
    }
    return all_fail ? Verdict::fails : Verdict::inconclusive;
}

} // namespace

BilateralReport bilateral_ratio_report(const RadialProfile& u, const RadialMeasure& sigma, double p) {
    u.validate();
    BilateralReport rep;
    rep.evaluation_set = "mesh of " + std::to_string(u.size()) + " radii in [" +
                         (u.size() ? format_double(u.radii.front()) : "-") + ", " +
                         (u.size() ? format_double(u.radii.back()) : "-") + "], excluding u, W < 1e-14";
    if (sigma.is_zero() || u.radii.empty()) return rep;
    const auto W = wolff_radial_profile(sigma, p, u.radii);
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = u.values[i], b = W.values[i];
        if (a < kNegligible && b < kNegligible) continue;
        ++rep.evaluated;
        if (!(a > 0.0) || !(b > 0.0)) {
            finite = false;
            continue;
        }
        const double r = a / b;
        rep.min_ratio = std::min(rep.min_ratio, r);
        rep.max_ratio = std::max(rep.max_ratio, r);
        if (u.radii[i] == 0.0) rep.center_ratio = r;
    }
    if (rep.evaluated == 0) {
        rep.min_ratio = rep.max_ratio = 0.0;
        return rep;
    }
    if (!finite || !(rep.min_ratio > 0.0)) {
        rep.status = Verdict::fails;
        rep.k_empirical = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.k_empirical = std::max(rep.max_ratio, 1.0 / rep.min_ratio);
    rep.status = Verdict::holds;
    return rep;
}

double weak_lorentz_norm(std::span<const double> magnitudes, std::span<const double> volumes, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("weak norm: gamma must be positive");
    if (magnitudes.size() != volumes.size()) throw DomainError("weak norm: magnitudes and volumes differ in length");
    std::vector<std::size_t> order(magnitudes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return magnitudes[a] > magnitudes[b]; });
    double best = 0.0, volume = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double m = magnitudes[order[k]];
        if (!(m > 0.0)) break;
        volume += volumes[order[k]];
        // ties share one level of the distribution function
        if (k + 1 < order.size() && magnitudes[order[k + 1]] == m) continue;
        best = std::max(best, m * std::pow(volume, 1.0 / gamma));
    }
    return best;
}

std::vector<double> gradient_magnitudes(const GridField& u) {
    const auto& g = u.geometry;
    const int n = g.dimension(), P = g.points_per_axis();
    std::size_t stride[3] = {0, 0, 0}, s = 1;
    for (int d = n - 1; d >= 0; --d) {
        stride[d] = s;
        s *= static_cast<std::size_t>(P);
    }
    std::vector<double> out;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto mi = g.multi_index(c);
        bool inner = true;
        for (int d = 0; d < n; ++d) inner = inner && mi[d] < P - 1;
        if (!inner) continue;
        double s2 = 0.0;
        for (int d = 0; d < n; ++d) {
            const double gd = (u.values[c + stride[d]] - u.values[c]) / g.spacing();
            s2 += gd * gd;
        }
        out.push_back(std::sqrt(s2));
    }
    return out;
}

double weak_lorentz_norm(const GridField& u, double gamma) {
    const auto mags = gradient_magnitudes(u);
    const std::vector<double> vols(mags.size(), u.geometry.cell_volume());
    return weak_lorentz_norm(mags, vols, gamma);
}

double weak_lorentz_norm(const RadialProfile& u, double gamma) {
    u.validate();
    const int n = u.dimension;
    if (n < 1) throw DomainError("weak norm: profile has no dimension");
    const double omega = ball_volume(n);
    // |u'| is sampled at the shell midpoints and interpolated linearly between them;
    // the distribution function is evaluated exactly for that interpolant at every sampled level
    std::vector<double> mags, mids;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double a = u.radii[i], b = u.radii[i + 1];
        mags.push_back(std::abs(u.values[i + 1] - u.values[i]) / (b - a));
        mids.push_back(a > 0.0 ? std::sqrt(a * b) : 0.5 * b);
    }
    if (mags.empty()) return 0.0;
    auto shell = [&](double lo, double hi) { return omega * (std::pow(hi, n) - std::pow(lo, n)); };
    auto level_volume = [&](double t) {
        double v = mags[0] > t ? shell(u.radii.front(), mids[0]) : 0.0;
        for (std::size_t j = 0; j + 1 < mags.size(); ++j) {
            const double a = mids[j], b = mids[j + 1], fa = mags[j], fb = mags[j + 1];
            if (fa > t && fb > t) {
                v += shell(a, b);
            } else if (fa > t || fb > t) {
                const double x = a + (b - a) * (fa - t) / (fa - fb);
                v += fa > t ? shell(a, x) : shell(x, b);
            }
        }
        return v;
    };
    double best = 0.0;
    for (double t : mags)
        if (t > 0.0) best = std::max(best, t * std::pow(level_volume(t), 1.0 / gamma));
    return best;
}

ReachabilityReport reachability_classifier(const RadialProfile& u, const RadialMeasure& sigma, double p) {
    const int n = sigma.dimension();
    require_exponent(p, n);
    u.validate();
    ReachabilityReport rep;
    rep.gamma_low = (p - 1.0) * n / (n - 1.0);
    rep.weak_norm_gamma_low = weak_lorentz_norm(u, rep.gamma_low);
    rep.weak_norm_gamma_p = weak_lorentz_norm(u, p);

    const bool compact = !u.values.empty() && u.values.back() == 0.0;
    const double theta = u.tail_exponent;
    if (compact) {
        rep.condition_i = {Verdict::holds, "u vanishes beyond the mesh, so |Du| is bounded with compact support"};
    } else if (theta < 1.0) {
        // |u'| ~ r^(theta-1) gives |{|Du| > t}| ~ t^(n/(theta-1)): weak L^gamma exactly for gamma >= n/(1-theta)
        const double critical = n / (1.0 - theta);
        const std::string detail = "tail |Du| ~ r^(" + format_double(theta - 1.0) + ") is weak L^gamma for gamma >= " +
                                   format_double(critical);
        if (std::abs(critical - p) <= 1e-9 * p)
            rep.condition_i = {Verdict::inconclusive, detail + ", the endpoint p itself"};
        else if (critical < p)
            rep.condition_i = {Verdict::holds, detail + " < p"};
        else
            rep.condition_i = {Verdict::fails, detail + " > p"};
    } else {
        rep.condition_i = {Verdict::inconclusive, "profile does not decay"};
    }

    if (!u.values.empty()) {
        const double r_top = u.radii.back();
        double umax = 0.0;
        rep.outer_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u.size(); ++i) {
            umax = std::max(umax, u.values[i]);
            if (u.radii[i] >= 0.1 * r_top) {
                rep.outer_min = std::min(rep.outer_min, u.values[i]);
                rep.outer_max = std::max(rep.outer_max, u.values[i]);
            }
        }
        if (rep.outer_min < kDecayProxy * umax)
            rep.condition_ii = {Verdict::holds, "proxy: min over the outermost decade < 1e-6 max u"};
        else if (theta < 0.0)
            rep.condition_ii = {Verdict::holds, "proxy: profile continues as r^(" + format_double(theta) + ") -> 0"};
        else if (theta == 0.0 && rep.outer_min < rep.outer_max)
            rep.condition_ii = {Verdict::inconclusive,
                                "proxy: decays over the outermost decade slower than any power of r"};
        else
            rep.condition_ii = {Verdict::fails, "proxy: no decay over the outermost decade and tail exponent >= 0"};
    }

    if (sigma.has_finite_total_mass()) {
        rep.total_mass = ExtendedReal(sigma.total_mass());
        rep.condition_iii = {Verdict::holds, "finite total mass"};
    } else {
        rep.total_mass = ExtendedReal::infinite();
        rep.condition_iii = {Verdict::fails, "tail mass grows like r^" + format_double(sigma.tail_growth_exponent())};
    }
    rep.overall = any_of({rep.condition_i.verdict, rep.condition_ii.verdict, rep.condition_iii.verdict});
    return rep;
}

ReachabilityReport reachability_classifier(const GridField& u, const GridMeasure& sigma, double p) {
    const int n = u.dimension();
    require_exponent(p, n);
    if (!u.geometry.same_as(sigma.geometry())) throw DomainError("classifier: field and measure on different grids");
    ReachabilityReport rep;
    rep.gamma_low = (p - 1.0) * n / (n - 1.0);
    rep.weak_norm_gamma_low = weak_lorentz_norm(u, rep.gamma_low);
    rep.weak_norm_gamma_p = weak_lorentz_norm(u, p);
    rep.condition_i = {Verdict::holds, "grid field: D_h u is bounded with compact support, so every weak norm is finite"};
    rep.outer_min = 0.0;
    rep.outer_max = 0.0;
    rep.condition_ii = {Verdict::holds, "grid field vanishes off the bounded domain"};
    rep.total_mass = ExtendedReal(sigma.total_mass());
    rep.condition_iii = {Verdict::holds, "grid measures have finite total mass"};
    rep.overall = Verdict::holds;
    return rep;
}

std::string UniquenessReport::rate_csv() const {
    std::ostringstream os;
    os << "C0,j,ln_rho,bound\n";
    for (const auto& e : entries)
        for (std::size_t j = 0; j < e.report.ln_rho.size(); ++j)
            os << format_double(e.C0) << ',' << j << ',' << format_double(e.report.ln_rho[j]) << ','
               << format_double(e.report.bound[j]) << '\n';
    return os.str();
}

UniquenessReport uniqueness_battery(const SublinearProblem& prob, std::span<const double> mesh,
                                    std::span<const double> C0_list, const SublinearOptions& opts) {
    UniquenessReport rep;
    SublinearStart start;
    if (prob.mu.is_zero()) {
        start.kind = StartKind::wolff_seed;
        rep.start = "wolff_seed";
    } else {
        rep.start = "zero";
    }
    rep.ascending = sublinear_fixed_point_radial(prob, mesh, start, opts);
    if (!rep.ascending.trace.converged) {
        rep.failed_C0.assign(C0_list.begin(), C0_list.end());
        return rep;
    }
    const double rate = prob.q / (prob.p - 1.0);
    for (double C0 : C0_list) {
        UniquenessEntry e;
        e.C0 = C0;
        e.report = contraction_experiment(prob, mesh, rep.ascending, C0, opts);
        e.predicted_iterations =
            C0 > 1.0 ? static_cast<int>(std::ceil(std::log(std::log(C0) / kContractionTarget) / std::log(1.0 / rate)))
                     : 0;
        const int actual = e.report.iterations;
        e.within_prediction = prob.mu.is_zero() ? std::abs(actual - e.predicted_iterations) <= kPredictionSlack
                                                : actual <= e.predicted_iterations + kPredictionSlack;
        e.passed = e.report.bound_holds && e.report.converged && e.report.agreement <= kAgreement;
        if (!e.passed) rep.failed_C0.push_back(C0);
        rep.entries.push_back(std::move(e));
    }
    rep.passed = rep.failed_C0.empty();
    return rep;
}

} // namespace nlpot
