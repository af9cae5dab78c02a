#include "nlpot/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include "json.hpp"
#include "nlpot/error.hpp"
#include "nlpot/grid_solver.hpp"
#include "nlpot/io.hpp"
#include "nlpot/numeric.hpp"
#include "nlpot/parallel.hpp"
#include "nlpot/potentials.hpp"
#include "nlpot/radial_solver.hpp"
#include "nlpot/verify.hpp"

namespace nlpot {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommonKeys{"task", "label", "output"};
const std::vector<std::string> kMeshKeys{"mesh_min", "mesh_max", "mesh_count", "mesh_origin"};
const std::vector<std::string> kGridKeys{"domain",          "domain_size",         "epsilon_schedule",
                                         "inner_tolerance", "stage_tolerance",     "max_inner_iterations",
                                         "weight_file",     "alpha",               "beta"};
const std::vector<std::string> kSublinearKeys{"mu", "q", "tolerance", "max_iterations", "divergence_bound"};

std::vector<std::string> keys_of(std::initializer_list<std::vector<std::string>> groups,
                                 std::initializer_list<const char*> extra = {}) {
    std::vector<std::string> out;
    for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    for (const char* k : extra) out.emplace_back(k);
    return out;
}

json extended(const ExtendedReal& v) { return v.is_infinite() ? json("inf") : json(v.value()); }

/// State of one invocation. `computing` separates validation failures from module failures.
struct Context {
    KeyValueDocument doc;
    fs::path base;
    fs::path out_dir;
    OutputMeta meta;
    std::vector<fs::path> artifacts;
    bool computing = false;

    fs::path path_for(const std::string& suffix) const { return out_dir / (meta.task + "." + meta.label + suffix); }

    void write(const std::string& suffix, const std::string& body) {
        const auto path = path_for(suffix);
        write_text_file(path, body);
        artifacts.push_back(path);
    }
    void write_csv(const std::string& suffix, const std::string& body) { write(suffix, meta.comment_line() + body); }
    void write_json(json body) {
        json out;
        out["meta"] = {{"toolkit", "nlpot"},
                       {"version", toolkit_version()},
                       {"task", meta.task},
                       {"label", meta.label},
                       {"input_sha256", meta.input_sha256}};
        for (auto& [k, v] : body.items()) out[k] = v;
        write(".json", out.dump(2) + "\n");
    }

    double p() const { return doc.number("p"); }

    Measure measure(const std::string& key) const {
        fs::path path = doc.text(key);
        if (path.is_relative()) path = base / path;
        if (!fs::exists(path)) throw ParseError(key, "no such file: " + path.string());
        return load_measure_spec(path);
    }
    RadialMeasure radial(const std::string& key) const {
        auto m = measure(key);
        if (!std::holds_alternative<RadialMeasure>(m)) throw ParseError(key, "expected a radial measure");
        return std::get<RadialMeasure>(std::move(m));
    }
    GridMeasure grid(const std::string& key) const {
        auto m = measure(key);
        if (!std::holds_alternative<GridMeasure>(m)) throw ParseError(key, "expected a grid measure");
        return std::get<GridMeasure>(std::move(m));
    }

    std::vector<double> mesh() const {
        const double lo = doc.number_or("mesh_min", 1e-3), hi = doc.number_or("mesh_max", 1e3);
        const int count = doc.integer_or("mesh_count", 200);
        if (!(lo > 0.0)) throw ParseError("mesh_min", "must be positive");
        if (!(hi > lo)) throw ParseError("mesh_max", "must exceed mesh_min");
        if (count < 2) throw ParseError("mesh_count", "must be at least 2");
        return radial_mesh(lo, hi, count, doc.flag_or("mesh_origin", true));
    }

    double outer_radius() const {
        if (!doc.has("outer_radius")) return kUnboundedRadius;
        const double R = doc.number("outer_radius");
        if (!(R > 0.0)) throw ParseError("outer_radius", "must be positive");
        return R;
    }

    SolveConfig solve_config(const GridGeometry& g) const {
        SolveConfig cfg;
        const auto kind = doc.text_or("domain", "ball");
        if (kind == "ball") cfg.domain.kind = DomainKind::ball;
        else if (kind == "box") cfg.domain.kind = DomainKind::box;
        else throw ParseError("domain", "expected ball or box");
        cfg.domain.size = doc.number_or("domain_size", g.half_width());
        if (!(cfg.domain.size > 0.0) || cfg.domain.size > g.half_width())
            throw ParseError("domain_size", "must lie in (0, box_half_width]");
        if (doc.has("epsilon_schedule")) cfg.epsilon_schedule = doc.numbers("epsilon_schedule");
        cfg.inner_tolerance = doc.number_or("inner_tolerance", cfg.inner_tolerance);
        cfg.stage_tolerance = doc.number_or("stage_tolerance", cfg.stage_tolerance);
        cfg.max_inner_iterations = doc.integer_or("max_inner_iterations", cfg.max_inner_iterations);
        if (!(cfg.inner_tolerance > 0.0)) throw ParseError("inner_tolerance", "must be positive");
        if (!(cfg.stage_tolerance > 0.0)) throw ParseError("stage_tolerance", "must be positive");
        if (cfg.max_inner_iterations < 1) throw ParseError("max_inner_iterations", "must be at least 1");
        cfg.validate();
        return cfg;
    }

    OperatorSpec op(const GridGeometry& g) const {
        OperatorSpec o;
        o.p = p();
        if (doc.has("weight_file")) {
            fs::path path = doc.text("weight_file");
            if (path.is_relative()) path = base / path;
            if (!fs::exists(path)) throw ParseError("weight_file", "no such file: " + path.string());
            o.weight = read_csv_numbers(read_text_file(path));
            o.alpha = doc.number("alpha");
            o.beta = doc.number("beta");
        }
        require_p(o.p, g.dimension());
        o.validate(g.dimension(), g.size());
        return o;
    }

    static void require_p(double p, int n) {
        if (!(p > 1.0 && p < n)) throw ParseError("p", "must satisfy 1 < p < n = " + std::to_string(n));
    }

    double q(double p) const {
        const double v = doc.number("q");
        if (!(v > 0.0 && v < p - 1.0)) throw ParseError("q", "must satisfy 0 < q < p - 1");
        return v;
    }

    SublinearOptions sublinear_options() const {
        SublinearOptions o;
        o.tolerance = doc.number_or("tolerance", o.tolerance);
        o.max_iterations = doc.integer_or("max_iterations", o.max_iterations);
        o.divergence_bound = doc.number_or("divergence_bound", o.divergence_bound);
        o.outer_radius = outer_radius();
        if (!(o.tolerance > 0.0)) throw ParseError("tolerance", "must be positive");
        if (o.max_iterations < 1) throw ParseError("max_iterations", "must be at least 1");
        if (!(o.divergence_bound > 0.0)) throw ParseError("divergence_bound", "must be positive");
        return o;
    }

    SublinearProblem sublinear_problem() const {
        const auto sigma = radial("sigma");
        const double p = this->p();
        require_p(p, sigma.dimension());
        auto mu = doc.has("mu") ? radial("mu") : RadialMeasure::zero(sigma.dimension());
        if (mu.dimension() != sigma.dimension()) throw ParseError("mu", "dimension differs from sigma");
        return {sigma, std::move(mu), p, q(p)};
    }

    std::vector<double> positive_list(const std::string& key) const {
        auto v = doc.numbers(key);
        if (v.empty()) throw ParseError(key, "empty list");
        for (double x : v)
            if (!(x > 0.0)) throw ParseError(key, "entries must be positive");
        return v;
    }
};

json stats_json(const SolveStats& st) {
    return {{"newton_steps", st.newton_steps},
            {"cg_iterations", st.cg_iterations},
            {"final_residual", st.final_residual},
            {"final_energy", st.final_energy}};
}

json trace_json(const IterationTrace& t) {
    return {{"converged", t.converged},
            {"iterations", t.iterations},
            {"final_change", t.final_change},
            {"all_monotone", t.all_monotone()}};
}

json verdict_json(const ConditionVerdict& c) { return {{"verdict", to_string(c.verdict)}, {"note", c.note}}; }

json reachability_json(const ReachabilityReport& r) {
    return {{"gamma_low", r.gamma_low},
            {"weak_norm_gamma_low", r.weak_norm_gamma_low},
            {"weak_norm_gamma_p", r.weak_norm_gamma_p},
            {"condition_i", verdict_json(r.condition_i)},
            {"outer_min", r.outer_min},
            {"outer_max", r.outer_max},
            {"condition_ii", verdict_json(r.condition_ii)},
            {"total_mass", extended(r.total_mass)},
            {"condition_iii", verdict_json(r.condition_iii)},
            {"overall", to_string(r.overall)}};
}

json finiteness_json(const FinitenessReport& f) {
    return {{"verdict", f.finite ? "finite" : "infinite"},
            {"tail_integral", extended(f.tail_integral)},
            {"breakdown", {{"core", f.core}, {"analytic_tail", extended(f.analytic_tail)}}}};
}

SublinearStart start_for(const Context& c, const SublinearProblem& prob) {
    SublinearStart s;
    const auto kind = c.doc.text_or("start", prob.mu.is_zero() ? "wolff_seed" : "zero");
    if (kind == "zero") s.kind = StartKind::zero;
    else if (kind == "wolff_seed") s.kind = StartKind::wolff_seed;
    else throw ParseError("start", "expected zero or wolff_seed");
    s.c0 = c.doc.number_or("c0", s.c0);
    if (!(s.c0 > 0.0)) throw ParseError("c0", "must be positive");
    return s;
}

void task_wolff(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys}, {"sigma", "p"}));
    const auto m = c.measure("sigma");
    const double p = c.p();
    Context::require_p(p, dimension_of(m));
    if (const auto* r = std::get_if<RadialMeasure>(&m)) {
        const auto mesh = c.mesh();
        c.computing = true;
        auto w = wolff_radial_profile(*r, p, mesh);
        w.label = "W";
        c.write(".csv", profile_csv(w, c.meta, true));
        return;
    }
    const auto& g = std::get<GridMeasure>(m);
    std::vector<std::size_t> nodes(g.geometry().size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
    c.computing = true;
    GridField f;
    f.geometry = g.geometry();
    f.values = wolff_at_nodes(g, p, nodes);
    f.fixed.assign(f.values.size(), 0);
    f.label = "W";
    c.write(".csv", field_csv(f, c.meta));
}

void task_finiteness(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys}, {"sigma", "p"}));
    const auto sigma = c.radial("sigma");
    const double p = c.p();
    Context::require_p(p, sigma.dimension());
    c.computing = true;
    c.write_json(finiteness_json(check_finiteness(sigma, p)));
}

void task_solve_radial(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys}, {"sigma", "p", "outer_radius"}));
    const auto sigma = c.radial("sigma");
    const double p = c.p();
    Context::require_p(p, sigma.dimension());
    const auto mesh = c.mesh();
    const double R = c.outer_radius();
    c.computing = true;
    const auto u = std::isfinite(R) ? solve_dirichlet_radial(sigma, p, R, mesh) : solve_entire_radial(sigma, p, mesh);
    c.write(".csv", profile_csv(u, c.meta));
}

void task_sublinear_radial(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys, kSublinearKeys}, {"sigma", "p", "start", "c0", "outer_radius"}));
    const auto prob = c.sublinear_problem();
    const auto mesh = c.mesh();
    const auto start = start_for(c, prob);
    const auto opts = c.sublinear_options();
    c.computing = true;
    prob.validate();
    const auto res = sublinear_fixed_point_radial(prob, mesh, start, opts);
    const double residual = self_consistency_residual(prob, mesh, res.evaluator, opts.outer_radius);
    c.write(".csv", profile_csv(res.solution, c.meta));
    c.write_csv(".trace.csv", res.trace.to_csv());
    json body = trace_json(res.trace);
    body["self_consistency_residual"] = residual;
    body["sup"] = res.solution.max_value();
    c.write_json(body);
}

void task_contraction(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys, kSublinearKeys}, {"sigma", "p", "C0", "start", "c0", "outer_radius"}));
    const auto prob = c.sublinear_problem();
    const auto mesh = c.mesh();
    const auto start = start_for(c, prob);
    const auto opts = c.sublinear_options();
    const double C0 = c.doc.number("C0");
    if (!(C0 >= 1.0)) throw ParseError("C0", "must be at least 1");
    c.computing = true;
    prob.validate();
    const auto asc = sublinear_fixed_point_radial(prob, mesh, start, opts);
    if (!asc.trace.converged) throw ConvergenceError("ascending iteration did not converge", {});
    const auto rep = contraction_experiment(prob, mesh, asc, C0, opts);
    std::string rate = "j,ln_rho,bound\n";
    for (std::size_t j = 0; j < rep.ln_rho.size(); ++j)
        rate += std::to_string(j) + "," + format_double(rep.ln_rho[j]) + "," + format_double(rep.bound[j]) + "\n";
    c.write_csv(".csv", rate);
    c.write(".limit.csv", profile_csv(rep.limit, c.meta));
    c.write_json({{"C0", rep.C0},
                  {"bound_holds", rep.bound_holds},
                  {"converged", rep.converged},
                  {"iterations", rep.iterations},
                  {"agreement", rep.agreement},
                  {"ascending", trace_json(asc.trace)}});
}

void task_solve_grid(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kGridKeys}, {"sigma", "p"}));
    const auto nu = c.grid("sigma");
    const auto op = c.op(nu.geometry());
    const auto cfg = c.solve_config(nu.geometry());
    c.computing = true;
    SolveStats st;
    auto u = solve_dirichlet_grid(nu, op, cfg, &st);
    u.label = "u";
    c.write(".csv", field_csv(u, c.meta));
    json body = stats_json(st);
    body["max_value"] = u.max_value();
    c.write_json(body);
}

void task_minimal_ladder(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kGridKeys}, {"sigma", "p", "k_list"}));
    const auto sigma = c.grid("sigma");
    const auto op = c.op(sigma.geometry());
    const auto cfg = c.solve_config(sigma.geometry());
    const auto ks = c.positive_list("k_list");
    c.computing = true;
    const auto rep = minimal_solution_grid(sigma, op, ks, cfg);
    json steps = json::array();
    for (const auto& s : rep.steps)
        steps.push_back({{"k", s.k},
                         {"restricted_mass", s.restricted_mass},
                         {"sublevel_is_whole_ball", s.sublevel_is_whole_ball},
                         {"max_value", s.field.max_value()}});
    auto last = rep.steps.back().field;
    last.label = "u_k";
    c.write(".csv", field_csv(last, c.meta));
    c.write_json({{"steps", steps},
                  {"max_decrease", rep.max_decrease},
                  {"slack", rep.slack},
                  {"monotone", rep.monotone}});
}

void task_sublinear_grid(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kGridKeys, kSublinearKeys}, {"sigma", "p"}));
    const auto sigma = c.grid("sigma");
    const auto op = c.op(sigma.geometry());
    const auto cfg = c.solve_config(sigma.geometry());
    const double q = c.q(op.p);
    const auto mu = c.doc.has("mu") ? c.grid("mu") : GridMeasure::zero(sigma.geometry());
    if (!mu.geometry().same_as(sigma.geometry())) throw ParseError("mu", "grid differs from sigma");
    GridSublinearOptions opts;
    opts.tolerance = c.doc.number_or("tolerance", opts.tolerance);
    opts.max_iterations = c.doc.integer_or("max_iterations", opts.max_iterations);
    opts.divergence_bound = c.doc.number_or("divergence_bound", opts.divergence_bound);
    if (!(opts.tolerance > 0.0)) throw ParseError("tolerance", "must be positive");
    if (opts.max_iterations < 1) throw ParseError("max_iterations", "must be at least 1");
    c.computing = true;
    auto res = sublinear_minimal_grid(sigma, mu, q, op, cfg, opts);
    res.solution.label = "u";
    c.write(".csv", field_csv(res.solution, c.meta));
    c.write_csv(".trace.csv", res.trace.to_csv());
    json body = trace_json(res.trace);
    body["max_value"] = res.solution.max_value();
    c.write_json(body);
}

void task_capacity(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kGridKeys}, {"n", "spacing", "box_half_width", "p", "condenser_radius"}));
    const int n = c.doc.integer("n");
    if (n != 2 && n != 3) throw ParseError("n", "grid problems need n = 2 or 3");
    const double h = c.doc.number("spacing"), L = c.doc.number("box_half_width");
    if (!(h > 0.0)) throw ParseError("spacing", "must be positive");
    if (!(L > h)) throw ParseError("box_half_width", "must exceed the spacing");
    const GridGeometry g(n, L, h);
    const auto op = c.op(g);
    const auto cfg = c.solve_config(g);
    const double r = c.doc.number("condenser_radius");
    if (!(r > 0.0 && r < cfg.domain.size)) throw ParseError("condenser_radius", "must lie in (0, domain_size)");
    c.computing = true;
    SolveStats st;
    const double cap = p_capacity_ball(g, r, op, cfg, &st);
    json body{{"capacity", cap}};
    if (cfg.domain.kind == DomainKind::ball && op.constant_weight()) {
        // condenser B_r in B_R: s_{n-1} ((n-p)/(p-1))^(p-1) (r^e - R^e)^(1-p), e = (p-n)/(p-1)
        const double p = op.p, R = cfg.domain.size, e = (p - n) / (p - 1.0);
        const double exact = sphere_area(n) * std::pow((n - p) / (p - 1.0), p - 1.0) *
                             std::pow(std::pow(r, e) - std::pow(R, e), 1.0 - p);
        body["reference"] = exact;
        body["relative_error"] = cap / exact - 1.0;
    }
    body["stats"] = stats_json(st);
    c.write_json(body);
}

void task_verify_bilateral(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys}, {"sigma", "p"}));
    const auto sigma = c.radial("sigma");
    const double p = c.p();
    Context::require_p(p, sigma.dimension());
    const auto mesh = c.mesh();
    c.computing = true;
    const auto u = solve_entire_radial(sigma, p, mesh);
    const auto w = wolff_radial_profile(sigma, p, mesh);
    const auto rep = bilateral_ratio_report(u, sigma, p);
    std::string table = "r,u,wolff,ratio\n";
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const bool used = u.values[i] >= 1e-14 || w.values[i] >= 1e-14;
        table += format_double(mesh[i]) + "," + format_double(u.values[i]) + "," + format_double(w.values[i]) + "," +
                 (used ? format_double(u.values[i] / w.values[i]) : std::string("nan")) + "\n";
    }
    c.write_csv(".csv", table);
    c.write_json({{"min_ratio", rep.min_ratio},
                  {"max_ratio", rep.max_ratio},
                  {"k_empirical", rep.k_empirical},
                  {"center_ratio", rep.center_ratio},
                  {"center_expected", std::pow(sphere_area(sigma.dimension()), -1.0 / (p - 1.0))},
                  {"evaluated", rep.evaluated},
                  {"evaluation_set", rep.evaluation_set},
                  {"status", to_string(rep.status)}});
}

void task_verify_uniqueness(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys, kSublinearKeys}, {"sigma", "p", "C0_list", "outer_radius"}));
    const auto prob = c.sublinear_problem();
    const auto mesh = c.mesh();
    const auto opts = c.sublinear_options();
    const auto C0 = c.positive_list("C0_list");
    for (double v : C0)
        if (v < 1.0) throw ParseError("C0_list", "entries must be at least 1");
    c.computing = true;
    prob.validate();
    const auto rep = uniqueness_battery(prob, mesh, C0, opts);
    json entries = json::array();
    for (const auto& e : rep.entries)
        entries.push_back({{"C0", e.C0},
                           {"iterations", e.report.iterations},
                           {"predicted_iterations", e.predicted_iterations},
                           {"within_prediction", e.within_prediction},
                           {"bound_holds", e.report.bound_holds},
                           {"converged", e.report.converged},
                           {"agreement", e.report.agreement},
                           {"passed", e.passed}});
    c.write_csv(".csv", rep.rate_csv());
    c.write_json({{"passed", rep.passed},
                  {"start", rep.start},
                  {"ascending", trace_json(rep.ascending.trace)},
                  {"failed_C0", rep.failed_C0},
                  {"entries", entries}});
}

void task_classify(Context& c) {
    c.doc.require_known(keys_of({kCommonKeys, kMeshKeys, kGridKeys}, {"sigma", "p"}));
    const auto m = c.measure("sigma");
    const double p = c.p();
    Context::require_p(p, dimension_of(m));
    if (const auto* sigma = std::get_if<RadialMeasure>(&m)) {
        const auto mesh = c.mesh();
        c.computing = true;
        const auto fin = check_finiteness(*sigma, p);
        json body{{"finiteness", finiteness_json(fin)}};
        body["reachability"] = fin.finite ? reachability_json(reachability_classifier(
                                                 solve_entire_radial(*sigma, p, mesh), *sigma, p))
                                          : json(nullptr);
        c.write_json(body);
        return;
    }
    const auto& nu = std::get<GridMeasure>(m);
    const auto op = c.op(nu.geometry());
    const auto cfg = c.solve_config(nu.geometry());
    c.computing = true;
    const auto u = solve_dirichlet_grid(nu, op, cfg);
    c.write_json({{"reachability", reachability_json(reachability_classifier(u, nu, p))}});
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
    static const std::map<std::string, std::function<void(Context&)>> tasks{
        {"wolff", task_wolff},
        {"finiteness", task_finiteness},
        {"solve-radial", task_solve_radial},
        {"sublinear-radial", task_sublinear_radial},
        {"contraction", task_contraction},
        {"solve-grid", task_solve_grid},
        {"minimal-ladder", task_minimal_ladder},
        {"sublinear-grid", task_sublinear_grid},
        {"capacity", task_capacity},
        {"verify-bilateral", task_verify_bilateral},
        {"verify-uniqueness", task_verify_uniqueness},
        {"classify", task_classify},
    };
    return tasks;
}

bool safe_label(const std::string& s) {
    if (s.empty() || s == "." || s == "..") return false;
    for (char ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
    return true;
}

void write_error(Context& c, int status, const std::exception& e) {
    json err{{"status", status}, {"type", "error"}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        err["type"] = "parse_error";
        err["key"] = pe->key();
    } else if (dynamic_cast<const InvariantError*>(&e)) {
        err["type"] = "invariant_error";
    } else if (dynamic_cast<const DomainError*>(&e)) {
        err["type"] = "domain_error";
    } else if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
        err["type"] = "convergence_error";
        err["residual_history"] = ce->residual_history();
    } else if (dynamic_cast<const DivergenceError*>(&e)) {
        err["type"] = "divergence_error";
    } else if (dynamic_cast<const FinitenessError*>(&e)) {
        err["type"] = "finiteness_error";
    } else if (dynamic_cast<const NumericalError*>(&e)) {
        err["type"] = "numerical_error";
    }
    json out;
    out["meta"] = {{"toolkit", "nlpot"},
                   {"version", toolkit_version()},
                   {"task", c.meta.task},
                   {"label", c.meta.label},
                   {"input_sha256", c.meta.input_sha256}};
    out["error"] = err;
    try {
        fs::create_directories(c.out_dir);
        c.write(".error.json", out.dump(2) + "\n");
    } catch (const std::exception&) {
        // the status code still reports the failure
    }
}

} // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

RunResult run_task(const fs::path& document, const RunOptions& opts) {
    Context c;
    c.base = document.parent_path();
    c.meta.task = "unknown";
    c.meta.label = "run";
    c.out_dir = opts.output_dir;
    if (c.out_dir.empty())
        if (const char* env = std::getenv("NLPOT_OUTPUT_DIR"); env && *env) c.out_dir = env;
    RunResult result;
    const auto fail = [&](int status, const std::exception& e) {
        if (c.out_dir.empty()) c.out_dir = c.base.empty() ? fs::path(".") : c.base;
        write_error(c, status, e);
        result.status = status;
        result.message = e.what();
        result.artifacts = c.artifacts;
        return result;
    };
    try {
        const auto text = read_text_file(document);
        c.meta.input_sha256 = sha256_hex(text);
        c.doc = KeyValueDocument::parse(text);
        if (c.doc.has("label")) {
            if (!safe_label(c.doc.text("label"))) throw ParseError("label", "use letters, digits, '_', '-' or '.'");
            c.meta.label = c.doc.text("label");
        }
        if (c.out_dir.empty()) {
            c.out_dir = c.doc.has("output") ? fs::path(c.doc.text("output")) : fs::path();
            if (c.out_dir.is_relative()) c.out_dir = c.base / c.out_dir;
            if (c.out_dir.empty()) c.out_dir = ".";
        }
        const auto& task = c.doc.text("task");
        if (safe_label(task)) c.meta.task = task;
        const auto it = registry().find(task);
        if (it == registry().end()) throw ParseError("task", "unknown task '" + task + "'");
        if (opts.threads > 0) set_default_threads(opts.threads);
        fs::create_directories(c.out_dir);
        it->second(c);
    } catch (const std::exception& e) {
        return fail(c.computing ? kExitNumerical : kExitValidation, e);
    }
    result.artifacts = c.artifacts;
    return result;
}

} // namespace nlpot
