#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>

#include "nlpot/cli.hpp"
#include "nlpot/error.hpp"
#include "nlpot/grid_solver.hpp"
#include "nlpot/io.hpp"
#include "nlpot/measure.hpp"
#include "nlpot/parallel.hpp"
#include "nlpot/potentials.hpp"
#include "nlpot/radial_solver.hpp"
#include "nlpot/verify.hpp"

namespace py = pybind11;
using namespace nlpot;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

double to_python(const ExtendedReal& v) {
    return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
    }
}

py::dict trace_dict(const IterationTrace& t) {
    py::list records;
    for (const auto& r : t.records)
        records.append(py::dict(py::arg("j") = r.j, py::arg("sup_value") = r.sup_value,
                                py::arg("sup_ratio") = r.sup_ratio, py::arg("monotone") = r.monotone));
    return py::dict(py::arg("converged") = t.converged, py::arg("iterations") = t.iterations,
                    py::arg("final_change") = t.final_change, py::arg("records") = records);
}

py::dict verdict_dict(const ConditionVerdict& c) {
    return py::dict(py::arg("verdict") = verdict_name(c.verdict), py::arg("note") = c.note);
}

GridField field_from(const GridGeometry& g, const Array& values) {
    if (static_cast<std::size_t>(values.size()) != g.size()) throw DomainError("field size does not match the geometry");
    GridField f;
    f.geometry = g;
    f.values = to_vector(values);
    f.fixed.assign(g.size(), 0);
    return f;
}

/// Nodal array shaped (N,) * n, first axis slowest.
Array shaped(const GridField& f) {
    std::vector<py::ssize_t> shape(f.dimension(), f.geometry.points_per_axis());
    Array out(shape);
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

SolveConfig make_config(const std::string& domain, double size, double inner_tolerance, int max_inner_iterations) {
    SolveConfig cfg;
    if (domain == "ball") cfg.domain.kind = DomainKind::ball;
    else if (domain == "box") cfg.domain.kind = DomainKind::box;
    else throw DomainError("domain must be 'ball' or 'box'");
    cfg.domain.size = size;
    cfg.inner_tolerance = inner_tolerance;
    cfg.max_inner_iterations = max_inner_iterations;
    return cfg;
}

OperatorSpec make_operator(double p) {
    OperatorSpec op;
    op.p = p;
    return op;
}

SublinearStart make_start(const std::string& start, double c0) {
    SublinearStart s;
    if (start == "wolff_seed") s.kind = StartKind::wolff_seed;
    else if (start != "zero") throw DomainError("start must be 'zero' or 'wolff_seed'");
    s.c0 = c0;
    return s;
}

py::dict profile_dict(const RadialProfile& u) {
    return py::dict(py::arg("r") = to_array(u.radii), py::arg("value") = to_array(u.values),
                    py::arg("tail_exponent") = u.tail_exponent, py::arg("label") = u.label);
}

RadialProfile profile_from(const Array& r, const Array& v, int n, double tail_exponent) {
    RadialProfile u;
    u.radii = to_vector(r);
    u.values = to_vector(v);
    u.dimension = n;
    u.tail_exponent = tail_exponent;
    u.validate();
    return u;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wolff potentials and quasilinear p-Laplace solvers";
    m.attr("__version__") = toolkit_version();

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", numerical.ptr());
    py::register_exception<FinitenessError>(m, "FinitenessError", numerical.ptr());

    py::class_<RadialMeasure>(m, "RadialMeasure",
                              "Radial measure given by knots (r, sigma(B_r)) and tail terms (a, b, c) = a r^b (ln r)^-c.")
        .def(py::init([](int n, const std::vector<std::pair<double, double>>& knots,
                         const std::vector<std::tuple<double, double, double>>& tail) {
                 std::vector<Knot> k;
                 for (auto [r, mass] : knots) k.push_back({r, mass});
                 std::vector<TailTerm> t;
                 for (auto [a, b, c] : tail) t.push_back({a, b, c});
                 return RadialMeasure(n, std::move(k), std::move(t));
             }),
             py::arg("n"), py::arg("knots"), py::arg("tail") = std::vector<std::tuple<double, double, double>>{})
        .def_static("zero", &RadialMeasure::zero, py::arg("n"))
        .def_static("uniform_ball", &RadialMeasure::uniform_ball, py::arg("n"), py::arg("radius"), py::arg("mass"))
        .def_static("lebesgue_ball", &RadialMeasure::lebesgue_ball, py::arg("n"), py::arg("radius"))
        .def_static("from_density", &RadialMeasure::from_density, py::arg("n"), py::arg("density"), py::arg("support"),
                    py::arg("knots") = 400)
        .def_static(
            "with_power_tail",
            [](int n, const std::vector<std::pair<double, double>>& knots, double b, double c) {
                std::vector<Knot> k;
                for (auto [r, mass] : knots) k.push_back({r, mass});
                return RadialMeasure::with_power_tail(n, std::move(k), b, c);
            },
            py::arg("n"), py::arg("knots"), py::arg("b"), py::arg("c"))
        .def_property_readonly("dimension", &RadialMeasure::dimension)
        .def_property_readonly("knots",
                               [](const RadialMeasure& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& k : s.knots()) out.emplace_back(k.radius, k.mass);
                                   return out;
                               })
        .def("cumulative", &RadialMeasure::cumulative, py::arg("r"), "sigma(B(0, r))")
        .def("scaled", [](const RadialMeasure& s, double l) { return scale(s, l); }, py::arg("factor"))
        .def("restricted", [](const RadialMeasure& s, double R) { return restrict_to_ball(s, R); }, py::arg("radius"));

    py::class_<GridGeometry>(m, "GridGeometry", "Uniform node grid on [-L, L]^n with spacing h.")
        .def(py::init<int, double, double>(), py::arg("n"), py::arg("half_width"), py::arg("spacing"))
        .def_property_readonly("dimension", &GridGeometry::dimension)
        .def_property_readonly("half_width", &GridGeometry::half_width)
        .def_property_readonly("spacing", &GridGeometry::spacing)
        .def_property_readonly("points_per_axis", &GridGeometry::points_per_axis)
        .def_property_readonly("size", &GridGeometry::size)
        .def("coordinates", [](const GridGeometry& g) {
            std::vector<double> x(g.points_per_axis());
            for (int i = 0; i < g.points_per_axis(); ++i) x[i] = g.coordinate(i);
            return to_array(x);
        });

    py::class_<GridMeasure>(m, "GridMeasure", "Nonnegative nodal density on a GridGeometry.")
        .def(py::init([](const GridGeometry& g, const Array& density) { return GridMeasure(g, to_vector(density)); }),
             py::arg("geometry"), py::arg("density"))
        .def_property_readonly("geometry", &GridMeasure::geometry)
        .def_property_readonly("total_mass", &GridMeasure::total_mass)
        .def("density", [](const GridMeasure& s) {
            return to_array({s.density().begin(), s.density().end()});
        });

    m.def(
        "load_measure",
        [](const std::filesystem::path& path) -> py::object {
            auto spec = load_measure_spec(path);
            if (auto* r = std::get_if<RadialMeasure>(&spec)) return py::cast(std::move(*r));
            return py::cast(std::get<GridMeasure>(std::move(spec)));
        },
        py::arg("path"), "Reads a measure spec document.");
    m.def("radial_mesh", &radial_mesh, py::arg("r_min"), py::arg("r_max"), py::arg("count"),
          py::arg("include_origin") = true);
    m.def("set_threads", &set_default_threads, py::arg("threads"));

    m.def(
        "wolff_potential",
        [](const RadialMeasure& s, double p, const std::vector<double>& x) {
            return to_python(wolff_potential(Measure(s), p, x));
        },
        py::arg("sigma"), py::arg("p"), py::arg("x"), "W_{1,p} sigma(x); inf when it diverges.");
    m.def(
        "wolff_potential",
        [](const GridMeasure& s, double p, const std::vector<double>& x) {
            return to_python(wolff_potential(Measure(s), p, x));
        },
        py::arg("sigma"), py::arg("p"), py::arg("x"));
    m.def(
        "wolff_profile",
        [](const RadialMeasure& s, double p, const Array& mesh) {
            return profile_dict(wolff_radial_profile(s, p, to_vector(mesh)));
        },
        py::arg("sigma"), py::arg("p"), py::arg("mesh"));
    m.def(
        "check_finiteness",
        [](const RadialMeasure& s, double p) {
            const auto rep = check_finiteness(s, p);
            return py::dict(py::arg("finite") = rep.finite, py::arg("tail_integral") = to_python(rep.tail_integral),
                            py::arg("core") = rep.core, py::arg("analytic_tail") = to_python(rep.analytic_tail));
        },
        py::arg("sigma"), py::arg("p"));

    py::class_<EntireRadialSolution>(m, "EntireRadialSolution",
                                     "Radial solution of -Delta_p u = sigma, entire or on B_R with zero boundary values.")
        .def(py::init([](const RadialMeasure& s, double p, std::optional<double> R) {
                 return EntireRadialSolution(s, p, {}, R.value_or(kUnboundedRadius));
             }),
             py::arg("sigma"), py::arg("p"), py::arg("outer_radius") = py::none())
        .def("__call__", &EntireRadialSolution::operator(), py::arg("r"))
        .def("__call__", [](const EntireRadialSolution& u, const Array& r) {
            std::vector<double> out(r.size());
            for (py::ssize_t i = 0; i < r.size(); ++i) out[i] = u(r.data()[i]);
            return to_array(out);
        })
        .def_property_readonly("tail_exponent", &EntireRadialSolution::tail_exponent);

    m.def(
        "solve_radial",
        [](const RadialMeasure& s, double p, const Array& mesh, std::optional<double> R) {
            const auto v = to_vector(mesh);
            return profile_dict(R ? solve_dirichlet_radial(s, p, *R, v) : solve_entire_radial(s, p, v));
        },
        py::arg("sigma"), py::arg("p"), py::arg("mesh"), py::arg("outer_radius") = py::none());

    m.def(
        "center_identity",
        [](const RadialMeasure& s, double p) {
            const auto c = radial_center_identity_check(s, p);
            return py::dict(py::arg("u0") = c.u0, py::arg("w0") = c.w0, py::arg("ratio") = c.ratio,
                            py::arg("expected") = c.expected, py::arg("vacuous") = c.vacuous,
                            py::arg("passed") = c.passed);
        },
        py::arg("sigma"), py::arg("p"));

    m.def(
        "sublinear_radial",
        [](const RadialMeasure& s, const RadialMeasure& mu, double p, double q, const Array& mesh,
           std::optional<std::string> start, double c0, double tolerance, int max_iterations) {
            const SublinearProblem prob{s, mu, p, q};
            SublinearOptions opts;
            opts.tolerance = tolerance;
            opts.max_iterations = max_iterations;
            const auto v = to_vector(mesh);
            const auto st = make_start(start.value_or(mu.is_zero() ? "wolff_seed" : "zero"), c0);
            const auto res = sublinear_fixed_point_radial(prob, v, st, opts);
            auto out = profile_dict(res.solution);
            out["trace"] = trace_dict(res.trace);
            out["self_consistency_residual"] = self_consistency_residual(prob, v, res.evaluator);
            return out;
        },
        py::arg("sigma"), py::arg("mu"), py::arg("p"), py::arg("q"), py::arg("mesh"), py::arg("start") = py::none(),
        py::arg("c0") = 0.5, py::arg("tolerance") = 1e-8, py::arg("max_iterations") = 200,
        "Fixed point of u = U[sigma u^q + mu]; the start defaults to the Wolff seed when mu = 0.");

    m.def(
        "uniqueness_battery",
        [](const RadialMeasure& s, const RadialMeasure& mu, double p, double q, const Array& mesh,
           const std::vector<double>& C0) {
            const auto rep = uniqueness_battery({s, mu, p, q}, to_vector(mesh), C0);
            py::list entries;
            for (const auto& e : rep.entries)
                entries.append(py::dict(py::arg("C0") = e.C0, py::arg("iterations") = e.report.iterations,
                                        py::arg("predicted_iterations") = e.predicted_iterations,
                                        py::arg("within_prediction") = e.within_prediction,
                                        py::arg("bound_holds") = e.report.bound_holds,
                                        py::arg("agreement") = e.report.agreement,
                                        py::arg("ln_rho") = to_array(e.report.ln_rho),
                                        py::arg("bound") = to_array(e.report.bound), py::arg("passed") = e.passed));
            return py::dict(py::arg("passed") = rep.passed, py::arg("start") = rep.start, py::arg("entries") = entries,
                            py::arg("failed_C0") = rep.failed_C0);
        },
        py::arg("sigma"), py::arg("mu"), py::arg("p"), py::arg("q"), py::arg("mesh"), py::arg("C0_list"));

    m.def(
        "bilateral_report",
        [](const RadialMeasure& s, double p, const Array& mesh) {
            const auto rep = bilateral_ratio_report(solve_entire_radial(s, p, to_vector(mesh)), s, p);
            return py::dict(py::arg("min_ratio") = rep.min_ratio, py::arg("max_ratio") = rep.max_ratio,
                            py::arg("k_empirical") = rep.k_empirical, py::arg("center_ratio") = rep.center_ratio,
                            py::arg("evaluated") = rep.evaluated, py::arg("status") = verdict_name(rep.status));
        },
        py::arg("sigma"), py::arg("p"), py::arg("mesh"));

    m.def(
        "reachability",
        [](const RadialMeasure& s, double p, const Array& r, const Array& u, double tail_exponent) {
            const auto rep = reachability_classifier(profile_from(r, u, s.dimension(), tail_exponent), s, p);
            return py::dict(py::arg("condition_i") = verdict_dict(rep.condition_i),
                            py::arg("condition_ii") = verdict_dict(rep.condition_ii),
                            py::arg("condition_iii") = verdict_dict(rep.condition_iii),
                            py::arg("weak_norm_gamma_low") = rep.weak_norm_gamma_low,
                            py::arg("weak_norm_gamma_p") = rep.weak_norm_gamma_p,
                            py::arg("total_mass") = to_python(rep.total_mass),
                            py::arg("overall") = verdict_name(rep.overall));
        },
        py::arg("sigma"), py::arg("p"), py::arg("r"), py::arg("u"), py::arg("tail_exponent") = 0.0);

    m.def(
        "weak_lorentz_norm",
        [](const GridGeometry& g, const Array& u, double gamma) { return weak_lorentz_norm(field_from(g, u), gamma); },
        py::arg("geometry"), py::arg("u"), py::arg("gamma"));

    m.def(
        "solve_grid",
        [](const GridMeasure& nu, double p, const std::string& domain, std::optional<double> size,
           double inner_tolerance, int max_inner_iterations) {
            const auto cfg = make_config(domain, size.value_or(nu.geometry().half_width()), inner_tolerance,
                                         max_inner_iterations);
            SolveStats stats;
            const auto u = solve_dirichlet_grid(nu, make_operator(p), cfg, &stats);
            return py::dict(py::arg("u") = shaped(u), py::arg("newton_steps") = stats.newton_steps,
                            py::arg("final_residual") = stats.final_residual,
                            py::arg("residual_history") = to_array(stats.residual_history));
        },
        py::arg("nu"), py::arg("p"), py::arg("domain") = "ball", py::arg("size") = py::none(),
        py::arg("inner_tolerance") = 1e-9, py::arg("max_inner_iterations") = 100,
        "Dirichlet p-Laplace solve on the ball or box of the given size (default: the grid half-width).");

    m.def(
        "sublinear_grid",
        [](const GridMeasure& s, const GridMeasure& mu, double p, double q, const std::string& domain,
           std::optional<double> size) {
            const auto cfg = make_config(domain, size.value_or(s.geometry().half_width()), 1e-9, 100);
            const auto res = sublinear_minimal_grid(s, mu, q, make_operator(p), cfg);
            return py::dict(py::arg("u") = shaped(res.solution), py::arg("trace") = trace_dict(res.trace));
        },
        py::arg("sigma"), py::arg("mu"), py::arg("p"), py::arg("q"), py::arg("domain") = "ball",
        py::arg("size") = py::none());

    m.def(
        "capacity_ball",
        [](const GridGeometry& g, double radius, double p, const std::string& domain, std::optional<double> size) {
            return p_capacity_ball(g, radius, make_operator(p), make_config(domain, size.value_or(g.half_width()), 1e-9, 100));
        },
        py::arg("geometry"), py::arg("radius"), py::arg("p"), py::arg("domain") = "ball", py::arg("size") = py::none(),
        "Minimized sum |D u|^p h^n over u = 1 on the closed ball and 0 off the domain.");

    m.def("task_names", &task_names);
    m.def(
        "run_task",
        [](const std::filesystem::path& doc, int threads, std::optional<std::filesystem::path> output_dir) {
            RunOptions opts;
            opts.threads = threads;
            if (output_dir) opts.output_dir = *output_dir;
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run_task(doc, opts);
            }
            std::vector<std::string> artifacts;
            for (const auto& a : res.artifacts) artifacts.push_back(a.string());
            return py::dict(py::arg("status") = res.status, py::arg("artifacts") = artifacts,
                            py::arg("message") = res.message);
        },
        py::arg("document"), py::arg("threads") = 0, py::arg("output_dir") = py::none(),
        "Runs a task document; status 0 ok, 2 validation error, 3 numerical error.");
}
