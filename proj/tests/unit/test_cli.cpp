#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "json.hpp"
#include "nlpot/cli.hpp"
#include "nlpot/io.hpp"

using namespace nlpot;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Workspace {
    fs::path dir;

    explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("nlpot_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        write("unit_ball.measure", "kind = radial\nn = 3\nknots = (1, 1)\ntail = (1, 0, 0)\n");
        write("zero.measure", "kind = radial\nn = 3\nknots = (1, 0)\ntail = (0, 0, 0)\n");
        write("divergent.measure", "kind = radial\nn = 3\nknots = (1, 1)\ntail = (1, 1, 0)\n");
        std::string dens;
        const GridGeometry g(2, 1.0, 0.25);
        for (std::size_t i = 0; i < g.size(); ++i) {
            dens += g.radius(i) <= 0.5 ? "1" : "0";
            dens += (i + 1) % g.points_per_axis() ? "," : "\n";
        }
        write("disc.csv", dens);
        write("disc.measure", "kind = grid\nn = 2\nspacing = 0.25\nbox_half_width = 1\ndensity_file = disc.csv\n");
    }

    fs::path write(const std::string& name, const std::string& text) const {
        write_text_file(dir / name, text);
        return dir / name;
    }
    std::string read(const std::string& name) const { return read_text_file(dir / "out" / name); }
    json read_json(const std::string& name) const { return json::parse(read(name)); }

    RunResult run(const std::string& name, const std::string& text, int threads = 0) const {
        RunOptions opts;
        opts.threads = threads;
        return run_task(write(name, text + "output = out\n"), opts);
    }
};

} // namespace

TEST_CASE("wolff task on the zero measure writes zeros") {
    const Workspace ws("wolff");
    const auto res = ws.run("t.task", "task = wolff\nlabel = zero\nsigma = zero.measure\np = 2\nmesh_count = 10\n");
    REQUIRE(res.status == kExitOk);
    REQUIRE(res.artifacts.size() == 1);
    CHECK(res.artifacts[0].filename() == "wolff.zero.csv");
    const auto text = ws.read("wolff.zero.csv");
    CHECK(text.find("r,value,label\n") != std::string::npos);
    int rows = 0;
    std::size_t pos = text.find("r,value,label\n") + 14;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const auto row = text.substr(pos, end - pos);
        CHECK(row.substr(row.find(',')) == ",0,W");
        ++rows;
        pos = end + 1;
    }
    CHECK(rows == 11);
}

TEST_CASE("solve-radial on the unit ball hits the Newtonian value at r = 1") {
    const Workspace ws("solve");
    const auto res = ws.run("t.task",
                            "task = solve-radial\nlabel = ball\nsigma = unit_ball.measure\np = 2\n"
                            "mesh_min = 0.01\nmesh_max = 100\nmesh_count = 5\n");
    REQUIRE(res.status == kExitOk);
    const auto nums = read_csv_numbers(ws.read("solve-radial.ball.csv"));
    bool seen = false;
    for (std::size_t i = 0; i + 1 < nums.size(); i += 2) {
        if (std::abs(nums[i] - 1.0) > 1e-12) continue;
        seen = true;
        CHECK(std::abs(nums[i + 1] * 4.0 * kPi - 1.0) < 1e-8);
    }
    CHECK(seen);
}

TEST_CASE("verify-uniqueness writes a pass report and a rate table") {
    const Workspace ws("uniq");
    const auto res = ws.run("t.task",
                            "task = verify-uniqueness\nlabel = u\nsigma = unit_ball.measure\np = 2\nq = 0.5\n"
                            "C0_list = 2, 10\nmesh_max = 50\nmesh_count = 40\n");
    REQUIRE(res.status == kExitOk);
    const auto rep = ws.read_json("verify-uniqueness.u.json");
    CHECK(rep["passed"] == true);
    CHECK(rep["entries"].size() == 2);
    CHECK(ws.read("verify-uniqueness.u.csv").find("C0,j,ln_rho,bound\n") != std::string::npos);
}

TEST_CASE("validation failures exit with status 2") {
    const Workspace ws("invalid");
    const auto unknown = ws.run("a.task", "task = integrate\nlabel = a\n");
    CHECK(unknown.status == kExitValidation);
    CHECK(ws.read_json("integrate.a.error.json")["error"]["key"] == "task");

    const auto bad_p = ws.run("b.task", "task = solve-radial\nlabel = b\nsigma = unit_ball.measure\np = 3\n");
    CHECK(bad_p.status == kExitValidation);
    CHECK(ws.read_json("solve-radial.b.error.json")["error"]["key"] == "p");

    CHECK(ws.run("c.task", "task = solve-radial\nlabel = c\nsigma = nowhere.measure\np = 2\n").status == kExitValidation);
    CHECK(ws.run("d.task", "task = solve-radial\nlabel = d\nsigma = unit_ball.measure\np = 2\nspeed = 3\n").status ==
          kExitValidation);
    CHECK(ws.run("e.task", "task = solve-grid\nlabel = e\nsigma = unit_ball.measure\np = 1.5\n").status == kExitValidation);
    CHECK(ws.run("f.task", "task = sublinear-radial\nlabel = f\nsigma = unit_ball.measure\np = 2\nq = 1\n").status ==
          kExitValidation);
    CHECK(ws.run("g.task", "task = wolff\nlabel = ../g\nsigma = zero.measure\np = 2\n").status == kExitValidation);
}

TEST_CASE("module failures exit with status 3 and carry the error") {
    const Workspace ws("module");
    const auto res = ws.run("t.task", "task = solve-radial\nlabel = x\nsigma = divergent.measure\np = 2\n");
    CHECK(res.status == kExitNumerical);
    const auto err = ws.read_json("solve-radial.x.error.json");
    CHECK(err["error"]["type"] == "finiteness_error");
    CHECK(err["error"]["status"] == 3);

    const auto starved = ws.run("s.task", "task = solve-grid\nlabel = s\nsigma = disc.measure\np = 1.5\nmax_inner_iterations = 1\n");
    CHECK(starved.status == kExitNumerical);
    CHECK(ws.read_json("solve-grid.s.error.json")["error"]["type"] == "convergence_error");
}

TEST_CASE("outputs are byte-identical across reruns and thread counts") {
    const Workspace ws("determinism");
    const std::string doc = "task = sublinear-grid\nlabel = d\nsigma = disc.measure\nmu = disc.measure\np = 1.8\nq = 0.4\n";
    REQUIRE(ws.run("t.task", doc, 1).status == kExitOk);
    const auto field = ws.read("sublinear-grid.d.csv"), trace = ws.read("sublinear-grid.d.trace.csv"),
               report = ws.read("sublinear-grid.d.json");
    REQUIRE(ws.run("t.task", doc, 4).status == kExitOk);
    CHECK(ws.read("sublinear-grid.d.csv") == field);
    CHECK(ws.read("sublinear-grid.d.trace.csv") == trace);
    CHECK(ws.read("sublinear-grid.d.json") == report);

    const auto hash = sha256_hex(read_text_file(ws.dir / "t.task"));
    CHECK(field.find("input_sha256=" + hash) != std::string::npos);
    CHECK(trace.find("input_sha256=" + hash) != std::string::npos);
    CHECK(json::parse(report)["meta"]["input_sha256"] == hash);
    CHECK(json::parse(report)["meta"]["version"] == toolkit_version());
}

TEST_CASE("output directory override") {
    const Workspace ws("override");
    const auto doc = ws.write("t.task", "task = finiteness\nlabel = o\nsigma = unit_ball.measure\np = 2\n");
    RunOptions opts;
    opts.output_dir = ws.dir / "explicit";
    REQUIRE(run_task(doc, opts).status == kExitOk);
    CHECK(fs::exists(ws.dir / "explicit" / "finiteness.o.json"));

    const auto env_dir = ws.dir / "from_env";
    setenv("NLPOT_OUTPUT_DIR", env_dir.c_str(), 1);
    const auto res = run_task(doc);
    unsetenv("NLPOT_OUTPUT_DIR");
    REQUIRE(res.status == kExitOk);
    CHECK(fs::exists(env_dir / "finiteness.o.json"));
    CHECK(json::parse(read_text_file(env_dir / "finiteness.o.json"))["verdict"] == "finite");
}

TEST_CASE("every task name dispatches") {
    CHECK(task_names().size() == 12);
}
