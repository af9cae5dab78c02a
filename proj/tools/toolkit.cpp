#include <iostream>

#include "CLI11.hpp"
#include "nlpot/cli.hpp"
#include "nlpot/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear potential toolkit: batch runs of measure-data p-Laplace experiments"};
    app.set_version_flag("--version", std::string(nlpot::toolkit_version()));
    app.require_subcommand(1);

    std::string document;
    int threads = 0;
    std::string output;
    auto* run = app.add_subcommand("run", "Run the task described by a key-value task document");
    run->add_option("document", document, "Task document path")->required()->check(CLI::ExistingFile);
    run->add_option("--threads", threads, "Worker threads for parallel stages")->check(CLI::Range(1, 1024));
    run->add_option("--output", output, "Output directory (overrides NLPOT_OUTPUT_DIR and the document)");

    auto* tasks = app.add_subcommand("tasks", "List the task names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nlpot::kExitValidation;
    }

    if (*tasks) {
        for (const auto& t : nlpot::task_names()) std::cout << t << '\n';
        return 0;
    }
    nlpot::RunOptions opts;
    opts.threads = threads;
    opts.output_dir = output;
    const auto res = nlpot::run_task(document, opts);
    for (const auto& a : res.artifacts) std::cout << a.string() << '\n';
    if (res.status != nlpot::kExitOk) std::cerr << "toolkit: " << res.message << '\n';
    return res.status;
}
