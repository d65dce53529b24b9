#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "logcal/experiment.hpp"

// Exit status: 0 when every check passes, 1 when a check fails, 2 on errors.
int main(int argc, char** argv)
{
    CLI::App app{"Logarithmic Schrodinger operators on closed manifolds: experiment runner"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool quiet = false;
    std::vector<std::string> inputs;

    app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized probes (overrides the config)");
    app.add_flag("--quiet", quiet, "suppress the summary");

    for (const auto& name : logcal::subcommands()) {
        auto* sub = app.add_subcommand(name);
        if (name == "compare") {
            sub->add_option("files", inputs, "two Gel'fand data files")->expected(0, 2);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        logcal::ExperimentConfig cfg = logcal::load_config(config_path);
        if (*seed_opt) {
            cfg.seed = seed;
            cfg.shape.seed = seed;
        }
        logcal::RunContext ctx;
        ctx.out = out_dir.empty() ? cfg.output_dir : out_dir;
        ctx.quiet = quiet;
        ctx.inputs = inputs;

        const logcal::RunOutcome outcome = logcal::run_experiment(sub, cfg, ctx);
        if (!quiet) {
            for (const auto& line : outcome.summary) {
                fmt::print("{}\n", line);
            }
            for (const auto& a : outcome.artifacts) {
                fmt::print("wrote {}\n", (ctx.out / a).string());
            }
            fmt::print("{}: {}\n", sub, outcome.passed ? "PASS" : "FAIL");
        }
        return outcome.passed ? 0 : 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
