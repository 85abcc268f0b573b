#include <iostream>
#include <utility>

#include "CLI11.hpp"

#include "src/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generalized boundary value problems: solve, check, sweep, approximate"};
    app.require_subcommand(1);

    gbvp::cli::RunOptions opt;
    std::size_t grid = 0;
    const std::pair<const char*, const char*> commands[] = {
        {"solve", "solve one problem and check well-posedness"},
        {"check", "well-posedness and limit conditions for a family"},
        {"sweep", "per-point deviations and the two-sided bound for a family"},
        {"approximate", "run the multipoint approximation pipeline"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config_path, "problem config (JSON)")->required();
        sub->add_option("--out", opt.out_dir, "output directory")->required();
        sub->add_option("--seed", opt.seed, "seed for randomized test sets")->capture_default_str();
        sub->add_option("--grid", grid, "override the grid interval count (even)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : gbvp::cli::kExitSchema;
    }
    opt.command = app.get_subcommands().front()->get_name();
    if (grid != 0) opt.grid = grid;
    return gbvp::cli::run(opt, std::cout);
}
