#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace rwre::cli;

    CLI::App app{"Random walks in random environments: condition checks, exit strategies and simulations"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "INI experiment configuration")->required()->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "master seed (overrides [run] seed)");
        cmd->add_option("--workers", workers, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "output directory (overrides [run] out)");
    };

    std::string condition;
    auto* check = app.add_subcommand("check", "test one condition and write a report");
    check->add_option("condition", condition, "e0 | x | b | p | h | attain")
        ->required()
        ->check(CLI::IsMember({"e0", "x", "b", "p", "h", "attain"}));
    add_common(check);

    auto* explore = app.add_subcommand("explore", "build the exit strategy graph and verify its flow strength");
    add_common(explore);

    std::string kind;
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    simulate->add_option("kind", kind, "walk | wedge | slab | regen")
        ->required()
        ->check(CLI::IsMember({"walk", "wedge", "slab", "regen"}));
    add_common(simulate);

    auto* maxflow = app.add_subcommand("maxflow", "maximum flow and path decomposition of an edge list");
    add_common(maxflow);

    auto* solve = app.add_subcommand("solve", "exact quenched quantities on a sampled window");
    add_common(solve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const RunContext ctx = make_context(config_path, Overrides{seed, workers, out});
        if (check->parsed()) return cmd_check(ctx, condition);
        if (explore->parsed()) return cmd_explore(ctx);
        if (simulate->parsed()) return cmd_simulate(ctx, kind);
        if (maxflow->parsed()) return cmd_maxflow(ctx);
        return cmd_solve(ctx);
    } catch (const rwre::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
