#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rwre/config.hpp"
#include "rwre/tail.hpp"

namespace rwre::cli {

/// Exit codes: verdicts map to 0, 1, 2; everything else is an error.
inline constexpr int kExitUsage = 3;
inline constexpr int kExitError = 4;
int exit_code(Verdict v);

struct RunContext {
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::filesystem::path out_dir;
    std::filesystem::path config_dir;
    std::string config_hash;  // excludes keys that cannot change results (workers, output directory)

    /// Throws ConfigError when no seed was given in [run] or on the command line.
    [[nodiscard]] std::uint64_t master_seed() const;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
};

RunContext make_context(const std::string& config_path, const Overrides& overrides);

int cmd_check(const RunContext& ctx, const std::string& condition);
int cmd_explore(const RunContext& ctx);
int cmd_simulate(const RunContext& ctx, const std::string& kind);
int cmd_maxflow(const RunContext& ctx);
int cmd_solve(const RunContext& ctx);

}  // namespace rwre::cli
