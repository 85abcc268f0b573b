#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace gbvp::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerdictFailed = 1,
    kExitSchema = 2,
    kExitNumerical = 3,
};

struct RunOptions {
    std::string command;
    std::string config_path;
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    std::optional<std::size_t> grid;
};

/// Runs one command, writes its artifacts to out_dir and a summary to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace gbvp::cli
