#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace loadcast {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitRunFailure = 4 };

struct CommandOptions {
    std::string command;  ///< gen-data, correlate, simulate-forecast, sweep or ev-study
    std::optional<std::filesystem::path> config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    bool overwrite = false;
    bool timing = false;  ///< sweep: add wall-clock training times to the CSV
};

/// Runs one command into an atomically created output directory and returns the exit code.
/// Errors are reported on `log`.
int run_command(const CommandOptions& options, std::ostream& log);

} // namespace loadcast
