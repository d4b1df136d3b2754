#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rdesplit {

/// Exit-code contract of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumeric = 3 };

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    bool oracle = false;
    std::string rate_kind = "sup";  // sup | holder | rational
};

/// Runs one subcommand (solve, rates, check-z, davie, compare-schemes), writing into
/// options.out a copy of the canonical config plus the command's CSV and JSON files.
/// Never throws: errors are reported on `err` and mapped onto the exit-code contract.
int run_command(const std::string& command, const RunOptions& options, std::ostream& log, std::ostream& err);

}  // namespace rdesplit
