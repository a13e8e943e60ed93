#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace arise::cli {

/// Process exit codes. Scenario generation failures are data and exit 0.
inline constexpr int kExitOk = 0;
inline constexpr int kExitScenarioFailure = 1;  // repair without success, KB diagnostics
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfrastructure = 3;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Subcommand names.
std::vector<std::string> commands();
/// Long flag names (with leading dashes) a subcommand accepts, for doc checks.
std::vector<std::string> flags(std::string_view command);

/// Exit code for an error code: 3 for provider and executor-bridge failures, 2 otherwise.
int exit_code_for(std::string_view error_code);

}  // namespace arise::cli
