#pragma once

// Batch experiment runner behind the `ergo` command-line tool: a JSON config
// (schema 1) selects inputs, the subcommand selects the computation, and
// reports are written as CSV/JSON under an output directory.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ergo {

enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Validation = 2,
    Budget = 3,
    Consistency = 4,
};

struct Diagnostic {
    std::string path;
    std::string message;
};

struct ExperimentConfig {
    std::string command;
    nlohmann::json doc = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
};

struct RunResult {
    ExitCode code = ExitCode::Ok;
    std::string message;
    std::vector<std::filesystem::path> outputs;
};

/// Subcommands accepted by run().
[[nodiscard]] const std::vector<std::string>& experiment_commands();

/// Parses config text. Throws InputError with a "line L, column C" diagnostic
/// on malformed JSON.
[[nodiscard]] nlohmann::json parse_config_text(std::string_view text);

/// Empty when the config is valid for its command.
[[nodiscard]] std::vector<Diagnostic> validate(const ExperimentConfig& config);

/// Validates, executes, and writes every output atomically. Nothing is
/// written unless the whole computation succeeds.
[[nodiscard]] RunResult run(const ExperimentConfig& config);

}  // namespace ergo
