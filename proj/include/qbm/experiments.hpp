#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qbm/serialize.hpp"
#include "qbm/targets.hpp"

namespace qbm {

inline constexpr const char* kVersionTag = "qbm-lab 0.1.0";

enum class Command { pretrain, train, scan_hessian, scan_scaling, bounds };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    bool small = false;
    std::filesystem::path config_dir = ".";  // base for relative paths in the config
};

struct CommandResult {
    json summary;
    std::vector<std::filesystem::path> files;
};

// Parses a config file. A manifest written by a previous run is accepted
// as well; its recorded config is returned.
json load_config(const std::filesystem::path& path);

// Unwraps a manifest document, checking that it belongs to `command`.
json unwrap_manifest(const json& document, Command command);

// Validates the config (unknown keys, types, mandatory seed), applies the
// --small preset and seed override, runs the command and writes its files
// plus manifest.json into options.out_dir. Throws ConfigError for schema
// problems and NumericalAbort when training diverges.
CommandResult run_command(Command command, const json& config, const RunOptions& options);

CommandResult cmd_pretrain(const json& config, const RunOptions& options);
CommandResult cmd_train(const json& config, const RunOptions& options);
CommandResult cmd_scan_hessian(const json& config, const RunOptions& options);
CommandResult cmd_scan_scaling(const json& config, const RunOptions& options);
CommandResult cmd_bounds(const json& config, const RunOptions& options);

// Effective config after the --small preset and seed override.
json effective_config(Command command, const json& config, const RunOptions& options);

// Target described by a config "target" object. `n_override` replaces the
// qubit count of size-parametric targets (xxz, synthetic).
Target target_from_config(const json& spec, std::uint64_t seed, const std::filesystem::path& base_dir,
                          std::optional<int> n_override = std::nullopt);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qbm
