#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qslink/config.hpp"
#include "qslink/sweep.hpp"

namespace qslink {

// Shared settings parsed from the command line.
struct CliOptions {
    std::string config_path;   // empty = all defaults
    std::vector<std::string> overrides; // key=value
    std::string out_dir = ".";
    std::int64_t trials = 2000;
    std::uint64_t seed = 12345;
    int parallelism = 1;
    std::string sweep_param;   // sweep only
    std::string sweep_values;  // sweep only
};

// Exit codes: 0 success, 1 usage/config, 2 numerical failure, 3 validation failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_validation = 3;

// Each command writes its CSVs under opts.out_dir (created if missing),
// prints a human summary to stdout, and returns an exit code.
int cmd_analytic(const CliOptions& opts);
int cmd_simulate(const CliOptions& opts);
int cmd_sweep(const CliOptions& opts);
int cmd_validate(const CliOptions& opts);

// Loads + validates the scenario from opts (file, then overrides).
SystemConfig load_config(const CliOptions& opts);

} // namespace qslink
