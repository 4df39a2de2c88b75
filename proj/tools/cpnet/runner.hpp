#pragma once

#include "config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace cpnet::cli {

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2 };

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> paths;
    std::optional<unsigned> threads;
};

/// Loads the config (empty path = defaults only), applies overrides and runs the
/// experiment. Diagnostics go to `err`, progress lines to `log`.
int run(Kind kind, const std::string& config_path, const Overrides& overrides, std::ostream& log, std::ostream& err);

/// Runs an already-parsed config.
int run_config(Kind kind, const ExperimentConfig& config, std::ostream& log, std::ostream& err);

}  // namespace cpnet::cli
