#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace illiq::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

/// Applies `--set a.b.c=value` to a config document. The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Runs one command on an already-loaded config; writes the primary output
/// to `out_path` (stdout when empty). Returns an ExitCode; library and config
/// errors propagate as exceptions.
int run_command(const std::string& command, const nlohmann::json& config, const std::string& config_dir,
                const std::string& out_path, const std::string& format);

/// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace illiq::cli
