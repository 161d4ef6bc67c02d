#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fsl::cli {

/// Flat key=value configuration. Blank lines and lines starting with '#' are
/// skipped; keys are the long flag names without the leading dashes.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& file);

/// FNV-1a 64 over the command name and the sorted resolved entries, as 16
/// hex digits.
std::string config_hash(const std::string& command, const std::map<std::string, std::string>& config);

/// Runs one subcommand. The JSON summary goes to `out`, diagnostics to `err`.
/// Exit codes: 0 success, 2 validation error or bad usage, 3 audit alarm,
/// 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fsl::cli
