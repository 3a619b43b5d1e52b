#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace onebit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

inline constexpr const char* kConfigEnvVar = "ONEBIT_CONFIG";

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Flat "key = value" lines; '#' starts a comment. Throws DomainError with the
// line number on malformed input or duplicate keys.
ConfigEntries parse_config(std::istream& in);
ConfigEntries load_config(const std::string& path);

// Strips --config from the argument list and appends "--key value" for each
// config entry whose flag was not given explicitly. The config path comes
// from --config, else from env_default when non-empty.
std::vector<std::string> resolve_arguments(std::vector<std::string> args,
                                           const std::optional<std::string>& env_default);

// 64-bit FNV-1a, used for the provenance header.
std::uint64_t fnv1a(const std::string& text);

// Entry point shared by the tool and the tests. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace onebit::cli
