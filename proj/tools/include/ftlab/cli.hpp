#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ftlab::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr std::string_view kSubcommands[] = {"orbits",     "sample-field", "trace",
                                                    "experiment", "pressure",     "resonances"};

struct RunOptions {
  std::filesystem::path config_path;
  /// Optional; must agree with the config's "subcommand" when both are set.
  std::string subcommand;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "ftlab_out";
  unsigned threads = 1;
};

/// Validates a raw config and fills every default. Unknown keys, wrong types
/// and out-of-range values throw ConfigInvalid; an empty document throws
/// ConfigMissing.
Json resolve_config(const Json& raw, const RunOptions& options);

/// Reads and resolves the config file named in options.
Json load_config(const RunOptions& options);

struct WrittenFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunOutcome {
  Json resolved;
  std::vector<WrittenFile> files;
};

/// Executes a resolved config, writing outputs and manifest.json into
/// options.output_dir. Throws ftlab::Error.
RunOutcome execute(const Json& resolved, const RunOptions& options);

/// Full pipeline with error reporting: returns the exit status and writes a
/// single "CODE: message" line to err on failure.
int run(const RunOptions& options, std::ostream& err);

std::string sha256_hex(std::string_view data);

}  // namespace ftlab::cli
