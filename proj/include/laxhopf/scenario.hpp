#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace laxhopf::scenario {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;

struct Options {
  std::optional<std::filesystem::path> out_dir;  // no artifacts when empty
  std::optional<std::uint64_t> seed;             // overrides solver.seed
  std::optional<std::size_t> threads;            // overrides LAXHOPF_THREADS
};

struct Outcome {
  int exit_code = kExitOk;
  std::string summary;  // one line, printed by the front end
  Json result;          // ValueResult fields when a value was computed
};

// Parses a config file. Throws ConfigError with path "" on malformed JSON.
Json load_config(const std::filesystem::path& path);

// Every entry point catches ConfigError and reports exit code 2 with the
// field path in the summary.
Outcome run(const Json& config, const Options& opts);
Outcome verify(const Json& config, const Options& opts);
Outcome conjugate(const Json& config, const Options& opts);
Outcome moderate(const Json& config, const Options& opts);

// One run per value of the numeric field at `axis` (dotted path, array
// indices as numbers: "x.0", "rate.params.0"). Writes sweep.csv into the
// output directory; failed rows keep their exit code.
Outcome sweep(const Json& config, const std::string& axis, const std::vector<double>& values,
              const Options& opts);

}  // namespace laxhopf::scenario
