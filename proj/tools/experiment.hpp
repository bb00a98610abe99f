#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "svelab/error.hpp"

namespace svelab::cli {

enum class ExitCode : int { ok = 0, internal = 1, usage = 2, validation = 3, numerical = 4, io = 5 };

/// Every problem found in a config, collected before anything runs.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Command-line values that take precedence over the config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

struct RunResult {
  std::string kind;
  std::vector<std::string> artifacts;  // full paths
  std::vector<std::pair<std::string, std::string>> summary;
  nlohmann::json report;
};

const std::vector<std::string>& experiment_kinds();
/// Schema text for one kind; ConfigError listing the valid kinds otherwise.
std::string describe(const std::string& kind);
/// A small runnable config of the kind.
std::string example_config(const std::string& kind);

/// Parses and checks every precondition; throws ConfigError with the full list.
void validate_config(const nlohmann::json& config, const Overrides& overrides = {});
RunResult run(const nlohmann::json& config, const Overrides& overrides = {});
RunResult run_file(const std::string& path, const Overrides& overrides = {});

/// Mismatches between a report and the declared schema of its kind; empty when valid.
std::vector<std::string> check_report(const nlohmann::json& report);

ExitCode exit_code_for(const std::exception& e);

}  // namespace svelab::cli
