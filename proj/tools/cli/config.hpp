#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghzperc/experiments.hpp"
#include "ghzperc/protocol.hpp"

namespace ghzperc::cli {

/// Problem with the run configuration. `field` is the dotted path of the
/// offending entry (empty for whole-file problems) and `line` the 1-based
/// line in the source file when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  void set_line(int line) noexcept { line_ = line; }

 private:
  std::string field_;
  int line_;
};

/// Raw config document plus the text it came from (for line lookups).
struct ConfigSource {
  std::string path;
  std::string text;
  nlohmann::ordered_json doc;
};

/// Reads and parses a JSON config; syntax errors carry their line.
ConfigSource load_config_file(const std::string& path);

/// Applies `key.path=value`. The value is parsed as JSON when possible and
/// taken as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

/// Best-effort 1-based line of the dotted `field` in `text`; 0 if not found.
int locate_field(const std::string& text, const std::string& field);

enum class Command { Rate, Boundary, OptimalK, Divided, ValidatePartition };

const char* to_string(Command c) noexcept;

/// Fully resolved settings for one command.
struct RunConfig {
  Command command = Command::Rate;
  int width = 100;
  int height = 100;
  PlacementSpec placement;
  ProtocolParams protocol;

  SweepAxis axis = SweepAxis::P;
  std::vector<double> values;
  double tol = 0.01;        ///< boundary bisection tolerance
  std::vector<int> k_values;  ///< boundary: one curve per k
  int k_max = 8;            ///< optimal-k

  std::optional<std::string> partition_file;

  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  int threads = 0;
};

/// Validates the document against the schema for `command` and resolves
/// defaults. Throws ConfigError naming the field.
RunConfig resolve_config(const nlohmann::ordered_json& doc, Command command);

}  // namespace ghzperc::cli
