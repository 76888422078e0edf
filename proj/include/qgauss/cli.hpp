#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qgauss {

using Json = nlohmann::ordered_json;

enum class Command { relations, modular, moments, clt, truncate, discretize };

std::string to_string(Command command);
Command parse_command(const std::string& name);

inline constexpr const char* kToolVersion = "1.0.0";

// Validated experiment description. JSON keys match the field names.
struct ExperimentConfig {
  Command command = Command::relations;
  int k = 1;
  int n = 1;
  std::vector<int> n_values;  // empty: {n}
  double q = 0.5;
  std::vector<double> lambda;  // empty: tracial / untwisted
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;  // empty: {seed}
  std::vector<std::string> words;
  std::optional<double> cutoff;  // "C"
  double t = 0.7;
  std::vector<double> points;  // discretize grid
  double slack = 0.05;

  std::vector<int> sizes() const { return n_values.empty() ? std::vector<int>{n} : n_values; }
  std::vector<std::uint64_t> seed_list() const {
    return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
  }
  bool twisted() const { return !lambda.empty(); }

  Json to_json() const;
};

// Parses and validates a JSON config. Malformed JSON and malformed words
// raise ParseError with the offending position; out-of-range values raise
// DomainError; unknown commands and keys raise ParseError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const Json& json);

struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double limit = 0.0;
};

struct Report {
  Json header;
  Json rows = Json::array();
  std::vector<Check> checks;

  bool passed() const;
  Json summary() const;
  Json to_json() const;
  // Fixed columns per command (the keys of each row), 17 significant digits.
  std::string to_csv() const;
  // FNV-1a over the serialized rows: equal digests mean identical rows.
  std::string rows_digest() const;
};

Report run(const ExperimentConfig& config);

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailure = 2;

}  // namespace qgauss
