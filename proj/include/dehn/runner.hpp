#pragma once

// Experiment configuration, dispatch and persistence for the dehnlab CLI.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dehn/error.hpp"
#include "json.hpp"

namespace dehn {

/// Invalid configuration. `line` is 0 when no source position is known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, int line, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct OutputPaths {
  std::string json;
  std::string csv;
  std::string certificate;  // kind=fill
  std::string table;        // kind=hsc: p^(n) at the largest n
};

struct ExperimentConfig {
  std::string group;
  std::string kind;  // sample | fill | avg-area | moments | central-moments | hsc | ratio | shift-test | enumerate
  std::optional<int> n;
  std::vector<int> n_list;
  std::vector<int> t_list;
  int m = 1;
  std::optional<int> s, t;
  std::vector<std::string> x_list;  // words naming group elements
  std::string word;
  std::string sampler = "auto";
  std::vector<std::string> fallbacks;
  std::string area;  // empty: per-kind default
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: DEHNLAB_WORKERS or hardware threads
  std::string arithmetic = "float";  // float | exact
  double truncation_ratio = 1e-15;
  double c_double_prime = 8;
  std::int64_t max_attempts = 10'000'000;
  OutputPaths output;
};

/// Parses and validates a JSON config. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Re-runs validation after flag overrides.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// FNV-1a over the canonical (sorted-key) JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct RunResult {
  nlohmann::json record;
  std::string csv;
  bool partial = false;
};

/// Dispatches to the estimator, walk and filling layers. Sampler failures and
/// budget overruns yield a partial record instead of throwing.
RunResult run_experiment(const ExperimentConfig& cfg);
/// Runs and writes the configured outputs atomically.
RunResult run_and_write(const ExperimentConfig& cfg);

/// Writes to a sibling temp file, flushes and renames over `path`.
void atomic_write(const std::string& path, const std::string& content);

const char* version_string();

}  // namespace dehn
