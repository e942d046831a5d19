#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "peierls/lagrangian_core.hpp"

namespace peierls {

// Parsed experiment configuration: flat `key = value` lines grouped under
// bracketed section headings [experiment] and [parameters].
struct ExperimentConfig {
  std::string model;
  long long seed = 0;
  std::vector<std::string> outputs;

  struct Value {
    std::string text;
    int line = 0;
  };
  std::map<std::string, Value> params;

  bool has(const std::string& key) const { return params.count(key) > 0; }
  double get_real(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Applies PEIERLS_EXPERIMENT_* / PEIERLS_PARAMETERS_* environment overrides.
void apply_env_overrides(ExperimentConfig& config);

// Validates model name, key membership and value ranges; throws ConfigError
// with key and line diagnostics.
void validate_config(const ExperimentConfig& config);

// One summary line per invariant check.
struct CheckLine {
  std::string name;
  double tolerance = 0.0;
  double measured = 0.0;
  bool pass = false;
};

struct ReportBundle {
  std::vector<CheckLine> checks;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name -> path
  bool numerical_ok() const;
};

// Executes the configured pipeline and writes the requested artifacts plus
// summary.json under outdir.
ReportBundle run_experiment(const ExperimentConfig& config,
                            const std::filesystem::path& outdir);

// Model registry with parameter schemas and defaults; stable across runs.
std::string list_models();

// Deterministic value stream (seeded, platform independent).
std::uint64_t splitmix64(std::uint64_t& state);
double uniform_real(std::uint64_t& state, double lo, double hi);

// Random compactly supported C^2 bump density with linear + quadratic +
// velocity terms; analytic density partials attached.
PathFunctional random_bump_functional(int n, double T, std::uint64_t& state,
                                      const std::string& label);

// IEEE round-trip formatting used by all CSV writers.
std::string format_double(double value);

}  // namespace peierls
