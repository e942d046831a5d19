#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "peierls/report.hpp"

namespace {

// Exit codes: 0 success, 1 config error, 2 numerical failure (invariant
// breach), 3 upstream model error.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalFailure = 2;
constexpr int kModelError = 3;

peierls::ExperimentConfig load(const std::string& path) {
  peierls::ExperimentConfig config = peierls::parse_config_file(path);
  peierls::apply_env_overrides(config);
  peierls::validate_config(config);
  return config;
}

void print_checks(const peierls::ReportBundle& bundle) {
  for (const auto& c : bundle.checks)
    std::printf("[%s] %-32s measured %.6e tolerance %.6e\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.measured, c.tolerance);
  for (const auto& [name, path] : bundle.artifacts)
    std::printf("artifact %-16s %s\n", name.c_str(), path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peierls bracket pipelines: reference solutions, commutator kernels, "
               "bracket evaluation and verification reports"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("-o,--out", out_dir, "output directory for artifacts");

  CLI::App* check = app.add_subcommand("check", "validate a config without running");
  check->add_option("config", config_path, "experiment config file")->required();

  app.add_subcommand("models", "list the model registry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (app.got_subcommand("models")) {
      std::cout << peierls::list_models();
      return kOk;
    }
    if (app.got_subcommand("check")) {
      load(config_path);
      std::cout << "config ok\n";
      return kOk;
    }
    const peierls::ExperimentConfig config = load(config_path);
    const peierls::ReportBundle bundle = peierls::run_experiment(config, out_dir);
    print_checks(bundle);
    return bundle.numerical_ok() ? kOk : kNumericalFailure;
  } catch (const peierls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const peierls::Error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModelError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModelError;
  }
}
