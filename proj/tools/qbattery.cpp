#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qbattery/experiments.hpp"

namespace qe = qbattery::experiments;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;
constexpr int kExitIo = 4;

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Floquet quantum-battery charging experiments"};
  std::string experiment;
  std::string config_path;
  std::string out_path;
  unsigned workers = 0;
  bool seedless = false;

  app.add_option("experiment", experiment,
                 "sweep-frequency | bandwidth-scan | power-scaling | magnus-check | stroboscopic-trace")
      ->required();
  app.add_option("--config", config_path, "experiment configuration file")->required();
  app.add_option("--out", out_path, "CSV output path (overrides the config); a .json sidecar is written next to it");
  app.add_option("--workers", workers, "worker threads (default: config value, else available parallelism)");
  app.add_flag("--seedless", seedless, "accepted for interface compatibility; all computations are deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    qe::ExperimentConfig config = qe::load_config(config_path);
    if (qe::parse_experiment(experiment) != config.experiment) {
      std::cerr << "config " << config_path << " describes '" << qe::to_string(config.experiment)
                << "', not '" << experiment << "'\n";
      return kExitConfig;
    }
    if (!out_path.empty()) config.output = out_path;

    const qe::Result result = qe::run(config, workers);
    if (config.output.empty()) {
      qe::write_csv(result.table, std::cout);
    } else {
      qe::write_outputs(config, result, config.output);
      std::cerr << "wrote " << result.table.rows.size() << " rows to " << config.output << '\n';
    }
    return 0;
  } catch (const qe::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qbattery::GuardError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const qe::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
