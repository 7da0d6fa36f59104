#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qbattery/types.hpp"

namespace qbattery::experiments {

enum class Experiment { sweep_frequency, bandwidth_scan, power_scaling, magnus_check, stroboscopic_trace };
enum class Engine { integrable, ed, both };

std::string_view to_string(Experiment e);
std::string_view to_string(Engine e);
/// Throws std::invalid_argument for unknown names.
Experiment parse_experiment(std::string_view name);
Engine parse_engine(std::string_view name);

/// One experiment run. Which grids are read depends on the experiment:
///   sweep-frequency     omega_grid, params.N, n
///   stroboscopic-trace  omega_grid, N_list, n_max
///   bandwidth-scan      params.omega, N_list
///   power-scaling       omega_grid, N_list, n_max
///   magnus-check        T_list, orders, params.N
struct ExperimentConfig {
  Experiment experiment = Experiment::sweep_frequency;
  Engine engine = Engine::ed;
  DriveParams params;
  std::vector<double> omega_grid;
  std::vector<int> N_list;
  std::vector<double> T_list;
  std::vector<int> orders;
  long n = 100;
  long n_max = 200;
  std::string output;
  unsigned workers = 0; // 0 = available parallelism
};

/// Configuration problems, all of them rather than the first.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// INI-style text: a top-level `experiment` key and the sections [params],
/// [grid] and [run]. Throws ConfigError listing every malformed or unknown
/// key; semantic checks are left to validate().
ExperimentConfig parse_config(std::istream& in);
/// parse_config on a file; IoError when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every violation of the experiment's requirements; empty when valid.
std::vector<std::string> validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

using Cell = std::variant<std::string, long, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  const std::string& text(std::size_t row, std::string_view name) const;
};

struct Result {
  Table table;
  nlohmann::json summary;
};

/// Validates (ConfigError) and runs the experiment. `workers` overrides
/// config.workers when nonzero. GuardError propagates from the engines.
Result run(const ExperimentConfig& config, unsigned workers = 0);

/// Comma-separated, header first, numbers with 17 significant digits.
void write_csv(const Table& table, std::ostream& out);
std::string format_number(double value);

/// CSV at `csv_path` and the JSON sidecar (config echo and summary) next to
/// it with the extension replaced by .json. Throws IoError.
void write_outputs(const ExperimentConfig& config, const Result& result, const std::filesystem::path& csv_path);

/// git describe of the source tree at configure time.
std::string_view build_stamp();

} // namespace qbattery::experiments
