#include "qbattery/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qbattery/floquet_ed.hpp"
#include "qbattery/integrable.hpp"
#include "qbattery/magnus.hpp"
#include "qbattery/parallel.hpp"

#ifndef QBATTERY_BUILD_STAMP
#define QBATTERY_BUILD_STAMP "unknown"
#endif

namespace qbattery::experiments {

namespace {

// Fraction of the branch width 2 pi / T below which the bandwidth is
// treated as unsaturated for the linear fit.
constexpr double kSaturationFraction = 0.9;

const std::map<Experiment, std::string_view> kExperimentNames = {
    {Experiment::sweep_frequency, "sweep-frequency"}, {Experiment::bandwidth_scan, "bandwidth-scan"},
    {Experiment::power_scaling, "power-scaling"},     {Experiment::magnus_check, "magnus-check"},
    {Experiment::stroboscopic_trace, "stroboscopic-trace"}};

const std::map<Engine, std::string_view> kEngineNames = {
    {Engine::integrable, "integrable"}, {Engine::ed, "ed"}, {Engine::both, "both"}};

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(const std::string& text, T& out)
{
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return false;
  if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
  return true;
}

// Collects problems while reading keys so that every bad key is reported.
class Reader {
public:
  std::vector<std::string> problems;

  template <class T>
  void scalar(const std::string& key, const std::string& text, T& out)
  {
    if (!parse_number(trim(text), out)) problems.push_back(key + ": cannot parse '" + text + "' as a number");
  }

  template <class T>
  void list(const std::string& key, const std::string& text, std::vector<T>& out)
  {
    out.clear();
    for (const std::string& item : split_list(text)) {
      T value{};
      if (!parse_number(item, value)) {
        problems.push_back(key + ": cannot parse '" + item + "' as a number");
        continue;
      }
      out.push_back(value);
    }
  }
};

struct GridSpec {
  std::vector<double> omega;
  std::optional<double> omega_min, omega_max;
  std::optional<long> omega_count;
  std::vector<int> N;
  std::optional<int> N_min, N_max;
  int N_step = 1;
  std::vector<double> T;
  std::optional<double> T_start;
  std::optional<long> T_count;
};

void expand_grids(const GridSpec& g, ExperimentConfig& cfg, std::vector<std::string>& problems)
{
  const bool omega_range = g.omega_min || g.omega_max || g.omega_count;
  if (!g.omega.empty() && omega_range) problems.push_back("grid: give either omega or omega_min/omega_max/omega_count");
  if (omega_range) {
    if (!(g.omega_min && g.omega_max && g.omega_count)) {
      problems.push_back("grid: omega_min, omega_max and omega_count must be given together");
    } else if (*g.omega_count < 1) {
      problems.push_back("grid: omega_count must be at least 1");
    } else if (*g.omega_max < *g.omega_min) {
      problems.push_back("grid: omega_max is below omega_min");
    } else {
      const long count = *g.omega_count;
      cfg.omega_grid.clear();
      for (long i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        cfg.omega_grid.push_back(i == count - 1 && count > 1 ? *g.omega_max
                                                             : *g.omega_min + (*g.omega_max - *g.omega_min) * t);
      }
    }
  } else {
    cfg.omega_grid = g.omega;
  }

  const bool n_range = g.N_min || g.N_max;
  if (!g.N.empty() && n_range) problems.push_back("grid: give either N or N_min/N_max");
  if (n_range) {
    if (!(g.N_min && g.N_max)) {
      problems.push_back("grid: N_min and N_max must be given together");
    } else if (g.N_step < 1) {
      problems.push_back("grid: N_step must be at least 1");
    } else {
      cfg.N_list.clear();
      for (int n = *g.N_min; n <= *g.N_max; n += g.N_step) cfg.N_list.push_back(n);
    }
  } else {
    cfg.N_list = g.N;
  }

  const bool ladder = g.T_start || g.T_count;
  if (!g.T.empty() && ladder) problems.push_back("grid: give either T or T_start/T_count");
  if (ladder) {
    if (!(g.T_start && g.T_count)) {
      problems.push_back("grid: T_start and T_count must be given together");
    } else if (*g.T_count < 1) {
      problems.push_back("grid: T_count must be at least 1");
    } else {
      cfg.T_list.clear();
      double t = *g.T_start;
      for (long i = 0; i < *g.T_count; ++i, t *= 0.5) cfg.T_list.push_back(t);
    }
  } else {
    cfg.T_list = g.T;
  }
}

std::vector<Engine> engines_of(Engine e)
{
  if (e == Engine::both) return {Engine::integrable, Engine::ed};
  return {e};
}

bool uses(Engine configured, Engine engine)
{
  return configured == engine || configured == Engine::both;
}

void check_integrable_chain(const DriveParams& p, int N, std::vector<std::string>& out)
{
  if (N < 2 || N % 2 != 0) out.push_back("integrable engine needs an even N >= 2, got N=" + std::to_string(N));
  if (p.h0 != 0.0) out.push_back("integrable engine requires h0 = 0");
  if (p.boundary != Boundary::periodic) out.push_back("integrable engine requires the periodic boundary");
}

void check_ed_chain(const DriveParams& p, int N, std::vector<std::string>& out)
{
  const int min_sites = p.boundary == Boundary::periodic ? 3 : 2;
  if (N < min_sites) {
    out.push_back("ed engine needs N >= " + std::to_string(min_sites) + " for a " +
                  std::string(to_string(p.boundary)) + " chain, got N=" + std::to_string(N));
  }
}

void check_chain(const ExperimentConfig& c, int N, std::vector<std::string>& out)
{
  if (uses(c.engine, Engine::integrable)) check_integrable_chain(c.params, N, out);
  if (uses(c.engine, Engine::ed)) check_ed_chain(c.params, N, out);
}

void check_omegas(const std::vector<double>& grid, std::vector<std::string>& out)
{
  if (grid.empty()) out.push_back("omega grid is empty");
  for (double w : grid) {
    if (!(w > 0.0)) {
      out.push_back("omega grid values must be positive, got " + format_number(w));
      break;
    }
  }
}

// Grids that fall back to the single [params] value when not given.
std::vector<double> omegas_or_default(const ExperimentConfig& c)
{
  return c.omega_grid.empty() ? std::vector<double>{c.params.omega} : c.omega_grid;
}

std::vector<int> sizes_or_default(const ExperimentConfig& c)
{
  return c.N_list.empty() ? std::vector<int>{c.params.N} : c.N_list;
}

std::vector<Cell> echo(Engine engine, const DriveParams& p)
{
  return {std::string(to_string(engine)), std::string(to_string(p.boundary)), p.h_z, p.J0, p.h0, p.omega,
          p.period(), static_cast<long>(p.N)};
}

const std::vector<std::string> kEchoColumns = {"engine", "boundary", "h_z", "J0", "h0", "omega", "T", "N"};

std::vector<std::string> with_echo(std::initializer_list<std::string> extra)
{
  std::vector<std::string> cols = kEchoColumns;
  cols.insert(cols.end(), extra.begin(), extra.end());
  cols.push_back("build");
  return cols;
}

void finish_row(std::vector<Cell>& row)
{
  row.emplace_back(std::string(build_stamp()));
}

void append_record(std::vector<Cell>& row, const StroboscopicRecord& r)
{
  row.insert(row.end(), {Cell(r.n), r.E, r.P, r.varB, r.varC, r.bound_slack});
}

double grid_step(std::vector<double> grid)
{
  std::sort(grid.begin(), grid.end());
  double step = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) step = std::max(step, grid[i] - grid[i - 1]);
  return step;
}

nlohmann::json extrema_summary(const std::vector<double>& omegas, const std::vector<double>& energy,
                               const std::vector<double>& varB, const DriveParams& params)
{
  using integrable::local_extrema;
  nlohmann::json out;
  std::vector<double> e_ext, v_ext;
  for (std::size_t i : local_extrema(energy)) e_ext.push_back(omegas[i]);
  for (std::size_t i : local_extrema(varB)) v_ext.push_back(omegas[i]);
  out["energy_extrema"] = e_ext;
  out["varB_extrema"] = v_ext;
  const double step = grid_step(omegas);
  out["grid_step"] = step;
  if (omegas.size() < 3) return out;

  const auto [lo, hi] = std::minmax_element(omegas.begin(), omegas.end());
  nlohmann::json res = nlohmann::json::array();
  for (const integrable::Resonance& r : integrable::predicted_resonances(params.h_z, *lo, *hi)) {
    nlohmann::json item;
    item["omega"] = r.omega;
    item["kind"] = r.kind == integrable::ResonanceKind::identity ? "identity" : "minus_identity";
    double nearest = std::numeric_limits<double>::infinity();
    for (double w : e_ext) nearest = std::min(nearest, std::abs(w - r.omega));
    item["nearest_energy_extremum"] = std::isfinite(nearest) ? nlohmann::json(nearest) : nlohmann::json(nullptr);
    item["within_one_step"] = nearest <= step * (1.0 + 1e-9);
    DriveParams at = params;
    at.omega = r.omega;
    item["boundary_mode_deviation"] = integrable::boundary_mode_deviation(at, r.kind);
    res.push_back(item);
  }
  out["resonances"] = res;
  return out;
}

Result run_sweep(const ExperimentConfig& c, unsigned workers)
{
  Result result;
  result.table.columns = with_echo({"n", "E", "P", "varB", "varC", "bound_slack"});
  for (Engine engine : engines_of(c.engine)) {
    std::vector<StroboscopicRecord> records;
    if (engine == Engine::integrable) {
      for (const auto& row : integrable::frequency_sweep(c.params, c.omega_grid, c.n, workers)) {
        records.push_back(row.record);
      }
    } else {
      records = parallel_map(c.omega_grid.size(), workers, [&](std::size_t i) {
        DriveParams p = c.params;
        p.omega = c.omega_grid[i];
        return ed::stroboscopic_series(ed::floquet_operator(ed::ChainSpec{p}), c.n).back();
      });
    }
    std::vector<double> energy, varB;
    for (std::size_t i = 0; i < records.size(); ++i) {
      DriveParams p = c.params;
      p.omega = c.omega_grid[i];
      std::vector<Cell> row = echo(engine, p);
      append_record(row, records[i]);
      finish_row(row);
      result.table.rows.push_back(std::move(row));
      energy.push_back(records[i].E);
      varB.push_back(records[i].varB);
    }
    result.summary[std::string(to_string(engine))] = extrema_summary(c.omega_grid, energy, varB, c.params);
  }
  return result;
}

Result run_trace(const ExperimentConfig& c, unsigned workers)
{
  const std::vector<double> omegas = omegas_or_default(c);
  const std::vector<int> sizes = sizes_or_default(c);
  struct Task {
    int N;
    double omega;
  };
  std::vector<Task> tasks;
  for (int N : sizes) {
    for (double w : omegas) tasks.push_back({N, w});
  }
  const std::vector<Engine> engines = engines_of(c.engine);

  using Series = std::vector<StroboscopicRecord>;
  const auto series = parallel_map(tasks.size(), workers, [&](std::size_t i) {
    DriveParams p = c.params;
    p.N = tasks[i].N;
    p.omega = tasks[i].omega;
    std::vector<Series> out;
    for (Engine engine : engines) {
      if (engine == Engine::ed) {
        out.push_back(ed::stroboscopic_series(ed::floquet_operator(ed::ChainSpec{p}), c.n_max));
      } else {
        Series s;
        for (long n = 1; n <= c.n_max; ++n) s.push_back(integrable::chain_observables(p, n));
        out.push_back(std::move(s));
      }
    }
    return out;
  });

  Result result;
  result.table.columns = with_echo({"n", "E", "P", "varB", "varC", "bound_slack"});
  double min_e = std::numeric_limits<double>::infinity();
  double min_slack = std::numeric_limits<double>::infinity();
  double diff_e = 0.0, diff_varB = 0.0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    DriveParams p = c.params;
    p.N = tasks[t].N;
    p.omega = tasks[t].omega;
    for (std::size_t e = 0; e < engines.size(); ++e) {
      for (const StroboscopicRecord& r : series[t][e]) {
        std::vector<Cell> row = echo(engines[e], p);
        append_record(row, r);
        finish_row(row);
        result.table.rows.push_back(std::move(row));
        min_e = std::min(min_e, r.E);
        min_slack = std::min(min_slack, r.bound_slack);
      }
    }
    if (engines.size() == 2) {
      for (std::size_t k = 0; k < series[t][0].size(); ++k) {
        diff_e = std::max(diff_e, std::abs(series[t][0][k].E - series[t][1][k].E));
        diff_varB = std::max(diff_varB, std::abs(series[t][0][k].varB - series[t][1][k].varB));
      }
    }
  }
  result.summary["min_E"] = min_e;
  result.summary["min_bound_slack"] = min_slack;
  if (engines.size() == 2) {
    result.summary["max_abs_diff_E"] = diff_e;
    result.summary["max_abs_diff_varB"] = diff_varB;
  }
  return result;
}

Result run_bandwidth(const ExperimentConfig& c, unsigned workers)
{
  const auto widths = parallel_map(c.N_list.size(), workers, [&](std::size_t i) {
    DriveParams p = c.params;
    p.N = c.N_list[i];
    return ed::bandwidth(ed::floquet_operator(ed::ChainSpec{p}));
  });
  const double branch = 2.0 * pi / c.params.period();

  Result result;
  result.table.columns = with_echo({"W", "two_pi_over_T"});
  std::vector<double> xs, ys;
  bool within = true;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    DriveParams p = c.params;
    p.N = c.N_list[i];
    std::vector<Cell> row = echo(Engine::ed, p);
    row.insert(row.end(), {Cell(widths[i]), Cell(branch)});
    finish_row(row);
    result.table.rows.push_back(std::move(row));
    within = within && widths[i] <= branch + 1e-9;
    if (widths[i] <= kSaturationFraction * branch) {
      xs.push_back(c.N_list[i]);
      ys.push_back(widths[i]);
    }
  }
  result.summary["two_pi_over_T"] = branch;
  result.summary["all_within_branch"] = within;
  result.summary["saturation_fraction"] = kSaturationFraction;
  result.summary["pre_saturation_N"] = xs;
  if (xs.size() >= 2) {
    const LinearFit fit = fit_line(xs, ys);
    result.summary["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  }
  return result;
}

Result run_power(const ExperimentConfig& c, unsigned workers)
{
  Result result;
  result.table.columns = with_echo({"n_max", "n_star", "P_star", "exponent"});
  result.summary["fits"] = nlohmann::json::array();
  for (double omega : c.omega_grid) {
    DriveParams base = c.params;
    base.omega = omega;
    for (Engine engine : engines_of(c.engine)) {
      std::vector<PowerMaximum> maxima;
      if (engine == Engine::ed) {
        for (const auto& r : ed::power_scaling(ed::ChainSpec{base}, c.N_list, c.n_max, workers).rows) {
          maxima.push_back({r.n_star, r.P_star});
        }
      } else {
        maxima = parallel_map(c.N_list.size(), workers, [&](std::size_t i) {
          DriveParams p = base;
          p.N = c.N_list[i];
          return integrable::max_power(p, c.n_max);
        });
      }
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < maxima.size(); ++i) {
        xs.push_back(c.N_list[i]);
        ys.push_back(maxima[i].P_star);
      }
      const PowerLawFit fit = fit_power_law(xs, ys);
      for (std::size_t i = 0; i < maxima.size(); ++i) {
        DriveParams p = base;
        p.N = c.N_list[i];
        std::vector<Cell> row = echo(engine, p);
        row.insert(row.end(), {Cell(c.n_max), Cell(maxima[i].n_star), Cell(maxima[i].P_star), Cell(fit.exponent)});
        finish_row(row);
        result.table.rows.push_back(std::move(row));
      }
      result.summary["fits"].push_back({{"engine", to_string(engine)},
                                        {"omega", omega},
                                        {"exponent", fit.exponent},
                                        {"prefactor", fit.prefactor},
                                        {"residual", fit.residual}});
    }
  }
  return result;
}

Result run_magnus(const ExperimentConfig& c, unsigned workers)
{
  const auto errors = parallel_map(c.T_list.size(), workers, [&](std::size_t i) {
    DriveParams p = c.params;
    p.omega = 2.0 * pi / c.T_list[i];
    return magnus::magnus_errors(p, c.orders);
  });

  Result result;
  result.table.columns = with_echo({"order", "rel_error"});
  result.summary["orders"] = nlohmann::json::array();
  for (std::size_t o = 0; o < c.orders.size(); ++o) {
    std::vector<double> errs;
    for (std::size_t i = 0; i < c.T_list.size(); ++i) {
      DriveParams p = c.params;
      p.omega = 2.0 * pi / c.T_list[i];
      std::vector<Cell> row = echo(Engine::ed, p);
      row.insert(row.end(), {Cell(static_cast<long>(c.orders[o])), Cell(errors[i][o])});
      finish_row(row);
      result.table.rows.push_back(std::move(row));
      errs.push_back(errors[i][o]);
    }
    nlohmann::json item{{"order", c.orders[o]}, {"T", c.T_list}, {"rel_error", errs}};
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) ratios.push_back(errs[i] / errs[i + 1]);
    item["consecutive_ratios"] = ratios;
    const bool positive = std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; });
    if (errs.size() >= 2 && positive) item["convergence_exponent"] = fit_power_law(c.T_list, errs).exponent;
    result.summary["orders"].push_back(item);
  }
  return result;
}

std::string csv_field(const Cell& cell)
{
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* l = std::get_if<long>(&cell)) return std::to_string(*l);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

} // namespace

std::string_view to_string(Experiment e)
{
  return kExperimentNames.at(e);
}

std::string_view to_string(Engine e)
{
  return kEngineNames.at(e);
}

Experiment parse_experiment(std::string_view name)
{
  for (const auto& [e, n] : kExperimentNames) {
    if (n == name) return e;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

Engine parse_engine(std::string_view name)
{
  for (const auto& [e, n] : kEngineNames) {
    if (n == name) return e;
  }
  throw std::invalid_argument("unknown engine '" + std::string(name) + "' (integrable, ed or both)");
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations))
{
}

ExperimentConfig parse_config(std::istream& in)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }

  ExperimentConfig cfg;
  GridSpec grid;
  Reader r;
  auto& problems = r.problems;
  bool have_experiment = false;

  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (name == "experiment") {
        try {
          cfg.experiment = parse_experiment(trim(node.data()));
          have_experiment = true;
        } catch (const std::invalid_argument& e) {
          problems.push_back(e.what());
        }
      } else {
        problems.push_back("unknown top-level key '" + name + "'");
      }
      continue;
    }
    for (const auto& [key, child] : node) {
      const std::string full = name + "." + key;
      const std::string value = child.data();
      if (name == "params") {
        if (key == "h_z") r.scalar(full, value, cfg.params.h_z);
        else if (key == "J0") r.scalar(full, value, cfg.params.J0);
        else if (key == "h0") r.scalar(full, value, cfg.params.h0);
        else if (key == "omega") r.scalar(full, value, cfg.params.omega);
        else if (key == "N") r.scalar(full, value, cfg.params.N);
        else if (key == "boundary") {
          try {
            cfg.params.boundary = parse_boundary(trim(value));
          } catch (const std::invalid_argument& e) {
            problems.push_back(full + ": " + e.what());
          }
        } else problems.push_back("unknown key '" + full + "'");
      } else if (name == "grid") {
        auto opt = [&](auto& slot) {
          typename std::remove_reference_t<decltype(slot)>::value_type v{};
          r.scalar(full, value, v);
          slot = v;
        };
        if (key == "omega") r.list(full, value, grid.omega);
        else if (key == "omega_min") opt(grid.omega_min);
        else if (key == "omega_max") opt(grid.omega_max);
        else if (key == "omega_count") opt(grid.omega_count);
        else if (key == "N") r.list(full, value, grid.N);
        else if (key == "N_min") opt(grid.N_min);
        else if (key == "N_max") opt(grid.N_max);
        else if (key == "N_step") r.scalar(full, value, grid.N_step);
        else if (key == "T") r.list(full, value, grid.T);
        else if (key == "T_start") opt(grid.T_start);
        else if (key == "T_count") opt(grid.T_count);
        else problems.push_back("unknown key '" + full + "'");
      } else if (name == "run") {
        if (key == "engine") {
          try {
            cfg.engine = parse_engine(trim(value));
          } catch (const std::invalid_argument& e) {
            problems.push_back(full + ": " + e.what());
          }
        } else if (key == "n") r.scalar(full, value, cfg.n);
        else if (key == "n_max") r.scalar(full, value, cfg.n_max);
        else if (key == "order") r.list(full, value, cfg.orders);
        else if (key == "workers") r.scalar(full, value, cfg.workers);
        else if (key == "output") cfg.output = trim(value);
        else problems.push_back("unknown key '" + full + "'");
      } else {
        problems.push_back("unknown section [" + name + "]");
        break;
      }
    }
  }
  if (!have_experiment) problems.push_back("missing top-level key 'experiment'");
  expand_grids(grid, cfg, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_config(in);
}

std::vector<std::string> validate(const ExperimentConfig& c)
{
  std::vector<std::string> out;
  const DriveParams& p = c.params;
  if (!(p.h_z > 0.0)) out.push_back("h_z must be positive (the initial state is the ground state of h_z sum Z)");
  if (!std::isfinite(p.J0)) out.push_back("J0 must be finite");
  if (!std::isfinite(p.h0)) out.push_back("h0 must be finite");

  switch (c.experiment) {
  case Experiment::sweep_frequency:
    check_omegas(c.omega_grid, out);
    check_chain(c, p.N, out);
    if (c.n < 1) out.push_back("n must be at least 1");
    break;
  case Experiment::stroboscopic_trace:
    check_omegas(omegas_or_default(c), out);
    for (int N : sizes_or_default(c)) check_chain(c, N, out);
    if (c.n_max < 1) out.push_back("n_max must be at least 1");
    break;
  case Experiment::bandwidth_scan:
    if (c.engine != Engine::ed) out.push_back("bandwidth-scan needs engine = ed");
    if (!(p.omega > 0.0)) out.push_back("omega must be positive");
    if (c.N_list.empty()) out.push_back("N grid is empty");
    for (int N : c.N_list) check_ed_chain(p, N, out);
    break;
  case Experiment::power_scaling: {
    check_omegas(c.omega_grid, out);
    const std::set<int> distinct(c.N_list.begin(), c.N_list.end());
    if (distinct.size() < 3) out.push_back("power-scaling needs at least three distinct N values");
    for (int N : c.N_list) check_chain(c, N, out);
    if (c.n_max < 1) out.push_back("n_max must be at least 1");
    break;
  }
  case Experiment::magnus_check:
    if (c.engine != Engine::ed) out.push_back("magnus-check compares against exact diagonalization; engine = ed");
    if (c.T_list.empty()) out.push_back("T grid is empty");
    for (double t : c.T_list) {
      if (!(t > 0.0)) {
        out.push_back("T values must be positive, got " + format_number(t));
        break;
      }
    }
    if (c.orders.empty()) out.push_back("order list is empty");
    for (int o : c.orders) {
      if (o < 0 || o > magnus::max_order) out.push_back("Magnus order must be in 0..3, got " + std::to_string(o));
    }
    check_ed_chain(p, p.N, out);
    break;
  }
  return out;
}

nlohmann::json to_json(const ExperimentConfig& c)
{
  return {{"experiment", to_string(c.experiment)},
          {"engine", to_string(c.engine)},
          {"params",
           {{"h_z", c.params.h_z},
            {"J0", c.params.J0},
            {"h0", c.params.h0},
            {"omega", c.params.omega},
            {"N", c.params.N},
            {"boundary", to_string(c.params.boundary)}}},
          {"grid", {{"omega", c.omega_grid}, {"N", c.N_list}, {"T", c.T_list}}},
          {"run", {{"n", c.n}, {"n_max", c.n_max}, {"order", c.orders}, {"workers", c.workers}, {"output", c.output}}}};
}

std::size_t Table::column(std::string_view name) const
{
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, std::string_view name) const
{
  const Cell& cell = rows.at(row).at(column(name));
  if (const auto* l = std::get_if<long>(&cell)) return static_cast<double>(*l);
  return std::get<double>(cell);
}

const std::string& Table::text(std::size_t row, std::string_view name) const
{
  return std::get<std::string>(rows.at(row).at(column(name)));
}

Result run(const ExperimentConfig& config, unsigned workers)
{
  if (auto violations = validate(config); !violations.empty()) throw ConfigError(std::move(violations));
  if (workers == 0) workers = config.workers;
  if (workers == 0) workers = default_workers();
  Result result;
  switch (config.experiment) {
  case Experiment::sweep_frequency: result = run_sweep(config, workers); break;
  case Experiment::stroboscopic_trace: result = run_trace(config, workers); break;
  case Experiment::bandwidth_scan: result = run_bandwidth(config, workers); break;
  case Experiment::power_scaling: result = run_power(config, workers); break;
  case Experiment::magnus_check: result = run_magnus(config, workers); break;
  }
  result.summary["experiment"] = to_string(config.experiment);
  result.summary["build"] = build_stamp();
  return result;
}

std::string format_number(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const Table& table, std::ostream& out)
{
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
}

void write_outputs(const ExperimentConfig& config, const Result& result, const std::filesystem::path& csv_path)
{
  std::error_code ec;
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path(), ec);
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  write_csv(result.table, csv);
  csv.close();
  if (!csv) throw IoError("failed while writing " + csv_path.string());

  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream side(json_path);
  if (!side) throw IoError("cannot write " + json_path.string());
  side << nlohmann::json{{"config", to_json(config)}, {"summary", result.summary}}.dump(2) << '\n';
  side.close();
  if (!side) throw IoError("failed while writing " + json_path.string());
}

std::string_view build_stamp()
{
  return QBATTERY_BUILD_STAMP;
}

} // namespace qbattery::experiments
