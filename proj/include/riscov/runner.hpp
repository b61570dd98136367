#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "riscov/params.hpp"
#include "riscov/quad.hpp"

namespace riscov {

enum class RunMode { analytic, montecarlo, both };

/// One experiment: a parameter sweep evaluated by the analytic engine, the
/// Monte Carlo engine, or both, over a SINR-threshold grid.
struct ExperimentSpec {
  std::string name = "experiment";
  std::string description;
  SystemParams base;
  RunMode mode = RunMode::both;
  std::string sweep_param = "none";
  std::vector<double> sweep_values = {0.0};
  std::vector<double> gamma0_grid_db = {-5.0, 0.0, 5.0, 10.0, 15.0};
  std::vector<std::string> metrics;  // empty = all for the scenario
  long n_trials = 10000;
  std::uint64_t seed = 1;
  QuadSpec quad;
  double agreement_slack_abs = 0.02;      // probabilities
  double agreement_slack_rate_rel = 0.03; // rates
  std::string out_dir = "out";
};

ExperimentSpec spec_from_json(const nlohmann::json& j);
/// Reads and parses a config file; parse errors are reported with line:column.
ExperimentSpec load_spec(const std::string& path);

struct ResultRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string metric;       // coverage | rate | blind_ratio | p_ad | p_ai
  double gamma0_db = std::numeric_limits<double>::quiet_NaN();
  double analytic = std::numeric_limits<double>::quiet_NaN();
  double mc_mean = std::numeric_limits<double>::quiet_NaN();
  double mc_half_width = std::numeric_limits<double>::quiet_NaN();
  int engines_agree = -1;  // -1 when only one engine ran
  bool quad_converged = true;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  bool all_converged = true;
  std::vector<double> mc_tail_bounds_w;  // per sweep value; multi-cell MC only
};

/// Returns base with the named parameter replaced; "none" returns base.
SystemParams apply_sweep(const SystemParams& base, const std::string& param, double value);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Fixed 8-column CSV, full-precision decimal, byte-stable for equal inputs.
std::string to_csv(const std::vector<ResultRow>& rows);

nlohmann::json result_to_json(const ExperimentSpec& spec, const ExperimentResult& result);
std::vector<ResultRow> rows_from_json(const nlohmann::json& j);

/// Writes results.csv and results.json under out_dir (created if needed).
void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                   const std::string& out_dir);

}  // namespace riscov
