#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "riscov/runner.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& mode_override,
            long seed_override, long trials_override, const std::string& out_override) {
  riscov::ExperimentSpec spec;
  try {
    spec = riscov::load_spec(config);
    if (!mode_override.empty()) {
      if (mode_override == "analytic") spec.mode = riscov::RunMode::analytic;
      else if (mode_override == "mc") spec.mode = riscov::RunMode::montecarlo;
      else if (mode_override == "both") spec.mode = riscov::RunMode::both;
      else throw std::invalid_argument("mode must be analytic, mc or both");
    }
    if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);
    if (trials_override > 0) spec.n_trials = trials_override;
    if (!out_override.empty()) spec.out_dir = out_override;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    riscov::ExperimentResult result = riscov::run_experiment(spec);
    riscov::write_outputs(spec, result, spec.out_dir);
    std::cout << "wrote " << result.rows.size() << " rows to " << spec.out_dir
              << "/results.{csv,json}\n";
    if (!result.all_converged) {
      std::cerr << "warning: quadrature did not converge for at least one row\n";
      return 3;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::string& config) {
  try {
    riscov::ExperimentSpec spec = riscov::load_spec(config);
    for (double v : spec.sweep_values) {
      riscov::SystemParams p = riscov::apply_sweep(spec.base, spec.sweep_param, v);
      auto errs = riscov::validate(p);
      if (!errs.empty()) {
        std::cerr << "invalid at " << spec.sweep_param << " = " << v << ":\n";
        for (const auto& e : errs) std::cerr << "  - " << e << "\n";
        return 2;
      }
    }
    std::cout << "OK: " << config << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_presets_list(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    std::cerr << "error: no preset directory at " << dir << "\n";
    return 2;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string desc;
    try {
      std::ifstream in(f);
      nlohmann::json j = nlohmann::json::parse(in);
      desc = j.value("description", "");
    } catch (...) {
      desc = "(unreadable)";
    }
    std::cout << f.stem().string() << "\t" << desc << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage and rate evaluation for RIS-assisted mmWave networks"};
  app.require_subcommand(1);

  std::string config, mode, out_dir, presets_dir = "presets";
  long seed = -1, trials = 0;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config, "experiment JSON file")->required();
  run->add_option("--mode", mode, "analytic | mc | both");
  run->add_option("--seed", seed, "override the RNG seed");
  run->add_option("--trials", trials, "override the Monte Carlo trial count");
  run->add_option("--out", out_dir, "output directory");

  auto* val = app.add_subcommand("validate", "validate an experiment config");
  val->add_option("--config", config, "experiment JSON file")->required();

  auto* presets = app.add_subcommand("presets", "preset configs");
  auto* list = presets->add_subcommand("list", "list available presets");
  list->add_option("--dir", presets_dir, "preset directory (default: presets)");
  presets->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config, mode, seed, trials, out_dir);
  if (val->parsed()) return cmd_validate(config);
  if (presets->parsed() && list->parsed()) return cmd_presets_list(presets_dir);
  return 1;
}
