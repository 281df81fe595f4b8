// spinsync: run single simulations, parameter sweeps and the relaxation
// budget from JSON configs or shipped presets.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spinsync/harness.hpp"

namespace {

using namespace spinsync;

struct CommonOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int workers = 0;
};

Json load(const CommonOptions& o) {
  if (o.config.empty() == o.preset.empty()) {
    throw ValidationError("give exactly one of --config or --preset");
  }
  return load_json_file(o.preset.empty() ? o.config : preset_path(o.preset).string());
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_seed) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--preset", o.preset, "name of a shipped preset (see 'presets list')");
  if (with_seed) {
    cmd->add_option("--seed", o.seed, "override the config seed");
  }
  cmd->add_option("--out-dir", o.out_dir, "directory for output files")->capture_default_str();
}

int cmd_run(const CommonOptions& o) {
  const Json j = load(o);
  if (config_kind(j) != "run") {
    throw ValidationError("'run' expects a run config (kind \"" + config_kind(j) + "\" given)");
  }
  RunConfig cfg = RunConfig::from_json(j);
  if (o.seed) cfg.seed = *o.seed;
  const RunResult r = run(cfg);
  write_run(r, o.out_dir);
  if (r.dominant) {
    std::printf("dominant mode of mean Sx: R = %.6g, Omega = %.6g\n", r.dominant->rate,
                r.dominant->frequency);
  } else if (!r.mode_error.empty()) {
    std::printf("mode fit: %s\n", r.mode_error.c_str());
  }
  std::printf("|F(0)| = %.6g, max drift = %.3g\n", r.f_initial, r.drift);
  std::printf("wrote %s\n", o.out_dir.c_str());
  return 0;
}

int cmd_sweep(const CommonOptions& o) {
  const Json j = load(o);
  if (config_kind(j) != "sweep") {
    throw ValidationError("'sweep' expects a sweep config (kind \"" + config_kind(j) + "\" given)");
  }
  SweepConfig cfg = SweepConfig::from_json(j);
  if (o.seed) cfg.base.seed = *o.seed;
  if (o.workers > 0) cfg.workers = o.workers;
  const auto rows = sweep(cfg);
  write_sweep(cfg, rows, o.out_dir);
  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.status != "ok";
  std::printf("%zu points, %zu failed; wrote %s/summary.csv\n", rows.size(), failed,
              o.out_dir.c_str());
  return 0;
}

int cmd_budget(const CommonOptions& o) {
  BudgetConfig cfg;
  if (!o.config.empty() || !o.preset.empty()) {
    cfg = BudgetConfig::from_json(load(o));
  }
  const Json report = budget_report(cfg);
  std::filesystem::create_directories(o.out_dir);
  std::ofstream(std::filesystem::path(o.out_dir) / "budget.json") << report.dump(2) << "\n";
  for (const auto& [name, entry] : report["rates"].items()) {
    std::printf("%-18s %12.4g %s\n", name.c_str(), entry["value"].get<double>(),
                entry["unit"].get<std::string>().c_str());
  }
  std::printf("%-18s %12.4g\n", "polarization", report["pumping"]["polarization"].get<double>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-exchange synchronization simulations for dense alkali vapor"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, budget_opts;
  auto* run_cmd = app.add_subcommand("run", "integrate one configuration");
  add_common(run_cmd, run_opts, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "run a configuration over a parameter axis");
  add_common(sweep_cmd, sweep_opts, true);
  sweep_cmd->add_option("--workers", sweep_opts.workers, "parallel sweep points");
  auto* budget_cmd = app.add_subcommand("budget", "relaxation budget of a vapor cell");
  add_common(budget_cmd, budget_opts, false);
  auto* presets_cmd = app.add_subcommand("presets", "shipped preset configs");
  auto* list_cmd = presets_cmd->add_subcommand("list", "list preset names");
  presets_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (budget_cmd->parsed()) return cmd_budget(budget_opts);
    if (list_cmd->parsed()) {
      for (const auto& name : preset_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const IntegrationError& e) {
    std::fprintf(stderr, "numerical failure at t = %.6g: %s\n", e.time(), e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
