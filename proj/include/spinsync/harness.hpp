#pragma once

// Experiment orchestration: builds ensembles from a RunConfig, dispatches to
// an engine, analyses the result and writes CSV/JSON artifacts.
//
// Files written by write_run:
//   trajectory.csv  t, ensemble means (mean_<slot>), then atom<n>_<slot>
//   analysis.json   mode fits, dominant mode, sync summary, conservation drift
//   manifest.json   the resolved config; feeding it back reproduces the run
//   sync.csv        t, spread (when the sync metric was computed)
//   density.txt     density-matrix snapshots (master engine, on request)

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinsync/config.hpp"
#include "spinsync/master.hpp"
#include "spinsync/meanfield.hpp"
#include "spinsync/modes.hpp"
#include "spinsync/tops.hpp"

namespace spinsync {

/// Sub-stream ids used with derive_seed(config.seed, stream).
namespace streams {
inline constexpr std::uint64_t kThetaY = 1;
inline constexpr std::uint64_t kThetaZ = 2;
inline constexpr std::uint64_t kPhiY = 3;
inline constexpr std::uint64_t kPhiZ = 4;
inline constexpr std::uint64_t kCoupling = 5;
inline constexpr std::uint64_t kFrequencies = 6;
}  // namespace streams

struct Ensemble {
  ProductOperators ops;
  std::vector<TiltAngles> angles;
  std::vector<CMatrix> rhos;
  BlochParams params;
};

/// Initial density matrices, coupling and frequencies for a config. Engines
/// that integrate a single shared state (meanfield, master with mean_field)
/// get one atom with the mean tilt angles and total rate Gamma.
Ensemble build_ensemble(const RunConfig& cfg);

struct RunResult {
  RunConfig config;
  Trajectory traj;
  std::vector<std::string> slots;  // per-atom column names, e.g. Sx ... Az
  std::vector<ModeEstimate> modes;
  std::optional<DominantMode> dominant;
  std::string mode_error;
  std::vector<SyncMetric> sync;
  std::optional<EigenvalueSet> eigenvalues;  // meanfield engine
  std::optional<DensityMonitor> monitor;     // master engine
  std::vector<DensityMatrixState> snapshots;
  double f_initial = 0.0;      // |<F>(0)|, mean per atom
  double drift = 0.0;          // max_t |<F>(t) - <F>(0)|
  double field_magnitude = 0.0;  // |(1/N) sum_n w_n F_n(0)|
  Json analysis;
};

/// Runs one configuration. Throws ValidationError for bad input and
/// NumericalError (IntegrationError) when integration fails.
RunResult run(const RunConfig& cfg);

std::string trajectory_csv(const RunResult& result);
std::string sync_csv(const RunResult& result);
void write_run(const RunResult& result, const std::filesystem::path& out_dir);

struct SweepRow {
  double value = 0.0;
  std::string status = "ok";  // ok | validation_error | numerical_error
  std::string message;
  double rate = std::nan("");
  double frequency = std::nan("");
  double f_initial = std::nan("");
  std::optional<EigenvalueSet> eigenvalues;
};

/// Runs every axis value (in parallel over workers); rows follow the axis
/// order. A failing point is reported in its row and the sweep continues.
std::vector<SweepRow> sweep(const SweepConfig& cfg);

std::string sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
void write_sweep(const SweepConfig& cfg, const std::vector<SweepRow>& rows,
                 const std::filesystem::path& out_dir);

/// Budget report: every rate with its formula, inputs with units and provenance.
Json budget_report(const BudgetConfig& cfg);

/// Directory holding the shipped presets, and the names found there.
std::filesystem::path preset_dir();
std::vector<std::string> preset_names();
std::filesystem::path preset_path(const std::string& name);

}  // namespace spinsync
