#pragma once

// Run and sweep configuration, read from JSON. The schema, with units, is
// documented in docs/config_schema.md. Frequencies and times are in units of
// the hyperfine frequency omega (omega = 1 unless set otherwise).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsync/budget.hpp"

namespace spinsync {

using Json = nlohmann::ordered_json;

struct AngleDist {
  double mean = 0.0;
  double sigma = 0.0;
};

struct TiltConfig {
  AngleDist theta_y, theta_z, phi_y, phi_z;
};

struct CouplingConfig {
  std::string kind = "uniform";  // uniform | random
  bool symmetric = true;
  bool zero_diagonal = true;
};

struct PhysicsConfig {
  double I = 0.5;
  double omega = 1.0;
  std::optional<double> gamma_over_omega;
  std::optional<double> gamma;
  std::size_t N = 1;
  double beta = 0.0;
  TiltConfig tilt;
  /// Relative standard deviation of the per-atom hyperfine frequencies.
  double omega_spread = 0.0;
  CouplingConfig coupling;
  /// master engine only: integrate one shared density matrix.
  bool mean_field = true;

  double gamma_value() const;
};

struct NumericsConfig {
  double t_end = 100.0;
  double sample_dt = 0.1;
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct AnalysisConfig {
  bool modes = true;
  bool sync = true;
  /// Start of the mode-fit window; unset means min(20/Gamma, t_end/4).
  std::optional<double> mode_window_start;
  std::size_t max_order = 8;
  double sync_threshold = 0.1;
};

struct OutputConfig {
  /// Per-atom column groups written to trajectory.csv (ensemble means are always written).
  std::optional<std::size_t> atoms;
  bool density_snapshots = false;
};

struct RunConfig {
  std::string name = "run";
  std::string engine = "bloch";  // bloch | meanfield | tops | master
  PhysicsConfig physics;
  NumericsConfig numerics;
  AnalysisConfig analysis;
  OutputConfig output;
  std::uint64_t seed = 1;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  double mode_window_start() const;
  std::size_t emitted_atoms() const;

  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

struct SweepConfig {
  RunConfig base;
  /// Dotted path of a numeric field in the run schema, e.g. "physics.gamma_over_omega".
  std::string axis;
  std::vector<double> values;
  int workers = 1;

  void validate() const;
  /// The base config with the axis field set to value.
  RunConfig point(double value) const;

  static SweepConfig from_json(const Json& j);
  Json to_json() const;
};

struct BudgetConfig {
  VaporConfig vapor = VaporConfig::defaults();
  double omega_hf = kOmegaK41;  // rad/s
  double r_pump = 1e9;           // s^-1
  /// Optional magnetic pulse estimate.
  double omega_b = 5.0 * kOmegaK41;
  double g_s = 2.8e6;  // Hz/G
  double b_perp = 10.0;  // G

  static BudgetConfig from_json(const Json& j);
  Json to_json() const;
};

/// Parses an angle given as a number or an expression like "pi/8", "-2pi/3", "0.5*pi".
double parse_angle(const Json& value, const std::string& field);

Json load_json_file(const std::string& path);

/// Kind of document: "run", "sweep" or "budget" (from the top-level "kind" key, default "run").
std::string config_kind(const Json& j);

}  // namespace spinsync
