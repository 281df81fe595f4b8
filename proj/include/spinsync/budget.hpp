#pragma once

// Relaxation budget and initialization estimates for a dense potassium vapor
// cell. CGS units throughout: densities cm^-3, lengths cm, cross sections
// cm^2, velocities cm/s, rates s^-1, energies eV, temperatures K.

#include <map>
#include <numbers>
#include <string>

namespace spinsync {

inline constexpr double kBoltzmannEv = 8.617333262e-5;  // eV / K
/// Hyperfine angular frequency scale of 41K, 2 pi x 127 MHz (rad/s).
inline constexpr double kOmegaK41 = 2.0 * std::numbers::pi * 127e6;

struct VaporConfig {
  double n_K = 1.7e18;
  double n_N2 = 2.5e19;
  double T = 893.15;  // 620 C
  double L = 0.01;
  double D = 0.4;
  double Q = 6.0;
  double v_bar = 1e5;
  double v_bar_buff = 1.3e5;
  double sigma_SE = 1.5e-14;
  double sigma_KK = 1e-18;
  double sigma_buff = 1e-21;
  double dimer_fraction = 0.035;
  double De_S = 0.55;
  double De_T = 0.032;
  double K_T = 3e-23;
  double tau_c_inv = 6e10;
  double alpha_S = 1.0;
  double alpha_T = 1.0;
  double Omega_q = 1.9e5;
  double cJ = 3.5e4;
  double tau_R_inv = 6e9;
  double sigma_vKK2 = 1.5e-9;

  /// Where each value came from; keyed by field name.
  std::map<std::string, std::string> provenance;

  /// Defaults for a 100 um cell with 1 amg N2 at 620 C, with provenance.
  static VaporConfig defaults();
  /// Throws ValidationError naming the first non-positive value or a fraction outside [0, 1].
  void validate() const;
  /// Field access by name for config ingestion; throws ValidationError on unknown names.
  double& field(const std::string& name);
  double get(const std::string& name) const;
  static const std::map<std::string, std::string>& units();
};

struct BudgetResult {
  double R_SE = 0.0;
  double R_wall = 0.0;
  double R_KK_binary = 0.0;
  double R_KK_triplet = 0.0;
  double R_S = 0.0;
  double R_buff = 0.0;
  double R_CE = 0.0;
  double R_nuclear_singlet = 0.0;
  /// R_wall + R_KK + R_S + R_buff, with R_KK the larger of the binary and
  /// triplet-dimer estimates (the two describe the same loss channel).
  double R_SD = 0.0;
  double n_threshold = 0.0;
};

/// Formula text for each BudgetResult field, for reports.
const std::map<std::string, std::string>& budget_formulas();

/// n = omega / (sigma_SE v_bar); omega in rad/s.
double density_threshold(double omega, double sigma_SE, double v_bar);

/// n_threshold is evaluated at omega_hf (rad/s).
BudgetResult relaxation_budget(const VaporConfig& cfg, double omega_hf = kOmegaK41);

/// |<S>| = R_P / (2 (R_P + R_SD)); zero when both rates vanish.
double polarization_from_pumping(double r_pump, double r_sd);

struct PulseExcitation {
  double azimuth = 0.0;    // rad
  double elevation = 0.0;  // rad
  bool excites = false;
};

/// Single sine burst B_perp sin(omega_B t) over one period. g_s in Hz/G, B_perp in G.
PulseExcitation pulse_excitation(double omega_b, double omega_hf, double g_s, double b_perp);

}  // namespace spinsync
