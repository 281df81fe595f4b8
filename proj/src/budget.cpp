#include "spinsync/budget.hpp"

#include <cmath>

#include "spinsync/common.hpp"

namespace spinsync {

namespace {

struct FieldInfo {
  double VaporConfig::*member;
  const char* unit;
  const char* source;
};

const std::map<std::string, FieldInfo>& field_table() {
  static const std::map<std::string, FieldInfo> table = {
      {"n_K", {&VaporConfig::n_K, "cm^-3", "potassium density at 620 C"}},
      {"n_N2", {&VaporConfig::n_N2, "cm^-3", "1 amg nitrogen buffer"}},
      {"T", {&VaporConfig::T, "K", "proposed cell temperature, 620 C"}},
      {"L", {&VaporConfig::L, "cm", "proposed 100 um cell length"}},
      {"D", {&VaporConfig::D, "cm^2/s", "K diffusion in 1 amg N2"}},
      {"Q", {&VaporConfig::Q, "1", "nuclear slowing-down factor for I = 3/2"}},
      {"v_bar", {&VaporConfig::v_bar, "cm/s", "K-K mean thermal velocity near 600 C"}},
      {"v_bar_buff", {&VaporConfig::v_bar_buff, "cm/s", "K-N2 pair mean thermal velocity"}},
      {"sigma_SE", {&VaporConfig::sigma_SE, "cm^2", "K spin-exchange cross section"}},
      {"sigma_KK", {&VaporConfig::sigma_KK, "cm^2",
                    "K-K spin-destruction cross section measured at low temperature; order of "
                    "magnitude only"}},
      {"sigma_buff", {&VaporConfig::sigma_buff, "cm^2",
                      "K-N2 spin-rotation cross section scaled to 620 C (T^3.7)"}},
      {"dimer_fraction", {&VaporConfig::dimer_fraction, "1",
                          "singlet K2 fraction from measured partial pressure (5% from "
                          "computed potentials)"}},
      {"De_S", {&VaporConfig::De_S, "eV", "K2 singlet binding energy"}},
      {"De_T", {&VaporConfig::De_T, "eV", "K2 triplet binding energy (enters K_T only)"}},
      {"K_T", {&VaporConfig::K_T, "cm^3", "triplet-dimer chemical equilibrium coefficient"}},
      {"tau_c_inv", {&VaporConfig::tau_c_inv, "s^-1", "hard-sphere K2-N2 collision rate"}},
      {"alpha_S", {&VaporConfig::alpha_S, "1", "upper bound: full coherence loss per dissociation"}},
      {"alpha_T", {&VaporConfig::alpha_T, "1", "upper bound: full coherence loss per triplet lifetime"}},
      {"Omega_q", {&VaporConfig::Omega_q, "s^-1", "K2 quadrupole interaction strength"}},
      {"cJ", {&VaporConfig::cJ, "s^-1", "K2 spin-rotation interaction strength c sqrt<J^2>"}},
      {"tau_R_inv", {&VaporConfig::tau_R_inv, "s^-1",
                     "molecular reorientation rate, buffer and chemical exchange combined"}},
      {"sigma_vKK2", {&VaporConfig::sigma_vKK2, "cm^3/s",
                      "K-K2 chemical-exchange rate coefficient (Rb2 measurements)"}},
  };
  return table;
}

}  // namespace

VaporConfig VaporConfig::defaults() {
  VaporConfig cfg;
  for (const auto& [name, info] : field_table()) {
    cfg.provenance[name] = std::string("default: ") + info.source;
  }
  return cfg;
}

void VaporConfig::validate() const {
  for (const auto& [name, info] : field_table()) {
    const double v = this->*(info.member);
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ValidationError("vapor." + name + " must be positive");
    }
  }
  for (const char* name : {"dimer_fraction", "alpha_S", "alpha_T"}) {
    if (this->*(field_table().at(name).member) > 1.0) {
      throw ValidationError(std::string("vapor.") + name + " must lie in [0, 1]");
    }
  }
}

double& VaporConfig::field(const std::string& name) {
  const auto it = field_table().find(name);
  if (it == field_table().end()) {
    throw ValidationError("vapor: unknown field '" + name + "'");
  }
  return this->*(it->second.member);
}

double VaporConfig::get(const std::string& name) const {
  const auto it = field_table().find(name);
  if (it == field_table().end()) {
    throw ValidationError("vapor: unknown field '" + name + "'");
  }
  return this->*(it->second.member);
}

const std::map<std::string, std::string>& VaporConfig::units() {
  static const std::map<std::string, std::string> u = [] {
    std::map<std::string, std::string> m;
    for (const auto& [name, info] : field_table()) {
      m[name] = info.unit;
    }
    return m;
  }();
  return u;
}

const std::map<std::string, std::string>& budget_formulas() {
  static const std::map<std::string, std::string> f = {
      {"R_SE", "n_K * sigma_SE * v_bar"},
      {"R_wall", "4 pi^2 Q D / L^2 (slowest diffusion mode, depolarizing walls)"},
      {"R_KK_binary", "n_K * sigma_KK * v_bar"},
      {"R_KK_triplet", "alpha_T * tau_c_inv * K_T * n_K"},
      {"R_S", "alpha_S * dimer_fraction * tau_c_inv * exp(-De_S / (k_B T))"},
      {"R_buff", "n_N2 * sigma_buff * v_bar_buff"},
      {"R_CE", "dimer_fraction * n_K * sigma_vKK2"},
      {"R_nuclear_singlet", "(2/3 Omega_q^2 + cJ^2) / tau_R_inv"},
      {"R_SD", "R_wall + max(R_KK_binary, R_KK_triplet) + R_S + R_buff"},
      {"n_threshold", "omega_hf / (sigma_SE * v_bar)"},
  };
  return f;
}

double density_threshold(double omega, double sigma_SE, double v_bar) {
  if (omega < 0.0 || !(sigma_SE > 0.0) || !(v_bar > 0.0)) {
    throw ValidationError("density_threshold: inputs must be positive");
  }
  return omega / (sigma_SE * v_bar);
}

BudgetResult relaxation_budget(const VaporConfig& cfg, double omega_hf) {
  cfg.validate();
  BudgetResult r;
  r.R_SE = cfg.n_K * cfg.sigma_SE * cfg.v_bar;
  r.R_wall = 4.0 * kPi * kPi * cfg.Q * cfg.D / (cfg.L * cfg.L);
  r.R_KK_binary = cfg.n_K * cfg.sigma_KK * cfg.v_bar;
  r.R_KK_triplet = cfg.alpha_T * cfg.tau_c_inv * cfg.K_T * cfg.n_K;
  r.R_S = cfg.alpha_S * cfg.dimer_fraction * cfg.tau_c_inv *
          std::exp(-cfg.De_S / (kBoltzmannEv * cfg.T));
  r.R_buff = cfg.n_N2 * cfg.sigma_buff * cfg.v_bar_buff;
  r.R_CE = cfg.dimer_fraction * cfg.n_K * cfg.sigma_vKK2;
  r.R_nuclear_singlet = (2.0 / 3.0 * cfg.Omega_q * cfg.Omega_q + cfg.cJ * cfg.cJ) / cfg.tau_R_inv;
  r.R_SD = r.R_wall + std::max(r.R_KK_binary, r.R_KK_triplet) + r.R_S + r.R_buff;
  r.n_threshold = density_threshold(omega_hf, cfg.sigma_SE, cfg.v_bar);
  return r;
}

double polarization_from_pumping(double r_pump, double r_sd) {
  if (r_pump < 0.0 || r_sd < 0.0) {
    throw ValidationError("polarization_from_pumping: rates must be non-negative");
  }
  if (r_pump + r_sd == 0.0) {
    return 0.0;
  }
  return 0.5 * r_pump / (r_pump + r_sd);
}

PulseExcitation pulse_excitation(double omega_b, double omega_hf, double g_s, double b_perp) {
  if (!(omega_b > 0.0) || !(omega_hf > 0.0)) {
    throw ValidationError("pulse_excitation: frequencies must be positive");
  }
  PulseExcitation p;
  p.azimuth = omega_hf / omega_b;
  p.elevation = 0.25 * (2.0 * kPi * g_s * b_perp) / omega_b;
  p.excites = omega_b > omega_hf;
  return p;
}

}  // namespace spinsync
