#pragma once

// Strong-interaction reduction ("tops model") of the Bloch equations:
//
//   dF_n/dt = sum_m G_mn (S_m - S_n)
//   dS_n/dt = sum_m G_mn (S_m - S_n) + w_n F_n x S_n - (w_n^2 / G_n)(S_n - F_n/2)
//
// Valid for G_n >> w_n. It drops a term of relative order w/G; it is checked
// against the full Bloch engine, never used to check it.

#include <span>
#include <vector>

#include "spinsync/bloch.hpp"

namespace spinsync {

struct TopsState {
  std::vector<Vec3> S;
  std::vector<Vec3> F;
  double t = 0.0;

  std::size_t size() const { return S.size(); }
  std::vector<double> flat() const;
  static TopsState from_flat(std::span<const double> y, double t = 0.0);
  /// S_n and F_n = S_n + I_n taken from a Bloch state.
  static TopsState from_bloch(const EnsembleBlochState& state);
};

/// Throws ValidationError if any atom has zero total exchange rate.
void validate_tops(const BlochParams& params, std::size_t n);

void tops_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params);

namespace reference {
void tops_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params);
}  // namespace reference

TopsState tops_rhs(const TopsState& state, const BlochParams& params);

Trajectory integrate_tops(const TopsState& state0, const BlochParams& params,
                          const IntegratorOptions& opts);

struct EffectiveField {
  Vec3 omega = Vec3::Zero();
  double magnitude = 0.0;
};

/// Omega = (1/N) sum_n w_n F_n, the axis and rate of collective precession.
EffectiveField effective_field(const FrequencySpread& freqs, const std::vector<Vec3>& f_list);

}  // namespace spinsync
