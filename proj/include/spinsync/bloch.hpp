#pragma once

// Many-body Bloch equations for N atoms with S = I = 1/2 observables:
//
//   dS_n/dt = w_n A_n + sum_m G_mn (S_m - S_n)
//   dI_n/dt = -w_n A_n
//   dA_n/dt = -(w_n/2)(S_n - I_n) - G_n A_n + I_n x (sum_m G_mn S_m)
//
// with A = I x S (see ProductOperators) and G_n = sum_m G_mn. The exchange
// term is written as I_n x S_m so the equations are the exact moment
// projection of the reduced master equation (master.hpp) for product states.

#include <span>

#include "spinsync/ensemble_init.hpp"
#include "spinsync/ode.hpp"
#include "spinsync/state.hpp"
#include "spinsync/trajectory.hpp"

namespace spinsync {

struct BlochParams {
  CouplingMatrix coupling;
  FrequencySpread freqs;

  std::size_t size() const { return coupling.size(); }
  /// Throws ValidationError unless coupling and frequencies describe n atoms.
  void validate(std::size_t n) const;
};

/// OpenMP kernel over atoms. y and dydt use the 9-per-atom flat layout.
void bloch_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params);

namespace reference {
/// Serial, literal transcription of the equations; kept for testing.
void bloch_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params);
}  // namespace reference

/// Value form; throws ValidationError on non-finite input.
EnsembleBlochState bloch_rhs(const EnsembleBlochState& state, const BlochParams& params);

Trajectory integrate(const EnsembleBlochState& state0, const BlochParams& params,
                     const IntegratorOptions& opts);

/// Mean total spin per atom, (1/N) sum_n (S_n + I_n).
Vec3 total_spin(const EnsembleBlochState& state);
Vec3 total_spin(const Trajectory& traj, std::size_t sample);

/// max_t |<F>(t) - <F>(0)| along a Bloch trajectory.
double total_spin_drift(const Trajectory& traj);

}  // namespace spinsync
