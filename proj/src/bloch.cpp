#include "spinsync/bloch.hpp"

#include <cmath>
#include <string>

namespace spinsync {

using layout::kA;
using layout::kBlochStride;
using layout::kI;
using layout::kS;

void BlochParams::validate(std::size_t n) const {
  if (coupling.rates.rows() != coupling.rates.cols() || coupling.size() != n) {
    throw ValidationError("BlochParams: coupling matrix is not " + std::to_string(n) + "x" +
                          std::to_string(n));
  }
  if (freqs.per_atom.size() != n) {
    throw ValidationError("BlochParams: expected " + std::to_string(n) + " atomic frequencies");
  }
  if ((coupling.rates.array() < 0.0).any() || !coupling.rates.allFinite()) {
    throw ValidationError("BlochParams: coupling rates must be finite and non-negative");
  }
}

void bloch_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params) {
  const auto n_atoms = static_cast<long>(params.size());
  const Eigen::MatrixXd& rates = params.coupling.rates;
  const double* w = params.freqs.per_atom.data();

#pragma omp parallel for schedule(static)
  for (long n = 0; n < n_atoms; ++n) {
    const double* col = rates.col(n).data();
    double sx = 0.0, sy = 0.0, sz = 0.0, total = 0.0;
    for (long m = 0; m < n_atoms; ++m) {
      const double g = col[m];
      const double* sm = y.data() + m * kBlochStride + kS;
      sx += g * sm[0];
      sy += g * sm[1];
      sz += g * sm[2];
      total += g;
    }
    const double* at = y.data() + n * kBlochStride;
    const double* s = at + kS;
    const double* i = at + kI;
    const double* a = at + kA;
    double* out = dydt.data() + n * kBlochStride;
    const double wn = w[n];

    out[kS + 0] = wn * a[0] + sx - total * s[0];
    out[kS + 1] = wn * a[1] + sy - total * s[1];
    out[kS + 2] = wn * a[2] + sz - total * s[2];
    out[kI + 0] = -wn * a[0];
    out[kI + 1] = -wn * a[1];
    out[kI + 2] = -wn * a[2];
    out[kA + 0] = -0.5 * wn * (s[0] - i[0]) - total * a[0] + (i[1] * sz - i[2] * sy);
    out[kA + 1] = -0.5 * wn * (s[1] - i[1]) - total * a[1] + (i[2] * sx - i[0] * sz);
    out[kA + 2] = -0.5 * wn * (s[2] - i[2]) - total * a[2] + (i[0] * sy - i[1] * sx);
  }
}

namespace reference {

void bloch_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params) {
  const std::size_t n_atoms = params.size();
  for (std::size_t n = 0; n < n_atoms; ++n) {
    const std::size_t base = n * kBlochStride;
    const Vec3 s = load3(y, base + kS);
    const Vec3 i = load3(y, base + kI);
    const Vec3 a = load3(y, base + kA);
    const double wn = params.freqs.per_atom[n];

    Vec3 exchange = Vec3::Zero();
    Vec3 nonlinear = Vec3::Zero();
    double total = 0.0;
    for (std::size_t m = 0; m < n_atoms; ++m) {
      const double g = params.coupling.rates(static_cast<Eigen::Index>(m),
                                             static_cast<Eigen::Index>(n));
      const Vec3 sm = load3(y, m * kBlochStride + kS);
      exchange += g * (sm - s);
      nonlinear += g * i.cross(sm);
      total += g;
    }
    store3(dydt, base + kS, wn * a + exchange);
    store3(dydt, base + kI, -wn * a);
    store3(dydt, base + kA, -0.5 * wn * (s - i) - total * a + nonlinear);
  }
}

}  // namespace reference

EnsembleBlochState bloch_rhs(const EnsembleBlochState& state, const BlochParams& params) {
  params.validate(state.size());
  const std::vector<double> y = state.flat();
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw ValidationError("bloch_rhs: state is not finite");
    }
  }
  std::vector<double> dydt(y.size());
  bloch_rhs(y, dydt, params);
  return EnsembleBlochState::from_flat(dydt, state.t);
}

Trajectory integrate(const EnsembleBlochState& state0, const BlochParams& params,
                     const IntegratorOptions& opts) {
  params.validate(state0.size());
  auto system = [&params](const OdeState& y, OdeState& dydt, double) {
    bloch_rhs(y, dydt, params);
  };
  SampledSolution sol = integrate_sampled(system, state0.flat(), opts);

  Trajectory traj;
  traj.atoms = state0.size();
  traj.stride = kBlochStride;
  traj.times = std::move(sol.times);
  traj.samples = std::move(sol.values);
  return traj;
}

Vec3 total_spin(const EnsembleBlochState& state) {
  Vec3 acc = Vec3::Zero();
  for (const auto& atom : state.atoms) {
    acc += atom.F();
  }
  return state.atoms.empty() ? acc : Vec3(acc / static_cast<double>(state.size()));
}

Vec3 total_spin(const Trajectory& traj, std::size_t sample) {
  return traj.mean_vec(sample, kS) + traj.mean_vec(sample, kI);
}

double total_spin_drift(const Trajectory& traj) {
  if (traj.size() == 0) {
    return 0.0;
  }
  const Vec3 f0 = total_spin(traj, 0);
  double worst = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    worst = std::max(worst, (total_spin(traj, k) - f0).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace spinsync
