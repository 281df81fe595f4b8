#include "spinsync/tops.hpp"

#include <cmath>
#include <string>

namespace spinsync {

using layout::kTopsF;
using layout::kTopsS;
using layout::kTopsStride;

std::vector<double> TopsState::flat() const {
  std::vector<double> y(S.size() * kTopsStride);
  for (std::size_t n = 0; n < S.size(); ++n) {
    store3(y, n * kTopsStride + kTopsS, S[n]);
    store3(y, n * kTopsStride + kTopsF, F[n]);
  }
  return y;
}

TopsState TopsState::from_flat(std::span<const double> y, double t) {
  if (y.size() % kTopsStride != 0) {
    throw ValidationError("TopsState: flat size is not a multiple of 6");
  }
  TopsState s;
  s.t = t;
  const std::size_t n_atoms = y.size() / kTopsStride;
  for (std::size_t n = 0; n < n_atoms; ++n) {
    s.S.push_back(load3(y, n * kTopsStride + kTopsS));
    s.F.push_back(load3(y, n * kTopsStride + kTopsF));
  }
  return s;
}

TopsState TopsState::from_bloch(const EnsembleBlochState& state) {
  TopsState s;
  s.t = state.t;
  for (const auto& atom : state.atoms) {
    s.S.push_back(atom.S);
    s.F.push_back(atom.F());
  }
  return s;
}

void validate_tops(const BlochParams& params, std::size_t n) {
  params.validate(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(params.coupling.total_rate(k) > 0.0)) {
      throw ValidationError("tops model: atom " + std::to_string(k) +
                            " has zero total exchange rate");
    }
  }
}

void tops_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params) {
  const auto n_atoms = static_cast<long>(params.size());
  const Eigen::MatrixXd& rates = params.coupling.rates;
  const double* w = params.freqs.per_atom.data();

#pragma omp parallel for schedule(static)
  for (long n = 0; n < n_atoms; ++n) {
    const double* col = rates.col(n).data();
    double sx = 0.0, sy = 0.0, sz = 0.0, total = 0.0;
    for (long m = 0; m < n_atoms; ++m) {
      const double g = col[m];
      const double* sm = y.data() + m * kTopsStride + kTopsS;
      sx += g * sm[0];
      sy += g * sm[1];
      sz += g * sm[2];
      total += g;
    }
    const double* s = y.data() + n * kTopsStride + kTopsS;
    const double* f = y.data() + n * kTopsStride + kTopsF;
    double* out = dydt.data() + n * kTopsStride;
    const double wn = w[n];
    const double relax = wn * wn / total;

    const double ex = sx - total * s[0];
    const double ey = sy - total * s[1];
    const double ez = sz - total * s[2];
    out[kTopsF + 0] = ex;
    out[kTopsF + 1] = ey;
    out[kTopsF + 2] = ez;
    out[kTopsS + 0] = ex + wn * (f[1] * s[2] - f[2] * s[1]) - relax * (s[0] - 0.5 * f[0]);
    out[kTopsS + 1] = ey + wn * (f[2] * s[0] - f[0] * s[2]) - relax * (s[1] - 0.5 * f[1]);
    out[kTopsS + 2] = ez + wn * (f[0] * s[1] - f[1] * s[0]) - relax * (s[2] - 0.5 * f[2]);
  }
}

namespace reference {

void tops_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params) {
  const std::size_t n_atoms = params.size();
  for (std::size_t n = 0; n < n_atoms; ++n) {
    const Vec3 s = load3(y, n * kTopsStride + kTopsS);
    const Vec3 f = load3(y, n * kTopsStride + kTopsF);
    const double wn = params.freqs.per_atom[n];
    Vec3 exchange = Vec3::Zero();
    double total = 0.0;
    for (std::size_t m = 0; m < n_atoms; ++m) {
      const double g = params.coupling.rates(static_cast<Eigen::Index>(m),
                                             static_cast<Eigen::Index>(n));
      exchange += g * (load3(y, m * kTopsStride + kTopsS) - s);
      total += g;
    }
    store3(dydt, n * kTopsStride + kTopsF, exchange);
    store3(dydt, n * kTopsStride + kTopsS,
           exchange + wn * f.cross(s) - (wn * wn / total) * (s - 0.5 * f));
  }
}

}  // namespace reference

TopsState tops_rhs(const TopsState& state, const BlochParams& params) {
  validate_tops(params, state.size());
  const std::vector<double> y = state.flat();
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw ValidationError("tops_rhs: state is not finite");
    }
  }
  std::vector<double> dydt(y.size());
  tops_rhs(y, dydt, params);
  return TopsState::from_flat(dydt, state.t);
}

Trajectory integrate_tops(const TopsState& state0, const BlochParams& params,
                          const IntegratorOptions& opts) {
  validate_tops(params, state0.size());
  auto system = [&params](const OdeState& y, OdeState& dydt, double) {
    tops_rhs(y, dydt, params);
  };
  SampledSolution sol = integrate_sampled(system, state0.flat(), opts);
  Trajectory traj;
  traj.atoms = state0.size();
  traj.stride = kTopsStride;
  traj.times = std::move(sol.times);
  traj.samples = std::move(sol.values);
  return traj;
}

EffectiveField effective_field(const FrequencySpread& freqs, const std::vector<Vec3>& f_list) {
  if (freqs.per_atom.size() != f_list.size()) {
    throw ValidationError("effective_field: frequency and spin lists differ in length");
  }
  EffectiveField out;
  if (f_list.empty()) {
    return out;
  }
  for (std::size_t n = 0; n < f_list.size(); ++n) {
    out.omega += freqs.per_atom[n] * f_list[n];
  }
  out.omega /= static_cast<double>(f_list.size());
  out.magnitude = out.omega.norm();
  return out;
}

}  // namespace spinsync
