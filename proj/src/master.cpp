#include "spinsync/master.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace spinsync {

namespace {

constexpr Complex kImag{0.0, 1.0};

std::size_t block_size(int dim) { return 2 * static_cast<std::size_t>(dim * dim); }

Eigen::Map<const CMatrix> view(std::span<const double> y, std::size_t atom, int dim) {
  return Eigen::Map<const CMatrix>(
      reinterpret_cast<const Complex*>(y.data() + atom * block_size(dim)), dim, dim);
}

Eigen::Map<CMatrix> view(std::span<double> y, std::size_t atom, int dim) {
  return Eigen::Map<CMatrix>(reinterpret_cast<Complex*>(y.data() + atom * block_size(dim)), dim,
                             dim);
}

void check_layout(std::span<const double> y, const BlochParams& params,
                  const ProductOperators& ops) {
  if (y.size() != params.size() * block_size(ops.dim())) {
    throw ValidationError("master_rhs: state size does not match atoms x dim^2");
  }
}

}  // namespace

std::vector<double> DensityMatrixState::flat() const {
  if (rhos.empty()) {
    return {};
  }
  const int dim = static_cast<int>(rhos.front().rows());
  std::vector<double> y(rhos.size() * block_size(dim));
  for (std::size_t n = 0; n < rhos.size(); ++n) {
    view(std::span<double>(y), n, dim) = rhos[n];
  }
  return y;
}

DensityMatrixState DensityMatrixState::from_flat(std::span<const double> y, int dim,
                                                 double nuclear_spin, double t) {
  if (dim <= 0 || y.size() % block_size(dim) != 0) {
    throw ValidationError("DensityMatrixState: flat size does not match dimension");
  }
  DensityMatrixState s;
  s.nuclear_spin = nuclear_spin;
  s.t = t;
  for (std::size_t n = 0; n < y.size() / block_size(dim); ++n) {
    s.rhos.emplace_back(view(y, n, dim));
  }
  return s;
}

// Per-atom update, rearranged so that it costs eight matrix products:
//
//   d rho = L rho + rho R - (3/4) G rho + sum_i (S_i rho) W_i
//
// with M = m.S, L = M - i w S.I, R = M + i w S.I, W_i = G S_i - 2i (S x m)_i,
// where m = sum_m G_mn <S_m> and G = sum_m G_mn. The last sum combines the
// S_i rho S_i dissipator with the -2i m.(S x rho S) term.
template <typename Mat>
void atom_update(const Eigen::Map<const CMatrix>& rho, Eigen::Map<CMatrix> out,
                 const ProductOperators& ops, double wn, double total, const Vec3& m) {
  const auto& s = ops.S;
  const Mat mdots = m[0] * s[0] + m[1] * s[1] + m[2] * s[2];
  const Mat hf = (kImag * wn) * ops.SdotI;
  const Mat left = mdots - hf;
  const Mat right = mdots + hf;
  const Mat r = rho;

  Mat acc;
  acc.noalias() = left * r;
  acc.noalias() += r * right;
  acc -= (0.75 * total) * r;
  Mat sr, w;
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    w = total * s[i] - (2.0 * kImag) * (m[b] * s[a] - m[a] * s[b]);
    sr.noalias() = s[i] * r;
    acc.noalias() += sr * w;
  }
  out = acc;
}

using SmallMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 16, 16>;

void master_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params,
                const ProductOperators& ops) {
  check_layout(y, params, ops);
  const int dim = ops.dim();
  const auto n_atoms = static_cast<long>(params.size());

  std::vector<Vec3> spin(static_cast<std::size_t>(n_atoms));
#pragma omp parallel for schedule(static)
  for (long m = 0; m < n_atoms; ++m) {
    spin[m] = expectation(view(y, m, dim), ops.S);
  }

#pragma omp parallel for schedule(static)
  for (long n = 0; n < n_atoms; ++n) {
    const double* col = params.coupling.rates.col(n).data();
    Vec3 mean = Vec3::Zero();
    double total = 0.0;
    for (long m = 0; m < n_atoms; ++m) {
      mean += col[m] * spin[m];
      total += col[m];
    }
    const double wn = params.freqs.per_atom[n];
    if (dim == 4) {
      atom_update<Eigen::Matrix<Complex, 4, 4>>(view(y, n, dim), view(dydt, n, dim), ops, wn,
                                                total, mean);
    } else if (dim == 8) {
      atom_update<Eigen::Matrix<Complex, 8, 8>>(view(y, n, dim), view(dydt, n, dim), ops, wn,
                                                total, mean);
    } else if (dim <= 16) {
      atom_update<SmallMat>(view(y, n, dim), view(dydt, n, dim), ops, wn, total, mean);
    } else {
      atom_update<CMatrix>(view(y, n, dim), view(dydt, n, dim), ops, wn, total, mean);
    }
  }
}

namespace reference {

void master_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params,
                const ProductOperators& ops) {
  check_layout(y, params, ops);
  const int dim = ops.dim();
  const std::size_t n_atoms = params.size();

  auto levi = [](int i, int j, int k) -> double {
    if (i == j || j == k || i == k) return 0.0;
    return ((i + 1) % 3 == j) ? 1.0 : -1.0;
  };

  std::vector<Vec3> spin(n_atoms);
  for (std::size_t m = 0; m < n_atoms; ++m) {
    const CMatrix rho = view(y, m, dim);
    for (int i = 0; i < 3; ++i) {
      spin[m][i] = (rho * ops.S[i]).trace().real();
    }
  }

  CMatrix h = CMatrix::Zero(dim, dim);
  for (int i = 0; i < 3; ++i) {
    h += ops.I[i] * ops.S[i];
  }

  for (std::size_t n = 0; n < n_atoms; ++n) {
    const CMatrix rho = view(y, n, dim);
    const double wn = params.freqs.per_atom[n];
    CMatrix d = -kImag * wn * (h * rho - rho * h);
    for (std::size_t m = 0; m < n_atoms; ++m) {
      const double g = params.coupling.rates(static_cast<Eigen::Index>(m),
                                             static_cast<Eigen::Index>(n));
      if (g == 0.0) continue;
      CMatrix term = -0.75 * rho;
      for (int i = 0; i < 3; ++i) {
        term += ops.S[i] * rho * ops.S[i];
        term += spin[m][i] * (ops.S[i] * rho + rho * ops.S[i]);
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) {
            const double e = levi(i, j, k);
            if (e != 0.0) {
              term += (-2.0 * kImag * e * spin[m][k]) * (ops.S[i] * rho * ops.S[j]);
            }
          }
        }
      }
      d += g * term;
    }
    view(dydt, n, dim) = d;
  }
}

}  // namespace reference

DensityMatrixState master_rhs(const DensityMatrixState& state, const BlochParams& params,
                              const ProductOperators& ops) {
  params.validate(state.size());
  for (const auto& rho : state.rhos) {
    if (rho.rows() != ops.dim() || rho.cols() != ops.dim()) {
      throw ValidationError("master_rhs: density matrix dimension does not match operators");
    }
    if (hermiticity_error(rho) > 1e-10) {
      throw ValidationError("master_rhs: density matrix is not Hermitian");
    }
  }
  const std::vector<double> y = state.flat();
  std::vector<double> dydt(y.size());
  master_rhs(y, dydt, params, ops);
  return DensityMatrixState::from_flat(dydt, ops.dim(), state.nuclear_spin, state.t);
}

MasterRun integrate_master(const DensityMatrixState& state0, const BlochParams& params,
                           const ProductOperators& ops, const IntegratorOptions& opts,
                           bool keep_density) {
  params.validate(state0.size());
  for (const auto& rho : state0.rhos) {
    if (rho.rows() != ops.dim() || hermiticity_error(rho) > 1e-10) {
      throw ValidationError("integrate_master: invalid initial density matrix");
    }
  }
  auto system = [&params, &ops](const OdeState& y, OdeState& dydt, double) {
    master_rhs(y, dydt, params, ops);
  };
  SampledSolution sol = integrate_sampled(system, state0.flat(), opts);

  const int dim = ops.dim();
  const std::size_t n_atoms = state0.size();
  MasterRun run;
  run.observables.atoms = n_atoms;
  run.observables.stride = layout::kBlochStride;
  run.observables.times = sol.times;
  run.observables.samples.reserve(sol.values.size());
  run.monitor.min_eigenvalue = 0.0;

  for (std::size_t k = 0; k < sol.values.size(); ++k) {
    const std::span<const double> y(sol.values[k]);
    std::vector<double> obs(n_atoms * layout::kBlochStride);
    bool violated = false;
    for (std::size_t n = 0; n < n_atoms; ++n) {
      const CMatrix rho = view(y, n, dim);
      const SpinTriple triple = observables(rho, ops);
      store3(obs, n * layout::kBlochStride + layout::kS, triple.S);
      store3(obs, n * layout::kBlochStride + layout::kI, triple.I);
      store3(obs, n * layout::kBlochStride + layout::kA, triple.A);

      auto& mon = run.monitor;
      mon.max_trace_error = std::max(mon.max_trace_error, std::abs(rho.trace() - 1.0));
      mon.max_hermiticity_error = std::max(mon.max_hermiticity_error, hermiticity_error(rho));
      const CMatrix herm = 0.5 * (rho + rho.adjoint());
      const double lowest = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly)
                                .eigenvalues()
                                .minCoeff();
      mon.min_eigenvalue = std::min(mon.min_eigenvalue, lowest);
      violated = violated || lowest < -1e-7;
    }
    if (violated) {
      ++run.monitor.positivity_violations;
    }
    run.observables.samples.push_back(std::move(obs));
    if (keep_density) {
      run.snapshots.push_back(
          DensityMatrixState::from_flat(y, dim, state0.nuclear_spin, sol.times[k]));
    }
  }
  return run;
}

MasterRun mean_field_mode(const CMatrix& rho0, double omega, double gamma,
                          const ProductOperators& ops, const IntegratorOptions& opts,
                          bool keep_density) {
  BlochParams params{CouplingMatrix::uniform(1, gamma), FrequencySpread::uniform(1, omega)};
  DensityMatrixState state{{rho0}, ops.nuclear_spin, 0.0};
  return integrate_master(state, params, ops, opts, keep_density);
}

std::string format_density_matrix(const CMatrix& rho) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g %.17g", j ? " " : "", rho(i, j).real(),
                    rho(i, j).imag());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace spinsync
