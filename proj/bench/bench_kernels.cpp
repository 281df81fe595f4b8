// Serial reference vs OpenMP right-hand sides. Run with OMP_NUM_THREADS set
// to compare thread counts; the reference kernels ignore it.

#include <benchmark/benchmark.h>

#include "spinsync/harness.hpp"

namespace {

using namespace spinsync;

struct Fixture {
  BlochParams params;
  std::vector<double> bloch;
  std::vector<double> tops;
  std::vector<double> density;
  ProductOperators ops = product_operators(1.5);
};

Fixture make_fixture(std::size_t n) {
  RunConfig cfg;
  cfg.physics.N = n;
  cfg.physics.gamma_over_omega = 100.0;
  cfg.physics.beta = 0.73;
  cfg.physics.tilt.theta_y = {kPi / 3, kPi / 15};
  cfg.physics.tilt.phi_y = {kPi / 6, kPi / 30};
  cfg.physics.omega_spread = 0.02;
  cfg.physics.coupling.kind = "random";
  const Ensemble ens = build_ensemble(cfg);

  Fixture f;
  f.params = ens.params;
  const EnsembleBlochState b = bloch_state_from_density(ens.rhos, ens.ops);
  f.bloch = b.flat();
  f.tops = TopsState::from_bloch(b).flat();

  const CMatrix rho = tilt_state(spin_temperature_state({0.73, 1.5}), {kPi / 8, 0, 0, 0}, f.ops);
  f.density = DensityMatrixState{std::vector<CMatrix>(n, rho), 1.5, 0.0}.flat();
  return f;
}

template <auto Kernel>
void bloch_kernel(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.bloch.size());
  for (auto _ : state) {
    Kernel(f.bloch, out, f.params);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void tops_kernel(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.tops.size());
  for (auto _ : state) {
    Kernel(f.tops, out, f.params);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void master_kernel(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.density.size());
  for (auto _ : state) {
    Kernel(f.density, out, f.params, f.ops);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

using Span = std::span<const double>;
using OutSpan = std::span<double>;

void bloch_omp(Span y, OutSpan d, const BlochParams& p) { bloch_rhs(y, d, p); }
void bloch_serial(Span y, OutSpan d, const BlochParams& p) { reference::bloch_rhs(y, d, p); }
void tops_omp(Span y, OutSpan d, const BlochParams& p) { tops_rhs(y, d, p); }
void tops_serial(Span y, OutSpan d, const BlochParams& p) { reference::tops_rhs(y, d, p); }
void master_omp(Span y, OutSpan d, const BlochParams& p, const ProductOperators& o) {
  master_rhs(y, d, p, o);
}
void master_serial(Span y, OutSpan d, const BlochParams& p, const ProductOperators& o) {
  reference::master_rhs(y, d, p, o);
}

BENCHMARK(bloch_kernel<bloch_serial>)->Name("bloch_rhs/serial")->Arg(100)->Arg(1000);
BENCHMARK(bloch_kernel<bloch_omp>)->Name("bloch_rhs/openmp")->Arg(100)->Arg(1000);
BENCHMARK(tops_kernel<tops_serial>)->Name("tops_rhs/serial")->Arg(100)->Arg(1000);
BENCHMARK(tops_kernel<tops_omp>)->Name("tops_rhs/openmp")->Arg(100)->Arg(1000);
BENCHMARK(master_kernel<master_serial>)->Name("master_rhs/serial")->Arg(10)->Arg(50);
BENCHMARK(master_kernel<master_omp>)->Name("master_rhs/openmp")->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
