#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinsync/bloch.hpp"
#include "spinsync/meanfield.hpp"

using namespace spinsync;

namespace {

EnsembleBlochState random_ensemble(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto ops = product_operators(0.5);
  std::vector<CMatrix> rhos;
  for (std::size_t k = 0; k < n; ++k) rhos.push_back(oracle::random_density(4, rng));
  return bloch_state_from_density(rhos, ops);
}

BlochParams random_params(std::size_t n, double gamma, std::uint64_t seed) {
  return {CouplingMatrix::from_pattern(doubly_stochastic(n, seed), gamma),
          FrequencySpread::sample(1.0, 0.05, n, seed + 1)};
}

}  // namespace

TEST_CASE("OpenMP kernel equals the serial reference") {
  const auto state = random_ensemble(17, 3);
  StochasticOptions asym;
  asym.symmetric = false;
  const BlochParams params{CouplingMatrix::from_pattern(doubly_stochastic(17, 5, asym), 7.0),
                           FrequencySpread::sample(1.0, 0.1, 17, 6)};
  const auto y = state.flat();
  std::vector<double> a(y.size()), b(y.size());
  bloch_rhs(y, a, params);
  reference::bloch_rhs(y, b, params);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("total spin is conserved by the right-hand side") {
  const auto state = random_ensemble(9, 4);
  const auto d = bloch_rhs(state, random_params(9, 50.0, 8));
  Vec3 sum = Vec3::Zero();
  for (const auto& atom : d.atoms) sum += atom.F();
  CHECK(sum.norm() < 1e-13);
}

TEST_CASE("total spin is conserved along trajectories") {
  const auto state = random_ensemble(12, 5);
  IntegratorOptions o;
  o.t_end = 20.0;
  o.sample_dt = 0.1;
  for (double g : {0.01, 1.0, 100.0}) {
    CAPTURE(g);
    const auto traj = integrate(state, random_params(12, g, 10), o);
    CHECK(total_spin_drift(traj) < 1e-8);
  }
}

TEST_CASE("uncoupled atom with electron up, nucleus down: <S_z> = cos(wt)/2") {
  EnsembleBlochState s;
  s.atoms.resize(1);
  s.atoms[0].S = Vec3(0, 0, 0.5);
  s.atoms[0].I = Vec3(0, 0, -0.5);
  IntegratorOptions o;
  o.t_end = 30.0;
  o.sample_dt = 0.25;
  const BlochParams p{CouplingMatrix::uniform(1, 0.0), FrequencySpread::uniform(1, 1.3)};
  const auto traj = integrate(s, p, o);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(std::abs(traj.vec(k, 0, layout::kS).z() - oracle::two_level_sz(1.3, traj.times[k])) < 1e-8);
  }
}

TEST_CASE("identical atoms with uniform coupling follow the mean-field closed form") {
  const auto ops = product_operators(0.5);
  const CMatrix rho = tilt_state(spin_temperature_state({0.51, 0.5}), {kPi / 8, 0.2, 0.1, 0}, ops);
  const auto state = bloch_state_from_density(std::vector<CMatrix>(5, rho), ops);
  IntegratorOptions o;
  o.t_end = 40.0;
  o.sample_dt = 0.2;
  for (double g : {0.3, 2.0, 30.0}) {
    CAPTURE(g);
    const BlochParams p{CouplingMatrix::uniform(5, g), FrequencySpread::uniform(5, 1.0)};
    const auto traj = integrate(state, p, o);
    const auto& a0 = state.atoms[0];
    const auto mf = meanfield_solution(a0.S, a0.A, MeanFieldParams::from_total_spin(1.0, g, a0.F()),
                                       traj.times);
    double err = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      err = std::max(err, (traj.mean_vec(k, layout::kS) - mf[k]).norm());
    }
    CHECK(err < 1e-7);
  }
}

TEST_CASE("permuting atoms permutes the trajectory") {
  const std::size_t n = 6;
  const auto state = random_ensemble(n, 21);
  const auto params = random_params(n, 3.0, 22);
  const std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};

  EnsembleBlochState ps;
  BlochParams pp;
  pp.coupling.rates.resize(n, n);
  pp.freqs.per_atom.resize(n);
  ps.atoms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps.atoms[i] = state.atoms[perm[i]];
    pp.freqs.per_atom[i] = params.freqs.per_atom[perm[i]];
    for (std::size_t j = 0; j < n; ++j) pp.coupling.rates(i, j) = params.coupling.rates(perm[i], perm[j]);
  }
  IntegratorOptions o;
  o.t_end = 5.0;
  o.sample_dt = 0.5;
  const auto a = integrate(state, params, o);
  const auto b = integrate(ps, pp, o);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      CHECK((b.vec(k, i, layout::kA) - a.vec(k, perm[i], layout::kA)).norm() < 1e-8);
    }
  }
}

TEST_CASE("global rotation commutes with the dynamics") {
  const std::size_t n = 4;
  const auto state = random_ensemble(n, 31);
  const auto params = random_params(n, 5.0, 32);
  const Eigen::Matrix3d r = oracle::rotation(0.3, -1.2, 2.1);
  EnsembleBlochState rs = state;
  for (auto& a : rs.atoms) {
    a.S = r * a.S;
    a.I = r * a.I;
    a.A = r * a.A;
  }
  IntegratorOptions o;
  o.t_end = 5.0;
  o.sample_dt = 0.5;
  const auto a = integrate(state, params, o);
  const auto b = integrate(rs, params, o);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      CHECK((b.vec(k, i, layout::kS) - r * a.vec(k, i, layout::kS)).norm() < 1e-8);
    }
  }
}

TEST_CASE("invalid inputs") {
  auto state = random_ensemble(3, 1);
  const BlochParams p{CouplingMatrix::uniform(3, 1.0), FrequencySpread::uniform(3, 1.0)};
  const BlochParams wrong{CouplingMatrix::uniform(2, 1.0), FrequencySpread::uniform(2, 1.0)};
  CHECK_THROWS_AS(bloch_rhs(state, wrong), ValidationError);
  state.atoms[1].S.x() = std::nan("");
  CHECK_THROWS_AS(bloch_rhs(state, p), ValidationError);
  IntegratorOptions o;
  o.t_end = 0.0;
  CHECK_THROWS_AS(integrate(random_ensemble(3, 1), p, o), ValidationError);
}
