#include "spinsync/ensemble_init.hpp"

#include <cmath>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace spinsync {

std::vector<double> EnsembleBlochState::flat() const {
  std::vector<double> y(atoms.size() * layout::kBlochStride);
  for (std::size_t n = 0; n < atoms.size(); ++n) {
    const std::size_t base = n * layout::kBlochStride;
    store3(y, base + layout::kS, atoms[n].S);
    store3(y, base + layout::kI, atoms[n].I);
    store3(y, base + layout::kA, atoms[n].A);
  }
  return y;
}

EnsembleBlochState EnsembleBlochState::from_flat(std::span<const double> y, double t) {
  if (y.size() % layout::kBlochStride != 0) {
    throw ValidationError("EnsembleBlochState: flat size is not a multiple of 9");
  }
  EnsembleBlochState state;
  state.t = t;
  state.atoms.resize(y.size() / layout::kBlochStride);
  for (std::size_t n = 0; n < state.atoms.size(); ++n) {
    const std::size_t base = n * layout::kBlochStride;
    state.atoms[n] = SpinTriple{load3(y, base + layout::kS), load3(y, base + layout::kI),
                                load3(y, base + layout::kA)};
  }
  return state;
}

CMatrix spin_temperature_state(const SpinTempConfig& cfg) {
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) {
    throw ValidationError("spin_temperature_state: beta must be finite and >= 0");
  }
  const ProductOperators ops = product_operators(cfg.nuclear_spin);
  // F_z is diagonal in the product basis.
  const Eigen::VectorXd fz = ops.Fz().diagonal().real();
  const double shift = fz.maxCoeff();  // keeps exp() bounded for large beta
  Eigen::VectorXd weights = (-cfg.beta * (fz.array() + shift)).exp();
  weights /= weights.sum();
  return weights.cast<Complex>().asDiagonal();
}

CMatrix tilt_state(const CMatrix& rho, const TiltAngles& angles, const ProductOperators& ops) {
  if (rho.rows() != ops.dim() || rho.cols() != ops.dim()) {
    throw ValidationError("tilt_state: density matrix dimension does not match operators");
  }
  const CMatrix u = unitary_rotation(ops.S[2], angles.theta_z) *
                    unitary_rotation(ops.S[1], angles.theta_y) *
                    unitary_rotation(ops.I[2], angles.phi_z) *
                    unitary_rotation(ops.I[1], angles.phi_y);
  return u * rho * u.adjoint();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> sample_angles(double mean, double sigma, std::size_t n, std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw ValidationError("sample_angles: sigma must be >= 0");
  }
  std::vector<double> out(n, mean);
  if (sigma == 0.0) {
    return out;
  }
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> dist(mean, sigma);
  for (auto& v : out) {
    v = dist(rng);
  }
  return out;
}

double stochastic_deviation(const Eigen::MatrixXd& p) {
  const double rows = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (p.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

namespace {

bool sinkhorn(Eigen::MatrixXd& p, double tol, int max_iterations) {
  for (int it = 0; it < max_iterations; ++it) {
    p.array().colwise() /= p.rowwise().sum().array();
    p.array().rowwise() /= p.colwise().sum().array();
    if (stochastic_deviation(p) < tol) {
      return true;
    }
  }
  return false;
}

// D p D scaling of a symmetric matrix; d_i <- sqrt(d_i / (p d)_i).
bool symmetric_sinkhorn(Eigen::MatrixXd& p, double tol, int max_iterations) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(p.rows());
  for (int it = 0; it < max_iterations; ++it) {
    d = (d.array() / (p * d).array()).sqrt();
    const Eigen::VectorXd sums = d.cwiseProduct(p * d);
    if ((sums.array() - 1.0).abs().maxCoeff() < 0.1 * tol) {
      break;
    }
  }
  p = d.asDiagonal() * p * d.asDiagonal();
  return stochastic_deviation(p) < tol;
}

}  // namespace

Eigen::MatrixXd doubly_stochastic(std::size_t n, std::uint64_t seed, const StochasticOptions& opts) {
  if (n < 2) {
    throw ValidationError("doubly_stochastic: need N >= 2");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  boost::random::mt19937_64 rng(seed);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd p(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      p(i, j) = std::max(unit(rng), 1e-12);
    }
  }
  if (opts.zero_diagonal) {
    p.diagonal().setZero();
  }
  if (!sinkhorn(p, opts.tol, opts.max_iterations)) {
    throw NumericalError("doubly_stochastic: Sinkhorn scaling did not converge (seed " +
                         std::to_string(seed) + "); resample");
  }
  if (opts.symmetric) {
    p = 0.5 * (p + p.transpose()).eval();
    if (!symmetric_sinkhorn(p, opts.tol, opts.max_iterations)) {
      throw NumericalError("doubly_stochastic: symmetric rescaling did not converge (seed " +
                           std::to_string(seed) + "); resample");
    }
  }
  return p;
}

CouplingMatrix CouplingMatrix::uniform(std::size_t n, double gamma) {
  if (n == 0 || !(gamma >= 0.0)) {
    throw ValidationError("CouplingMatrix::uniform: need N >= 1 and gamma >= 0");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  return CouplingMatrix{Eigen::MatrixXd::Constant(dim, dim, gamma / static_cast<double>(n))};
}

CouplingMatrix CouplingMatrix::from_pattern(const Eigen::MatrixXd& p, double gamma) {
  if (p.rows() != p.cols() || (p.array() < 0.0).any() || !(gamma >= 0.0)) {
    throw ValidationError("CouplingMatrix::from_pattern: need a square non-negative pattern");
  }
  return CouplingMatrix{gamma * p};
}

double FrequencySpread::width() const {
  double acc = 0.0;
  for (double w : per_atom) {
    acc += (w - nominal) * (w - nominal);
  }
  return std::sqrt(acc);
}

FrequencySpread FrequencySpread::uniform(std::size_t n, double omega) {
  if (!(omega > 0.0)) {
    throw ValidationError("FrequencySpread: omega must be positive");
  }
  return FrequencySpread{omega, std::vector<double>(n, omega)};
}

FrequencySpread FrequencySpread::sample(double omega, double sigma, std::size_t n,
                                        std::uint64_t seed) {
  if (!(omega > 0.0) || !(sigma >= 0.0)) {
    throw ValidationError("FrequencySpread: need omega > 0 and sigma >= 0");
  }
  if (sigma == 0.0) {
    return uniform(n, omega);
  }
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> dist(omega, sigma);
  FrequencySpread out{omega, std::vector<double>(n)};
  for (auto& w : out.per_atom) {
    do {
      w = dist(rng);
    } while (!(w > 0.0));
  }
  return out;
}

EnsembleBlochState bloch_state_from_density(const std::vector<CMatrix>& rhos,
                                            const ProductOperators& ops) {
  EnsembleBlochState state;
  state.atoms.reserve(rhos.size());
  for (const auto& rho : rhos) {
    state.atoms.push_back(observables(rho, ops));
  }
  return state;
}

}  // namespace spinsync
