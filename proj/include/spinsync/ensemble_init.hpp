#pragma once

// Initial conditions and interaction parameters for an ensemble of atoms.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinsync/common.hpp"
#include "spinsync/spin_ops.hpp"
#include "spinsync/state.hpp"

namespace spinsync {

/// exp(-beta F_z)/Z. The polarization points along -z for beta > 0.
struct SpinTempConfig {
  double beta = 0.0;
  double nuclear_spin = 0.5;
};

CMatrix spin_temperature_state(const SpinTempConfig& cfg);

/// Electron tilt (theta) and nuclear tilt (phi) angles, radians. The state is
/// conjugated by U = e^{i theta_z S_z} e^{i theta_y S_y} e^{i phi_z I_z} e^{i phi_y I_y}.
struct TiltAngles {
  double theta_y = 0.0;
  double theta_z = 0.0;
  double phi_y = 0.0;
  double phi_z = 0.0;
};

CMatrix tilt_state(const CMatrix& rho, const TiltAngles& angles, const ProductOperators& ops);

/// Independent seed for a named sub-stream of a run (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// n draws from Normal(mean, sigma). Deterministic for a given seed on every
/// platform (boost.random mt19937_64 + boost normal_distribution).
std::vector<double> sample_angles(double mean, double sigma, std::size_t n, std::uint64_t seed);

struct StochasticOptions {
  bool symmetric = true;
  bool zero_diagonal = true;
  double tol = 1e-10;
  int max_iterations = 100000;
};

/// Random doubly stochastic N x N matrix by Sinkhorn-Knopp scaling of a
/// strictly positive random matrix. With zero_diagonal the diagonal is cleared
/// before scaling; with symmetric the result is (p + p^T)/2 rescaled
/// symmetrically (D p D), so it stays exactly symmetric. Throws NumericalError
/// if the scaling does not converge; callers resample with another seed.
Eigen::MatrixXd doubly_stochastic(std::size_t n, std::uint64_t seed,
                                  const StochasticOptions& opts = {});

/// Largest deviation of any row or column sum from one.
double stochastic_deviation(const Eigen::MatrixXd& p);

/// Pairwise exchange rates. rates(m, n) is Gamma_mn, the rate at which atom n
/// exchanges with atom m. The per-atom total rate is Gamma_n = sum_m Gamma_mn.
struct CouplingMatrix {
  Eigen::MatrixXd rates;

  std::size_t size() const { return static_cast<std::size_t>(rates.rows()); }
  double total_rate(std::size_t n) const { return rates.col(static_cast<Eigen::Index>(n)).sum(); }

  /// Gamma_mn = Gamma/N for every pair, self term included.
  static CouplingMatrix uniform(std::size_t n, double gamma);
  /// Gamma_mn = Gamma * p_mn; a doubly stochastic p gives total rate Gamma per atom.
  static CouplingMatrix from_pattern(const Eigen::MatrixXd& p, double gamma);
};

struct FrequencySpread {
  double nominal = 1.0;
  std::vector<double> per_atom;

  /// [sum_n (omega_n - omega)^2]^{1/2}
  double width() const;

  static FrequencySpread uniform(std::size_t n, double omega);
  /// omega_n ~ Normal(omega, sigma); draws that are not positive are redrawn.
  static FrequencySpread sample(double omega, double sigma, std::size_t n, std::uint64_t seed);
};

EnsembleBlochState bloch_state_from_density(const std::vector<CMatrix>& rhos,
                                            const ProductOperators& ops);

}  // namespace spinsync
