#pragma once

// Independent reference computations for the tests. Nothing here calls the
// routine it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;

/// Mean-field dynamics of identical atoms as a 6x6 linear system in (S, A)
/// with F held fixed:  S' = w A,  A' = -w S + w F/2 - G A + G F x S.
inline Eigen::Matrix<double, 6, 6> meanfield_matrix(double w, double g, const Eigen::Vector3d& f) {
  Eigen::Matrix3d cross;
  cross << 0, -f.z(), f.y(), f.z(), 0, -f.x(), -f.y(), f.x(), 0;
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m.block<3, 3>(0, 3) = w * Eigen::Matrix3d::Identity();
  m.block<3, 3>(3, 0) = -w * Eigen::Matrix3d::Identity() + g * cross;
  m.block<3, 3>(3, 3) = -g * Eigen::Matrix3d::Identity();
  return m;
}

inline std::vector<Complex> meanfield_eigenvalues(double w, double g, double f_mag) {
  const Eigen::Matrix<double, 6, 6> m = meanfield_matrix(w, g, Eigen::Vector3d(0, 0, f_mag));
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>>(m, false).eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Distance from z to the nearest entry of the list.
inline double nearest(const std::vector<Complex>& list, Complex z) {
  double best = INFINITY;
  for (const auto& c : list) best = std::min(best, std::abs(c - z));
  return best;
}

/// <S_z> and <I_z> of exp(-beta (S_z + I_z))/Z by explicit sums over m.
inline std::array<double, 2> spin_temperature_moments(double beta, double nuclear_spin) {
  auto moment = [beta](double j) {
    double num = 0.0, den = 0.0;
    for (double m = -j; m <= j + 1e-9; m += 1.0) {
      const double wgt = std::exp(-beta * m);
      num += m * wgt;
      den += wgt;
    }
    return num / den;
  };
  return {moment(0.5), moment(nuclear_spin)};
}

/// I = 1/2, no collisions, start in |up>|down>:  <S_z>(t) = cos(w t)/2.
inline double two_level_sz(double w, double t) { return 0.5 * std::cos(w * t); }

struct Damped {
  Complex lambda;
  Complex amp;
};

/// Real part of sum_j amp_j exp(lambda_j t) on t = k dt.
inline std::vector<double> synthetic(const std::vector<Damped>& modes, double dt, std::size_t n) {
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = dt * static_cast<double>(k);
    for (const auto& m : modes) y[k] += (m.amp * std::exp(m.lambda * t)).real();
  }
  return y;
}

/// Random Hermitian, positive, unit-trace matrix.
inline Eigen::MatrixXcd random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

inline Eigen::Matrix3d rotation(double ax, double ay, double az) {
  return (Eigen::AngleAxisd(az, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

}  // namespace oracle
