#pragma once

// Closed-form mean-field dynamics (identical atoms, Gamma_mn = Gamma/N, I = 1/2):
//
//   S'' + Gamma S' + w^2 (S - F/2) - w Gamma F x S = 0,   F constant.
//
// In the frame whose z axis is along F, the components
//   S_0 = S_z,   S_+ = (S_x + i S_y)/sqrt(2),   S_- = (S_x - i S_y)/sqrt(2)
// decouple and each is a sum of two exponentials e^{lambda t} (plus F/2 for S_0):
//
//   lambda^0_{1,2} = (-Gamma +- sqrt(Gamma^2 - 4w^2)) / 2
//   lambda^+_{1,2} = (-Gamma +- sqrt(Gamma^2 + 4i Gamma w |F| - 4w^2)) / 2
//   lambda^-_{1,2} = (-Gamma +- sqrt(Gamma^2 - 4i Gamma w |F| - 4w^2)) / 2
//
// Index 1 takes the + branch of the principal square root, so lambda_1 always
// has the larger real part (the slow, narrowed mode).

#include <array>
#include <span>
#include <vector>

#include "spinsync/common.hpp"

namespace spinsync {

struct MeanFieldParams {
  double omega = 1.0;
  double gamma = 0.0;
  double f_mag = 0.0;
  Vec3 f_dir = Vec3::UnitZ();

  void validate() const;
  /// Builds params from the conserved spin vector F (direction and magnitude).
  static MeanFieldParams from_total_spin(double omega, double gamma, const Vec3& f);
};

/// Six eigenvalues, grouped by spherical component. [0] is lambda_1, [1] is lambda_2.
struct EigenvalueSet {
  std::array<Complex, 2> zero;
  std::array<Complex, 2> plus;
  std::array<Complex, 2> minus;

  std::array<Complex, 6> flat() const {
    return {zero[0], zero[1], plus[0], plus[1], minus[0], minus[1]};
  }
};

EigenvalueSet exact_eigenvalues(const MeanFieldParams& p);

/// Gamma << w:  lambda^0_{1,2} = +-iw - Gamma/2,  lambda^+-_1 = +-iw - (1-|F|)Gamma/2,
/// lambda^+-_2 = -+iw - (1+|F|)Gamma/2 (the sign of Im follows the exact branch).
EigenvalueSet low_density_asymptote(const MeanFieldParams& p);

/// Gamma >> w:  lambda^0_2 = -Gamma,  lambda^0_1 = -w^2/Gamma,
/// lambda^+-_2 = -+iw|F| - Gamma,  lambda^+-_1 = +-iw|F| - (1-|F|^2) w^2/Gamma.
EigenvalueSet high_density_asymptote(const MeanFieldParams& p);

/// Residual |lambda^2 + Gamma lambda + w^2 -+ i w Gamma |F|| of each family's
/// characteristic polynomial, max over the six roots.
double characteristic_residual(const MeanFieldParams& p, const EigenvalueSet& set);

struct ModeSet {
  EigenvalueSet lambdas;
  /// Amplitudes a_i^q of the S_q components, same layout as lambdas. When the
  /// two roots of a family coincide, amps[1] multiplies t e^{lambda t}.
  EigenvalueSet amps;
  std::array<bool, 3> confluent{false, false, false};
  /// Constant particular solution F/2 (lab frame).
  Vec3 offset = Vec3::Zero();
  /// Rows are the F-aligned frame axes expressed in the lab frame.
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
};

/// Amplitudes for initial data S(0) = s0, S'(0) = w a0.
ModeSet meanfield_modes(const Vec3& s0, const Vec3& a0, const MeanFieldParams& p);

/// Lab-frame <S>(t) on the given time grid.
std::vector<Vec3> meanfield_solution(const Vec3& s0, const Vec3& a0, const MeanFieldParams& p,
                                     std::span<const double> t_grid);

/// Rotation whose rows are an orthonormal frame with third axis along dir
/// (identity for a zero vector).
Eigen::Matrix3d aligned_frame(const Vec3& dir);

}  // namespace spinsync
