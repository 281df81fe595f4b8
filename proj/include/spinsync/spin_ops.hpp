#pragma once

// Angular-momentum algebra for one alkali atom (electron spin 1/2 coupled to a
// nuclear spin I). Units: hbar = 1, spin operators are dimensionless.
//
// Basis convention, shared by every engine and by serialized density
// matrices: product states |m_S> (x) |m_I>, both m values descending. Index
// k = iS * (2I+1) + iI with iS = 1/2 - m_S and iI = I - m_I.

#include <array>

#include "spinsync/common.hpp"

namespace spinsync {

struct AngularMomentumSet {
  double j = 0.0;
  CMatrix jx, jy, jz;

  int dim() const { return static_cast<int>(jz.rows()); }
};

/// Ladder-operator construction of (jx, jy, jz) for spin j. Throws
/// ValidationError unless 2j is a non-negative integer.
AngularMomentumSet spin_matrices(double j);

/// Electron, nuclear and hyperfine-coherence operators on the product space.
///
/// The coherence operator is A_k = sum_ij eps_kij I_i S_j, i.e. A = I x S.
/// Electron and nuclear operators commute, so A is Hermitian as written. With
/// this orientation dS/dt = omega*A under the hyperfine Hamiltonian.
struct ProductOperators {
  double nuclear_spin = 0.5;
  std::array<CMatrix, 3> S;
  std::array<CMatrix, 3> I;
  std::array<CMatrix, 3> A;
  /// S.I, cached for the hyperfine Hamiltonian.
  CMatrix SdotI;

  int dim() const { return static_cast<int>(S[0].rows()); }
  CMatrix Fz() const { return S[2] + I[2]; }
};

ProductOperators product_operators(double nuclear_spin);

/// omega * S.I
CMatrix hyperfine_hamiltonian(double omega, const ProductOperators& ops);

/// Expectation values <S>, <I>, <A> of one atom.
struct SpinTriple {
  Vec3 S = Vec3::Zero();
  Vec3 I = Vec3::Zero();
  Vec3 A = Vec3::Zero();

  Vec3 F() const { return S + I; }
};

/// Re Tr(rho O_k) for the three components of a vector operator.
Vec3 expectation(const Eigen::Ref<const CMatrix>& rho, const std::array<CMatrix, 3>& op);

/// Throws ValidationError when rho's dimension does not match ops.
SpinTriple observables(const CMatrix& rho, const ProductOperators& ops);

/// exp(i * angle * generator) for a Hermitian generator.
CMatrix unitary_rotation(const CMatrix& generator, double angle);

/// Largest element-wise |M - M^dagger|.
double hermiticity_error(const CMatrix& m);

}  // namespace spinsync
