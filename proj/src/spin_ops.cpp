#include "spinsync/spin_ops.hpp"

#include <cmath>
#include <string>

namespace spinsync {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

AngularMomentumSet spin_matrices(double j) {
  const double twice = 2.0 * j;
  if (!(twice >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    throw ValidationError("spin_matrices: j must be a non-negative half-integer, got " +
                          std::to_string(j));
  }
  const int dim = static_cast<int>(std::lround(twice)) + 1;
  j = 0.5 * (dim - 1);

  CMatrix jz = CMatrix::Zero(dim, dim);
  CMatrix jplus = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = j - k;
    jz(k, k) = m;
    if (k > 0) {
      // j+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
      jplus(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    }
  }
  const CMatrix jminus = jplus.adjoint();

  AngularMomentumSet set;
  set.j = j;
  set.jx = 0.5 * (jplus + jminus);
  set.jy = Complex(0.0, -0.5) * (jplus - jminus);
  set.jz = std::move(jz);
  return set;
}

ProductOperators product_operators(double nuclear_spin) {
  const AngularMomentumSet electron = spin_matrices(0.5);
  const AngularMomentumSet nucleus = spin_matrices(nuclear_spin);
  const CMatrix id_e = CMatrix::Identity(2, 2);
  const CMatrix id_n = CMatrix::Identity(nucleus.dim(), nucleus.dim());

  ProductOperators ops;
  ops.nuclear_spin = nucleus.j;
  const std::array<const CMatrix*, 3> s{&electron.jx, &electron.jy, &electron.jz};
  const std::array<const CMatrix*, 3> i{&nucleus.jx, &nucleus.jy, &nucleus.jz};
  for (int k = 0; k < 3; ++k) {
    ops.S[k] = kron(*s[k], id_n);
    ops.I[k] = kron(id_e, *i[k]);
  }
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    ops.A[k] = ops.I[a] * ops.S[b] - ops.I[b] * ops.S[a];
  }
  ops.SdotI = ops.S[0] * ops.I[0] + ops.S[1] * ops.I[1] + ops.S[2] * ops.I[2];
  return ops;
}

CMatrix hyperfine_hamiltonian(double omega, const ProductOperators& ops) {
  if (ops.SdotI.size() != 0) {
    return omega * ops.SdotI;
  }
  return omega * (ops.S[0] * ops.I[0] + ops.S[1] * ops.I[1] + ops.S[2] * ops.I[2]);
}

Vec3 expectation(const Eigen::Ref<const CMatrix>& rho, const std::array<CMatrix, 3>& op) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    // Tr(rho O) = sum_ij rho_ij O_ji
    out[k] = (rho.transpose().cwiseProduct(op[k])).sum().real();
  }
  return out;
}

SpinTriple observables(const CMatrix& rho, const ProductOperators& ops) {
  if (rho.rows() != ops.dim() || rho.cols() != ops.dim()) {
    throw ValidationError("observables: density matrix is " + std::to_string(rho.rows()) + "x" +
                          std::to_string(rho.cols()) + ", operators have dimension " +
                          std::to_string(ops.dim()));
  }
  return SpinTriple{expectation(rho, ops.S), expectation(rho, ops.I), expectation(rho, ops.A)};
}

CMatrix unitary_rotation(const CMatrix& generator, double angle) {
  if (angle == 0.0) {
    return CMatrix::Identity(generator.rows(), generator.cols());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(generator);
  const Eigen::VectorXcd phases =
      (Complex(0.0, angle) * eig.eigenvalues().cast<Complex>()).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

double hermiticity_error(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace spinsync
