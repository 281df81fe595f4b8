#include <doctest.h>

#include "spinsync/spin_ops.hpp"

using namespace spinsync;

namespace {

double commutator_error(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  return (a * b - b * a - Complex(0, 1) * c).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("spin matrices satisfy the angular momentum algebra") {
  for (double j : {0.5, 1.0, 1.5, 2.5, 3.5}) {
    CAPTURE(j);
    const auto s = spin_matrices(j);
    CHECK(s.dim() == static_cast<int>(2 * j + 1));
    CHECK(commutator_error(s.jx, s.jy, s.jz) < 1e-12);
    CHECK(commutator_error(s.jy, s.jz, s.jx) < 1e-12);
    CHECK(commutator_error(s.jz, s.jx, s.jy) < 1e-12);
    const CMatrix j2 = s.jx * s.jx + s.jy * s.jy + s.jz * s.jz;
    CHECK((j2 - j * (j + 1) * CMatrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.jz(0, 0).real() == doctest::Approx(j));
  }
}

TEST_CASE("spin 1/2 gives half the Pauli matrices") {
  const auto s = spin_matrices(0.5);
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 0.5, 0.5, 0;
  sy << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
  sz << 0.5, 0, 0, -0.5;
  CHECK((s.jx - sx).norm() < 1e-15);
  CHECK((s.jy - sy).norm() < 1e-15);
  CHECK((s.jz - sz).norm() < 1e-15);
}

TEST_CASE("non half-integer spin is rejected") {
  CHECK_THROWS_AS(spin_matrices(0.3), ValidationError);
  CHECK_THROWS_AS(spin_matrices(-0.5), ValidationError);
  CHECK_THROWS_AS(product_operators(1.2), ValidationError);
}

TEST_CASE("product operators: commuting species, Hermitian coherence, conserved F") {
  for (double nuc : {0.5, 1.5}) {
    CAPTURE(nuc);
    const auto ops = product_operators(nuc);
    CHECK(ops.dim() == 2 * static_cast<int>(2 * nuc + 1));
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        CHECK((ops.S[a] * ops.I[b] - ops.I[b] * ops.S[a]).norm() < 1e-13);
      }
      CHECK(hermiticity_error(ops.A[a]) < 1e-14);
    }
    // A = I x S, e.g. A_z = I_x S_y - I_y S_x.
    CHECK((ops.A[2] - (ops.I[0] * ops.S[1] - ops.I[1] * ops.S[0])).norm() < 1e-14);

    const CMatrix h = hyperfine_hamiltonian(1.0, ops);
    for (int k = 0; k < 3; ++k) {
      const CMatrix f = ops.S[k] + ops.I[k];
      CHECK((h * f - f * h).norm() < 1e-12);
    }
    // Heisenberg: d<S>/dt = i<[H, S]> = w <A>.
    for (int k = 0; k < 3; ++k) {
      const CMatrix ds = Complex(0, 1) * (h * ops.S[k] - ops.S[k] * h);
      CHECK((ds - ops.A[k]).norm() < 1e-12);
    }
  }
}

TEST_CASE("hyperfine levels of I = 1/2 are the triplet and singlet") {
  const auto ops = product_operators(0.5);
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<CMatrix>(hyperfine_hamiltonian(2.0, ops)).eigenvalues();
  CHECK(ev[0] == doctest::Approx(-1.5));
  for (int k = 1; k < 4; ++k) CHECK(ev[k] == doctest::Approx(0.5));
}

TEST_CASE("expectation values and observables") {
  const auto ops = product_operators(0.5);
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(1, 1) = 1.0;  // |up, down>
  const SpinTriple t = observables(rho, ops);
  CHECK(t.S.z() == doctest::Approx(0.5));
  CHECK(t.I.z() == doctest::Approx(-0.5));
  CHECK(t.F().norm() == doctest::Approx(0.0));
  CHECK(t.A.norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(observables(CMatrix::Identity(3, 3), ops), ValidationError);
}

TEST_CASE("unitary rotation is unitary and rotates the spin") {
  const auto s = spin_matrices(0.5);
  const CMatrix u = unitary_rotation(s.jy, 0.7);
  CHECK((u * u.adjoint() - CMatrix::Identity(2, 2)).norm() < 1e-14);
  // d/da of e^{-i a Sy} Sz e^{i a Sy} is -i[Sy, Sz] = Sx.
  const CMatrix rotated = u.adjoint() * s.jz * u;
  const CMatrix expected = std::cos(0.7) * s.jz + std::sin(0.7) * s.jx;
  CHECK((rotated - expected).norm() < 1e-14);
  CHECK((unitary_rotation(s.jy, 0.0) - CMatrix::Identity(2, 2)).norm() == 0.0);
}
