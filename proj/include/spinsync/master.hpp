#pragma once

// Reduced density-matrix master equation for N atoms with arbitrary nuclear
// spin I (product-state closure of pairwise spin-exchange collisions):
//
//   d rho_n/dt = -i w_n [S.I, rho_n]
//              + sum_m G_mn ( -3/4 rho_n + sum_i S_i rho_n S_i
//                             + <S_m>.(rho_n S + S rho_n - 2i S x rho_n S) )
//
// where (S x rho S)_k = sum_ij eps_kij S_i rho S_j and <S_m> = Tr(rho_m S).
// The collisional frequency-shift term is not included.
//
// Flat layout: each rho_n is stored column-major as interleaved (re, im)
// pairs; atoms follow one another.

#include <span>
#include <string>
#include <vector>

#include "spinsync/bloch.hpp"

namespace spinsync {

struct DensityMatrixState {
  std::vector<CMatrix> rhos;
  double nuclear_spin = 0.5;
  double t = 0.0;

  std::size_t size() const { return rhos.size(); }
  std::vector<double> flat() const;
  static DensityMatrixState from_flat(std::span<const double> y, int dim, double nuclear_spin,
                                      double t = 0.0);
};

void master_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params,
                const ProductOperators& ops);

namespace reference {
void master_rhs(std::span<const double> y, std::span<double> dydt, const BlochParams& params,
                const ProductOperators& ops);
}  // namespace reference

/// Value form. Throws ValidationError when an input rho is non-Hermitian
/// beyond 1e-10 or has the wrong dimension.
DensityMatrixState master_rhs(const DensityMatrixState& state, const BlochParams& params,
                              const ProductOperators& ops);

struct DensityMonitor {
  double max_trace_error = 0.0;        // max |Tr rho_n - 1|
  double max_hermiticity_error = 0.0;  // max |rho - rho^dagger|
  double min_eigenvalue = 0.0;         // most negative eigenvalue seen
  std::size_t positivity_violations = 0;  // samples with an eigenvalue below -1e-7
};

struct MasterRun {
  /// Per-atom (S, I, A) observables in the Bloch layout.
  Trajectory observables;
  std::vector<DensityMatrixState> snapshots;  // filled when requested
  DensityMonitor monitor;
};

MasterRun integrate_master(const DensityMatrixState& state0, const BlochParams& params,
                           const ProductOperators& ops, const IntegratorOptions& opts,
                           bool keep_density = false);

/// One density matrix standing for every atom: <S_m> is the atom's own <S>
/// and the total exchange rate is gamma.
MasterRun mean_field_mode(const CMatrix& rho0, double omega, double gamma,
                          const ProductOperators& ops, const IntegratorOptions& opts,
                          bool keep_density = false);

/// Rows "re im re im ..." of a matrix, one line per row, for text snapshots.
std::string format_density_matrix(const CMatrix& rho);

}  // namespace spinsync
