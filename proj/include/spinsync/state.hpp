#pragma once

// Flat state layouts used by the integrators.
//
// Bloch engine: 9 doubles per atom, atom-major:
//   [Sx Sy Sz  Ix Iy Iz  Ax Ay Az] for atom 0, then atom 1, ...
// Tops engine: 6 doubles per atom: [Sx Sy Sz  Fx Fy Fz].

#include <cstddef>
#include <span>
#include <vector>

#include "spinsync/spin_ops.hpp"

namespace spinsync {

namespace layout {
inline constexpr std::size_t kBlochStride = 9;
inline constexpr std::size_t kS = 0;
inline constexpr std::size_t kI = 3;
inline constexpr std::size_t kA = 6;

inline constexpr std::size_t kTopsStride = 6;
inline constexpr std::size_t kTopsS = 0;
inline constexpr std::size_t kTopsF = 3;
}  // namespace layout

inline Vec3 load3(std::span<const double> y, std::size_t at) {
  return Vec3(y[at], y[at + 1], y[at + 2]);
}

inline void store3(std::span<double> y, std::size_t at, const Vec3& v) {
  y[at] = v.x();
  y[at + 1] = v.y();
  y[at + 2] = v.z();
}

struct EnsembleBlochState {
  std::vector<SpinTriple> atoms;
  double t = 0.0;

  std::size_t size() const { return atoms.size(); }
  std::vector<double> flat() const;
  static EnsembleBlochState from_flat(std::span<const double> y, double t = 0.0);
};

}  // namespace spinsync
