#pragma once

#include <cstddef>
#include <vector>

#include "spinsync/common.hpp"

namespace spinsync {

/// Uniformly sampled per-atom vector observables. Each sample stores
/// `atoms * stride` doubles in the flat layout of the producing engine.
struct Trajectory {
  std::size_t atoms = 0;
  std::size_t stride = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> samples;

  std::size_t size() const { return times.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }

  Vec3 vec(std::size_t sample, std::size_t atom, std::size_t offset) const;
  Vec3 mean_vec(std::size_t sample, std::size_t offset) const;
  /// Ensemble mean of one scalar slot (offset + component) across samples.
  std::vector<double> mean_series(std::size_t slot) const;
  std::vector<double> atom_series(std::size_t atom, std::size_t slot) const;
};

}  // namespace spinsync
