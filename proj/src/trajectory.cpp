#include "spinsync/trajectory.hpp"

namespace spinsync {

Vec3 Trajectory::vec(std::size_t sample, std::size_t atom, std::size_t offset) const {
  const auto& y = samples.at(sample);
  const std::size_t at = atom * stride + offset;
  return Vec3(y[at], y[at + 1], y[at + 2]);
}

Vec3 Trajectory::mean_vec(std::size_t sample, std::size_t offset) const {
  Vec3 acc = Vec3::Zero();
  for (std::size_t n = 0; n < atoms; ++n) {
    acc += vec(sample, n, offset);
  }
  return atoms ? Vec3(acc / static_cast<double>(atoms)) : acc;
}

std::vector<double> Trajectory::mean_series(std::size_t slot) const {
  std::vector<double> out(samples.size(), 0.0);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double acc = 0.0;
    for (std::size_t n = 0; n < atoms; ++n) {
      acc += samples[k][n * stride + slot];
    }
    out[k] = acc / static_cast<double>(atoms);
  }
  return out;
}

std::vector<double> Trajectory::atom_series(std::size_t atom, std::size_t slot) const {
  std::vector<double> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out[k] = samples[k][atom * stride + slot];
  }
  return out;
}

}  // namespace spinsync
