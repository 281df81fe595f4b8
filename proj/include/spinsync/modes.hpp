#pragma once

// Damped complex-exponential fits of uniformly sampled series, and an
// ensemble synchronization metric.
//
// extract_modes models y_k = sum_j a_j z_j^k with z_j = exp(lambda_j dt)
// (ESPRIT on the left singular subspace of a Hankel matrix). A constant
// offset shows up as a lambda = 0 mode, so no mean is subtracted.

#include <cstddef>
#include <span>
#include <vector>

#include "spinsync/common.hpp"
#include "spinsync/trajectory.hpp"

namespace spinsync {

struct ModeEstimate {
  Complex lambda;
  Complex amplitude;
  double residual = 0.0;  // ||model - data|| / ||data|| for the whole fit
};

struct ModeOptions {
  std::size_t max_order = 8;
  /// Singular values below sv_ratio * sigma_max are treated as noise.
  double sv_ratio = 1e-8;
  /// Upper bound on the pencil parameter (columns of the Hankel matrix).
  std::size_t max_pencil = 256;
  /// Longer series are decimated (every q-th sample) down to at most this many
  /// points so the pencil spans a useful fraction of the record. The dominant
  /// mode's sampling check uses the decimated spacing.
  std::size_t max_samples = 2048;
};

/// Modes sorted by decreasing |amplitude|. Requires at least 4 * max_order
/// samples. An all-zero series yields a single lambda = 0 mode of amplitude 0.
std::vector<ModeEstimate> extract_modes(std::span<const double> series, double dt,
                                        const ModeOptions& opts = {});
std::vector<ModeEstimate> extract_modes(std::span<const Complex> series, double dt,
                                        const ModeOptions& opts = {});

struct DominantMode {
  double rate = 0.0;       // R = -Re lambda
  double frequency = 0.0;  // Omega = |Im lambda|
  ModeEstimate mode;
};

/// The non-constant mode carrying the most signal energy over the window.
/// Modes with |lambda| T < 0.01 (T the window length) count as the offset.
/// Throws ValidationError when that mode is undersampled
/// (|Omega| dt > 0.2 pi, i.e. fewer than ten samples per period) or when
/// the series holds nothing but an offset.
DominantMode dominant_mode(std::span<const double> series, double dt,
                           const ModeOptions& opts = {});

/// Index of the first sample with t >= t_start (times assumed increasing).
std::size_t first_index_at(std::span<const double> times, double t_start);

struct SyncMetric {
  double t = 0.0;
  double spread = 0.0;
};

/// Per sample: mean_n |S_n - S_bar| / max(|S_bar|, 1e-6), using the vector
/// stored at `offset` within each atom's block.
std::vector<SyncMetric> sync_spread(const Trajectory& traj, std::size_t offset = 0);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spinsync
