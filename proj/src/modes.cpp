#include "spinsync/modes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace spinsync {

namespace {

using CVector = Eigen::VectorXcd;

constexpr double kSyncFloor = 1e-6;
constexpr double kOffsetPhase = 1e-2;

std::size_t decimation(std::size_t m, const ModeOptions& opts) {
  if (opts.max_samples == 0 || m <= opts.max_samples) return 1;
  return (m + opts.max_samples - 1) / opts.max_samples;
}

std::vector<ModeEstimate> fit(const CVector& full, double dt, const ModeOptions& opts) {
  const std::size_t q = decimation(static_cast<std::size_t>(full.size()), opts);
  const CVector y = q == 1 ? full
                           : CVector(Eigen::Map<const CVector, 0, Eigen::InnerStride<>>(
                                 full.data(), (full.size() + static_cast<Eigen::Index>(q) - 1) /
                                                  static_cast<Eigen::Index>(q),
                                 Eigen::InnerStride<>(static_cast<Eigen::Index>(q))));
  dt *= static_cast<double>(q);
  const auto m = static_cast<std::size_t>(y.size());
  if (opts.max_order == 0) {
    throw ValidationError("extract_modes: max_order must be positive");
  }
  if (m < 4 * opts.max_order || m < 4) {
    throw ValidationError("extract_modes: need at least 4 * max_order samples");
  }
  if (!(dt > 0.0)) {
    throw ValidationError("extract_modes: sample spacing must be positive");
  }
  if (!y.allFinite()) {
    throw ValidationError("extract_modes: series contains non-finite values");
  }
  const double norm = y.norm();
  if (norm == 0.0) {
    return {ModeEstimate{Complex(0.0), Complex(0.0), 0.0}};
  }

  std::size_t pencil = std::clamp<std::size_t>(m / 3, opts.max_order + 1, opts.max_pencil);
  pencil = std::min(pencil, m - 2);
  const std::size_t rows = m - pencil;
  CMatrix hankel(rows, pencil + 1);
  for (std::size_t j = 0; j <= pencil; ++j) {
    hankel.col(static_cast<Eigen::Index>(j)) = y.segment(static_cast<Eigen::Index>(j),
                                                         static_cast<Eigen::Index>(rows));
  }

  Eigen::BDCSVD<CMatrix> svd(hankel, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  Eigen::Index order = 0;
  while (order < sigma.size() && sigma[order] > opts.sv_ratio * sigma[0]) {
    ++order;
  }
  order = std::clamp<Eigen::Index>(order, 1, static_cast<Eigen::Index>(opts.max_order));

  const CMatrix u = svd.matrixU().leftCols(order);
  const auto r = static_cast<Eigen::Index>(rows);
  const CMatrix u1 = u.topRows(r - 1);
  const CMatrix u2 = u.bottomRows(r - 1);
  const CMatrix shift = u1.completeOrthogonalDecomposition().solve(u2);
  const CVector z = Eigen::ComplexEigenSolver<CMatrix>(shift, false).eigenvalues();

  // Vandermonde least squares for amplitudes; powers built by repeated
  // multiplication keep growing modes finite over practical windows.
  CMatrix vander(static_cast<Eigen::Index>(m), order);
  for (Eigen::Index k = 0; k < order; ++k) {
    Complex p(1.0);
    for (std::size_t i = 0; i < m; ++i) {
      vander(static_cast<Eigen::Index>(i), k) = p;
      p *= z[k];
    }
  }
  const CVector amps = vander.colPivHouseholderQr().solve(y);
  const double residual = (vander * amps - y).norm() / norm;

  std::vector<ModeEstimate> modes;
  modes.reserve(static_cast<std::size_t>(order));
  for (Eigen::Index k = 0; k < order; ++k) {
    modes.push_back({std::log(z[k]) / dt, amps[k], residual});
  }
  std::stable_sort(modes.begin(), modes.end(), [](const ModeEstimate& a, const ModeEstimate& b) {
    return std::abs(a.amplitude) > std::abs(b.amplitude);
  });
  return modes;
}

double window_energy(const ModeEstimate& m, double duration) {
  const double re = m.lambda.real();
  const double a2 = std::norm(m.amplitude);
  if (std::abs(re) * duration < 1e-12) {
    return a2 * duration;
  }
  return a2 * std::expm1(2.0 * re * duration) / (2.0 * re);
}

}  // namespace

std::vector<ModeEstimate> extract_modes(std::span<const double> series, double dt,
                                        const ModeOptions& opts) {
  CVector y(static_cast<Eigen::Index>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = series[i];
  }
  return fit(y, dt, opts);
}

std::vector<ModeEstimate> extract_modes(std::span<const Complex> series, double dt,
                                        const ModeOptions& opts) {
  CVector y(static_cast<Eigen::Index>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = series[i];
  }
  return fit(y, dt, opts);
}

DominantMode dominant_mode(std::span<const double> series, double dt, const ModeOptions& opts) {
  const std::vector<ModeEstimate> modes = extract_modes(series, dt, opts);
  const double duration = dt * static_cast<double>(series.size() - 1);
  const double fit_dt = dt * static_cast<double>(decimation(series.size(), opts));

  const ModeEstimate* best = nullptr;
  double best_energy = -1.0;
  for (const auto& m : modes) {
    if (std::abs(m.lambda) * duration < kOffsetPhase) {
      continue;  // indistinguishable from a constant over the window
    }
    const double e = window_energy(m, duration);
    if (e > best_energy) {
      best_energy = e;
      best = &m;
    }
  }
  if (best == nullptr) {
    throw ValidationError("dominant_mode: series contains only a constant offset");
  }
  const double freq = std::abs(best->lambda.imag());
  if (freq * fit_dt > 0.2 * kPi) {
    throw ValidationError("dominant_mode: sample_dt too coarse for the dominant frequency");
  }
  return {-best->lambda.real(), freq, *best};
}

std::size_t first_index_at(std::span<const double> times, double t_start) {
  const auto it = std::lower_bound(times.begin(), times.end(), t_start - 1e-12);
  return static_cast<std::size_t>(it - times.begin());
}

std::vector<SyncMetric> sync_spread(const Trajectory& traj, std::size_t offset) {
  std::vector<SyncMetric> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vec3 mean = traj.mean_vec(k, offset);
    double sum = 0.0;
    for (std::size_t n = 0; n < traj.atoms; ++n) {
      sum += (traj.vec(k, n, offset) - mean).norm();
    }
    const double avg = traj.atoms ? sum / static_cast<double>(traj.atoms) : 0.0;
    out.push_back({traj.times[k], avg / std::max(mean.norm(), kSyncFloor)});
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("loglog_slope: need at least two matching points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ValidationError("loglog_slope: values must be positive");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw ValidationError("loglog_slope: x values are all equal");
  }
  return (n * sxy - sx * sy) / denom;
}

}  // namespace spinsync
