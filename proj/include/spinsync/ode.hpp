#pragma once

// Adaptive Dormand-Prince 5(4) integration sampled on a uniform time grid.

#include <cstddef>
#include <functional>
#include <vector>

#include "spinsync/common.hpp"

namespace spinsync {

struct IntegratorOptions {
  double t_end = 1.0;
  double sample_dt = 0.1;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// 0 picks a small fraction of sample_dt.
  double initial_step = 0.0;
  /// Steps below this size are treated as a stiffness failure. 0 means 1e-14 * t_end.
  double min_step = 0.0;
  std::size_t max_steps = 100'000'000;

  void validate() const;
  /// Sample times k * sample_dt for k = 0 .. floor(t_end / sample_dt).
  std::size_t sample_count() const;
};

using OdeState = std::vector<double>;
using OdeSystem = std::function<void(const OdeState& y, OdeState& dydt, double t)>;

struct SampledSolution {
  std::vector<double> times;
  std::vector<OdeState> values;
  std::size_t steps = 0;
};

/// Integrates y' = f(y, t) from t = 0 and evaluates the dense-output
/// interpolant at every sample time. Throws IntegrationError (carrying the
/// time reached) on step-size underflow, a non-finite state, or max_steps.
SampledSolution integrate_sampled(const OdeSystem& f, OdeState y0, const IntegratorOptions& opts);

}  // namespace spinsync
