#include "spinsync/ode.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace spinsync {

namespace odeint = boost::numeric::odeint;

void IntegratorOptions::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw ValidationError("integrator: t_end must be positive");
  }
  if (!(sample_dt > 0.0) || sample_dt > t_end) {
    throw ValidationError("integrator: sample_dt must be in (0, t_end]");
  }
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw ValidationError("integrator: rtol and atol must be positive");
  }
}

std::size_t IntegratorOptions::sample_count() const {
  return static_cast<std::size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
}

namespace {

std::string failure_message(const char* reason, double t, double rtol) {
  std::ostringstream os;
  os << "integration failed at t = " << t << ": " << reason
     << " (problem may be too stiff for rtol = " << rtol << "; try a smaller rtol)";
  return os.str();
}

}  // namespace

SampledSolution integrate_sampled(const OdeSystem& f, OdeState y0, const IntegratorOptions& opts) {
  opts.validate();
  for (double v : y0) {
    if (!std::isfinite(v)) {
      throw ValidationError("integrator: initial state is not finite");
    }
  }

  const std::size_t count = opts.sample_count();
  const double min_step = opts.min_step > 0.0 ? opts.min_step : 1e-14 * opts.t_end;
  const double first_step = opts.initial_step > 0.0 ? opts.initial_step : 1e-3 * opts.sample_dt;

  auto stepper = odeint::make_dense_output(opts.atol, opts.rtol,
                                           odeint::runge_kutta_dopri5<OdeState>());
  auto system = [&f](const OdeState& y, OdeState& dydt, double t) { f(y, dydt, t); };

  SampledSolution out;
  out.times.reserve(count);
  out.values.reserve(count);
  out.times.push_back(0.0);
  out.values.push_back(y0);

  stepper.initialize(y0, 0.0, first_step);
  OdeState buffer(y0.size());
  std::size_t next = 1;
  while (next < count) {
    const double target = static_cast<double>(next) * opts.sample_dt;
    while (stepper.current_time() < target) {
      try {
        stepper.do_step(system);
      } catch (const odeint::step_adjustment_error&) {
        throw IntegrationError(failure_message("step size control failed", stepper.current_time(),
                                               opts.rtol),
                               stepper.current_time());
      }
      ++out.steps;
      if (stepper.current_time_step() < min_step) {
        throw IntegrationError(
            failure_message("step size underflow", stepper.current_time(), opts.rtol),
            stepper.current_time());
      }
      if (out.steps > opts.max_steps) {
        throw IntegrationError(
            failure_message("step budget exhausted", stepper.current_time(), opts.rtol),
            stepper.current_time());
      }
      for (double v : stepper.current_state()) {
        if (!std::isfinite(v)) {
          throw IntegrationError(
              failure_message("state became non-finite", stepper.current_time(), opts.rtol),
              stepper.current_time());
        }
      }
    }
    while (next < count && static_cast<double>(next) * opts.sample_dt <= stepper.current_time()) {
      const double t = static_cast<double>(next) * opts.sample_dt;
      stepper.calc_state(t, buffer);
      out.times.push_back(t);
      out.values.push_back(buffer);
      ++next;
    }
  }
  return out;
}

}  // namespace spinsync
