#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spinsync {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CMatrix = Eigen::MatrixXcd;

/// Bad input: a configuration or argument that violates a precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was set up correctly but could not be completed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive integration gave up; carries the simulation time of the failure.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double t)
      : NumericalError(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace spinsync
