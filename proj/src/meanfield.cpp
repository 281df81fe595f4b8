#include "spinsync/meanfield.hpp"

#include <cmath>

namespace spinsync {

namespace {

constexpr Complex kI{0.0, 1.0};

// Constant term c of lambda^2 + Gamma lambda + c for families 0, +, -.
std::array<Complex, 3> family_constants(const MeanFieldParams& p) {
  const double w2 = p.omega * p.omega;
  const double cross = p.omega * p.gamma * p.f_mag;
  return {Complex(w2, 0.0), Complex(w2, -cross), Complex(w2, cross)};
}

std::array<Complex, 2> roots(double gamma, Complex c) {
  Complex disc = gamma * gamma - 4.0 * c;
  // real - complex can leave a -0.0 imaginary part, which flips the branch.
  if (disc.imag() == 0.0) disc.imag(0.0);
  const Complex root = std::sqrt(disc);
  const Complex fast = 0.5 * (-gamma - root);
  // lambda_1 = c / lambda_2 avoids cancellation in (-Gamma + root)/2.
  const Complex slow = std::abs(fast) > 0.0 ? c / fast : 0.5 * (-gamma + root);
  return {slow, fast};
}

// (e^z - 1)/z, stable near z = 0.
Complex expm1_over(Complex z) {
  if (std::abs(z) < 1e-4) {
    return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  }
  return (std::exp(z) - 1.0) / z;
}

struct ScalarMode {
  std::array<Complex, 2> amps;
  bool confluent = false;
};

ScalarMode fit_initial(const std::array<Complex, 2>& lam, Complex x0, Complex v0) {
  const Complex delta = lam[1] - lam[0];
  const double scale = std::max({std::abs(lam[0]), std::abs(lam[1]), 1e-300});
  ScalarMode m;
  if (std::abs(delta) <= 1e-12 * scale) {
    m.confluent = true;
    m.amps = {x0, v0 - lam[0] * x0};
  } else {
    const Complex a2 = (v0 - lam[0] * x0) / delta;
    m.amps = {x0 - a2, a2};
  }
  return m;
}

// x(t) = x0 e^{l1 t} + (v0 - l1 x0) t e^{l1 t} E((l2 - l1) t), valid for
// distinct and coincident roots alike.
Complex evolve(const std::array<Complex, 2>& lam, Complex x0, Complex v0, double t) {
  const Complex e1 = std::exp(lam[0] * t);
  return x0 * e1 + (v0 - lam[0] * x0) * t * e1 * expm1_over((lam[1] - lam[0]) * t);
}

}  // namespace

void MeanFieldParams::validate() const {
  if (!(omega >= 0.0) || !(gamma >= 0.0) || !std::isfinite(omega) || !std::isfinite(gamma)) {
    throw ValidationError("MeanFieldParams: omega and gamma must be finite and >= 0");
  }
  if (!(f_mag >= 0.0) || f_mag > 1.0 + 1e-12) {
    throw ValidationError("MeanFieldParams: |F| must lie in [0, 1]");
  }
}

MeanFieldParams MeanFieldParams::from_total_spin(double omega, double gamma, const Vec3& f) {
  MeanFieldParams p;
  p.omega = omega;
  p.gamma = gamma;
  p.f_mag = f.norm();
  p.f_dir = p.f_mag > 0.0 ? Vec3(f / p.f_mag) : Vec3(Vec3::UnitZ());
  return p;
}

EigenvalueSet exact_eigenvalues(const MeanFieldParams& p) {
  p.validate();
  const auto c = family_constants(p);
  // The minus family is the conjugate of the plus family; conjugating keeps the
  // labels paired when |F| = 0 makes the two families coincide.
  const auto plus = roots(p.gamma, c[1]);
  return EigenvalueSet{roots(p.gamma, c[0]), plus, {std::conj(plus[0]), std::conj(plus[1])}};
}

EigenvalueSet low_density_asymptote(const MeanFieldParams& p) {
  p.validate();
  const Complex iw = kI * p.omega;
  const double g = p.gamma;
  const double f = p.f_mag;
  EigenvalueSet s;
  s.zero = {iw - 0.5 * g, -iw - 0.5 * g};
  s.plus = {iw - 0.5 * (1.0 - f) * g, -iw - 0.5 * (1.0 + f) * g};
  s.minus = {-iw - 0.5 * (1.0 - f) * g, iw - 0.5 * (1.0 + f) * g};
  return s;
}

EigenvalueSet high_density_asymptote(const MeanFieldParams& p) {
  p.validate();
  if (!(p.gamma > 0.0)) {
    throw ValidationError("high_density_asymptote: needs gamma > 0");
  }
  const double g = p.gamma;
  const double narrowed = p.omega * p.omega / g;
  const Complex iwf = kI * p.omega * p.f_mag;
  EigenvalueSet s;
  s.zero = {Complex(-narrowed, 0.0), Complex(-g, 0.0)};
  s.plus = {iwf - (1.0 - p.f_mag * p.f_mag) * narrowed, -iwf - g};
  s.minus = {-iwf - (1.0 - p.f_mag * p.f_mag) * narrowed, iwf - g};
  return s;
}

double characteristic_residual(const MeanFieldParams& p, const EigenvalueSet& set) {
  const auto c = family_constants(p);
  const std::array<const std::array<Complex, 2>*, 3> fams{&set.zero, &set.plus, &set.minus};
  double worst = 0.0;
  for (int q = 0; q < 3; ++q) {
    for (const Complex& l : *fams[q]) {
      worst = std::max(worst, std::abs(l * l + p.gamma * l + c[q]));
    }
  }
  return worst;
}

Eigen::Matrix3d aligned_frame(const Vec3& dir) {
  const double norm = dir.norm();
  if (norm == 0.0) {
    return Eigen::Matrix3d::Identity();
  }
  const Vec3 e3 = dir / norm;
  const Vec3 helper = std::abs(e3.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(e3) * e3).normalized();
  const Vec3 e2 = e3.cross(e1);
  Eigen::Matrix3d r;
  r.row(0) = e1.transpose();
  r.row(1) = e2.transpose();
  r.row(2) = e3.transpose();
  return r;
}

ModeSet meanfield_modes(const Vec3& s0, const Vec3& a0, const MeanFieldParams& p) {
  ModeSet modes;
  modes.lambdas = exact_eigenvalues(p);
  modes.frame = aligned_frame(p.f_mag > 0.0 ? p.f_dir : Vec3::Zero());
  modes.offset = 0.5 * p.f_mag * p.f_dir;

  const Vec3 s = modes.frame * s0;
  const Vec3 v = p.omega * (modes.frame * a0);
  const double root2 = std::sqrt(2.0);

  const ScalarMode zero = fit_initial(modes.lambdas.zero, s.z() - 0.5 * p.f_mag, v.z());
  const ScalarMode plus = fit_initial(modes.lambdas.plus, Complex(s.x(), s.y()) / root2,
                                      Complex(v.x(), v.y()) / root2);
  const ScalarMode minus = fit_initial(modes.lambdas.minus, Complex(s.x(), -s.y()) / root2,
                                       Complex(v.x(), -v.y()) / root2);
  modes.amps = EigenvalueSet{zero.amps, plus.amps, minus.amps};
  modes.confluent = {zero.confluent, plus.confluent, minus.confluent};
  return modes;
}

std::vector<Vec3> meanfield_solution(const Vec3& s0, const Vec3& a0, const MeanFieldParams& p,
                                     std::span<const double> t_grid) {
  if (s0.norm() > 0.5 + 1e-12) {
    throw ValidationError("meanfield_solution: |S0| must not exceed 1/2");
  }
  const EigenvalueSet lam = exact_eigenvalues(p);
  const Eigen::Matrix3d frame = aligned_frame(p.f_mag > 0.0 ? p.f_dir : Vec3::Zero());
  const Vec3 s = frame * s0;
  const Vec3 v = p.omega * (frame * a0);

  const Complex z0 = s.z() - 0.5 * p.f_mag;
  const Complex zv = v.z();
  const Complex u0(s.x(), s.y());  // S_x + i S_y carries the + family
  const Complex uv(v.x(), v.y());

  std::vector<Vec3> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Complex z = evolve(lam.zero, z0, zv, t);
    const Complex u = evolve(lam.plus, u0, uv, t);
    const Vec3 local(u.real(), u.imag(), 0.5 * p.f_mag + z.real());
    out.push_back(frame.transpose() * local);
  }
  return out;
}

}  // namespace spinsync
