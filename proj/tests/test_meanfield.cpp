#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "spinsync/meanfield.hpp"

using namespace spinsync;

namespace {

// y(t) = y* + V exp(L t) V^-1 (y0 - y*) for the 6x6 linear system.
std::vector<Vec3> linear_oracle(const Vec3& s0, const Vec3& a0, double w, double g, const Vec3& f,
                                const std::vector<double>& times) {
  const auto m = oracle::meanfield_matrix(w, g, f);
  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(m);
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::VectorXcd d0(6);
  for (int k = 0; k < 3; ++k) {
    d0[k] = s0[k] - 0.5 * f[k];
    d0[k + 3] = a0[k];
  }
  const Eigen::VectorXcd c = v.partialPivLu().solve(d0);
  std::vector<Vec3> out;
  for (double t : times) {
    Eigen::VectorXcd e(6);
    for (int k = 0; k < 6; ++k) e[k] = c[k] * std::exp(lam[k] * t);
    const Eigen::VectorXcd y = v * e;
    out.emplace_back(y[0].real() + 0.5 * f[0], y[1].real() + 0.5 * f[1], y[2].real() + 0.5 * f[2]);
  }
  return out;
}

}  // namespace

TEST_CASE("exact eigenvalues agree with the 6x6 linear system") {
  for (double g : {0.0, 0.01, 0.7, 1.0, 2.0, 30.0, 100.0}) {
    for (double f : {0.0, 0.25, 0.5, 1.0}) {
      CAPTURE(g);
      CAPTURE(f);
      const MeanFieldParams p{1.0, g, f};
      const auto ours = exact_eigenvalues(p).flat();
      const auto ref = oracle::meanfield_eigenvalues(1.0, g, f);
      for (const auto& z : ours) CHECK(oracle::nearest(ref, z) < 1e-6 * std::max(1.0, g));
      for (const auto& z : ref) {
        CHECK(oracle::nearest({ours.begin(), ours.end()}, z) < 1e-6 * std::max(1.0, g));
      }
      CHECK(characteristic_residual(p, exact_eigenvalues(p)) < 1e-10 * std::max(1.0, g * g));
    }
  }
}

TEST_CASE("lambda_1 is the slow root of each family") {
  const auto e = exact_eigenvalues({1.0, 100.0, 0.5});
  CHECK(e.zero[0].real() > e.zero[1].real());
  CHECK(e.plus[0].real() > e.plus[1].real());
  CHECK(e.minus[0].real() > e.minus[1].real());
  // lambda_1^+ = i w |F| - (1 - |F|^2) w^2/G to leading order.
  CHECK(e.plus[0].imag() == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(-e.plus[0].real() == doctest::Approx(0.75 / 100.0).epsilon(2e-2));
  CHECK(std::conj(e.plus[0]) == e.minus[0]);
}

TEST_CASE("no collisions: pure hyperfine oscillation") {
  const auto e = exact_eigenvalues({2.0, 0.0, 0.5});
  for (const auto& z : e.flat()) {
    CHECK(z.real() == doctest::Approx(0.0));
    CHECK(std::abs(z.imag()) == doctest::Approx(2.0));
  }
}

TEST_CASE("asymptotes approach the exact values at their limits") {
  for (double f : {0.0, 0.25, 0.5, 1.0}) {
    CAPTURE(f);
    const MeanFieldParams lo{1.0, 1e-4, f};
    const auto ex = exact_eigenvalues(lo).flat();
    const auto as = low_density_asymptote(lo).flat();
    for (int k = 0; k < 6; ++k) CHECK(std::abs(ex[k] - as[k]) < 1e-6);

    const MeanFieldParams hi{1.0, 1e4, f};
    const auto ex2 = exact_eigenvalues(hi).flat();
    const auto as2 = high_density_asymptote(hi).flat();
    for (int k = 0; k < 6; ++k) CHECK(std::abs(ex2[k] - as2[k]) < 1e-3 * std::abs(ex2[k]) + 1e-7);
  }
  CHECK_THROWS_AS(high_density_asymptote({1.0, 0.0, 0.5}), ValidationError);
}

TEST_CASE("closed-form solution matches the linear-system oracle") {
  const Vec3 s0(0.1, -0.05, -0.2);
  const Vec3 a0(0.02, 0.07, -0.01);
  const Vec3 f(0.1, 0.15, -0.35);
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(0.1 * k);
  for (double g : {0.05, 1.0, 25.0}) {
    CAPTURE(g);
    const auto p = MeanFieldParams::from_total_spin(1.0, g, f);
    const auto ours = meanfield_solution(s0, a0, p, times);
    const auto ref = linear_oracle(s0, a0, 1.0, g, f, times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK((ours[k] - ref[k]).norm() < 1e-9);
  }
}

TEST_CASE("confluent roots are handled continuously") {
  // F = 0, G = 2w makes the lambda^0 roots coincide at -w.
  const Vec3 s0(0.1, 0.0, 0.2);
  const Vec3 a0(0.0, 0.05, 0.0);
  std::vector<double> times = {0.0, 0.5, 1.0, 3.0};
  const auto at = meanfield_solution(s0, a0, {1.0, 2.0, 0.0}, times);
  const auto near = meanfield_solution(s0, a0, {1.0, 2.0 + 1e-7, 0.0}, times);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK((at[k] - near[k]).norm() < 1e-6);
  CHECK((at[0] - s0).norm() < 1e-15);
  const ModeSet modes = meanfield_modes(s0, a0, {1.0, 2.0, 0.0});
  CHECK(modes.confluent[0]);
}

TEST_CASE("mode amplitudes reproduce the initial data") {
  const Vec3 s0(0.2, 0.1, -0.1);
  const Vec3 a0(0.0, -0.05, 0.03);
  const auto p = MeanFieldParams::from_total_spin(1.0, 3.0, Vec3(0, 0, -0.4));
  const ModeSet m = meanfield_modes(s0, a0, p);
  CHECK((m.offset - Vec3(0, 0, -0.2)).norm() < 1e-15);
  // S_0 component along F: a1 + a2 + |F|/2 ... checked through the solution at t = 0.
  const auto s = meanfield_solution(s0, a0, p, std::vector<double>{0.0});
  CHECK((s[0] - s0).norm() < 1e-14);
}

TEST_CASE("invalid mean-field inputs") {
  CHECK_THROWS_AS(MeanFieldParams({1.0, 1.0, 1.5}).validate(), ValidationError);
  CHECK_THROWS_AS(MeanFieldParams({1.0, -1.0, 0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(meanfield_solution(Vec3(0.6, 0, 0), Vec3::Zero(), {1.0, 1.0, 0.5},
                                     std::vector<double>{0.0}),
                  ValidationError);
}

TEST_CASE("aligned frame") {
  const Eigen::Matrix3d r = aligned_frame(Vec3(1, 2, -2));
  CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK((r.row(2).transpose() - Vec3(1, 2, -2) / 3.0).norm() < 1e-14);
  CHECK(r.determinant() == doctest::Approx(1.0));
  CHECK((aligned_frame(Vec3::Zero()) - Eigen::Matrix3d::Identity()).norm() == 0.0);
}
