#include "semihyp/schedule.hpp"
#include "semihyp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace semihyp;

namespace {

// Fine fixed-step RK4 on phi' = A(t) phi over [0, 1].
Mat rk4_flow(const MatrixFunction& A, Eigen::Index dim, int steps) {
  Mat phi = Mat::Identity(dim, dim);
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    Mat k1 = A(t) * phi;
    Mat k2 = A(t + dt / 2) * (phi + dt / 2 * k1);
    Mat k3 = A(t + dt / 2) * (phi + dt / 2 * k2);
    Mat k4 = A(t + dt) * (phi + dt * k3);
    phi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return phi;
}

Mat diag2(double a, double b) {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

}  // namespace

TEST_CASE("ramps") {
  const DeformationSchedule s;
  for (const Ramp& r : {s.psi1, s.chi, s.psi2, s.psi}) {
    CHECK(r(0.0) == 0.0);
    CHECK(r(1.0) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      CHECK(r(t) >= prev);
      CHECK(r.derivative(t) >= 0.0);
      if (t < r.start || t > r.end) CHECK(r.derivative(t) == 0.0);
      prev = r(t);
    }
  }
  // derivative against central differences
  const Ramp r{0.25, 0.5};
  for (double t : {0.3, 0.375, 0.45}) {
    const double fd = (r(t + 1e-6) - r(t - 1e-6)) / 2e-6;
    CHECK(r.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(bump_base(0.0) == 0.0);
  CHECK(bump_base(-1.0) == 0.0);
}

TEST_CASE("reparametrized flow") {
  SUBCASE("zero generator") {
    auto f = reparametrize_flow([](double) { return Mat::Zero(2, 2).eval(); }, 2);
    CHECK((f.psi_end - Mat::Identity(2, 2)).norm() <= 1e-14);
  }
  SUBCASE("constant diagonal") {
    auto f = reparametrize_flow([](double) { return diag2(1.0, -1.0); }, 2);
    CHECK((f.psi_end - diag2(std::exp(1.0), std::exp(-1.0))).norm() <= 1e-10);
  }
  SUBCASE("t times rotation generator") {
    MatrixFunction A = [](double t) {
      Mat R(2, 2);
      R << 0.0, -t, t, 0.0;
      return R;
    };
    auto f = reparametrize_flow(A, 2);
    const Mat phi = rk4_flow(A, 2, 4000);
    CHECK((f.psi_end - phi).norm() <= 1e-8);
    for (double t : {0.0, 0.2, 0.33, 0.7, 1.0})
      if (t <= 1.0 / 3.0 || t >= 2.0 / 3.0) CHECK(reparametrized_generator(A, Ramp{1.0 / 3.0, 2.0 / 3.0}, t).norm() == 0.0);
  }
  SUBCASE("non-commuting random generators") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 3; ++i) {
      const Mat A0 = random_hamiltonian(2, rng);
      const Mat A1 = random_hamiltonian(2, rng);
      MatrixFunction A = [A0, A1](double t) { return Mat(A0 + std::sin(3 * t) * A1); };
      auto f = reparametrize_flow(A, 4);
      CHECK((f.psi_end - rk4_flow(A, 4, 4000)).norm() <= 1e-8 * f.psi_end.norm());
      CHECK(f.accepted_steps > 0);
    }
  }
}

TEST_CASE("composite deformation") {
  SUBCASE("endpoints and the E plateau") {
    auto c = classify_spectrum(SymplecticMatrix(diag2(-2.0, -0.5)));
    const DeformationSchedule s;
    CHECK((composite_deformation(c, s, 0.0).matrix() - Mat::Identity(2, 2)).norm() <= 1e-14);
    CHECK((composite_deformation(c, s, 1.0).matrix() - diag2(-2.0, -0.5)).norm() <= 1e-8);
    for (double t : {0.26, 0.375, 0.49})
      CHECK((composite_deformation(c, s, t).matrix() + Mat::Identity(2, 2)).norm() <= 1e-12);
    try {
      composite_deformation(c, s, 1.5);
      FAIL("t outside [0, 1] accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidInput);
    }
  }
  SUBCASE("random maps") {
    std::mt19937_64 rng(17);
    const DeformationSchedule s;
    int done = 0;
    for (int i = 0; i < 20; ++i) {
      const Mat K = random_symplectic(2, rng);
      SpectralClassification c;
      try {
        c = classify_spectrum(SymplecticMatrix(K, 1e-8));
      } catch (const Error&) {
        continue;
      }
      ++done;
      CHECK((composite_deformation(c, s, 1.0).matrix() - K).norm() <= 1e-8 * K.norm());
      for (int j = 0; j <= 20; ++j) {
        const Mat k = composite_deformation(c, s, j / 20.0).matrix();
        CHECK(symplectic_defect(k) <= 1e-8 * std::max(1.0, k.squaredNorm()));
      }
    }
    CHECK(done > 10);
  }
}
