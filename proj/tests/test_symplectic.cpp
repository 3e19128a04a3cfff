#include "semihyp/symplectic.hpp"
#include "semihyp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace semihyp;

namespace {

// Oracle: P = (K^T K)^{1/2} via SVD, Q = K P^{-1}.
std::pair<Mat, Mat> svd_polar(const Mat& K) {
  Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat P = svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().transpose();
  Mat Q = svd.matrixU() * svd.matrixV().transpose();
  return {Q, P};
}

Mat rotation(double a) {
  Mat R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

Mat diag2(double a, double b) {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

}  // namespace

TEST_CASE("J convention") {
  Mat J = standard_form(4);
  CHECK(J(0, 2) == -1.0);
  CHECK(J(2, 0) == 1.0);
  CHECK((J * J + Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("non-symplectic input is rejected with its defect") {
  Mat A = diag2(2.0, 2.0);
  try {
    SymplecticMatrix bad(A);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotSymplectic);
    CHECK(std::string(e.what()).find("defect") != std::string::npos);
  }
}

TEST_CASE("polar decomposition") {
  SUBCASE("identity") {
    auto f = polar_decompose(SymplecticMatrix::identity(2));
    CHECK((f.Q.matrix() - Mat::Identity(2, 2)).norm() <= 1e-14);
    CHECK((f.P.matrix() - Mat::Identity(2, 2)).norm() <= 1e-14);
  }
  SUBCASE("already positive") {
    Mat K = diag2(std::exp(1.0), std::exp(-1.0));
    auto f = polar_decompose(SymplecticMatrix(K));
    CHECK((f.Q.matrix() - Mat::Identity(2, 2)).norm() <= 1e-12);
    CHECK((f.P.matrix() - K).norm() <= 1e-12);
  }
  SUBCASE("random 4x4 against the SVD oracle") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
      Mat K = random_symplectic(2, rng);
      auto f = polar_decompose(SymplecticMatrix(K));
      auto [Q, P] = svd_polar(K);
      CHECK((f.Q.matrix() * f.P.matrix() - K).norm() <= 1e-10 * std::max(1.0, K.norm()));
      CHECK((f.P.matrix() - P).norm() <= 1e-8 * P.norm());
      CHECK((f.Q.matrix() - Q).norm() <= 1e-8);
      CHECK((f.Q.matrix().transpose() * f.Q.matrix() - Mat::Identity(4, 4)).norm() <= 1e-10);
      CHECK(symplectic_defect(f.Q.matrix()) <= 1e-9);
      Eigen::SelfAdjointEigenSolver<Mat> es(f.P.matrix());
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("symplectic logarithm") {
  SUBCASE("identity") {
    auto l = symplectic_log(SymplecticMatrix::identity(4));
    CHECK(l.B.norm() <= 1e-14);
  }
  SUBCASE("model map") {
    auto l = symplectic_log(SymplecticMatrix(diag2(std::exp(1.0), std::exp(-1.0))));
    CHECK((l.B - diag2(1.0, -1.0)).norm() <= 1e-14);
    REQUIRE(l.logs.size() == 1);
    CHECK(l.inverse_logs[0] == -l.logs[0]);
  }
  SUBCASE("random 6x6 positive part") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      Mat K = random_symplectic(3, rng);
      const Mat A = polar_decompose(SymplecticMatrix(K)).P.matrix();
      auto l = symplectic_log(SymplecticMatrix(A, 1e-8));
      CHECK((expm(l.B) - A).norm() <= 1e-8 * A.norm());
      CHECK(hamiltonian_defect(l.B) <= 1e-8);
      for (std::size_t j = 0; j < l.logs.size(); ++j) CHECK(l.inverse_logs[j] == -l.logs[j]);
    }
  }
}

TEST_CASE("classification examples") {
  SUBCASE("model hyperbolic map") {
    auto c = classify_spectrum(SymplecticMatrix(diag2(std::exp(1.0), std::exp(-1.0))));
    CHECK(c.n_hr_plus == 1);
    CHECK(c.n_hc + c.n_hr_minus + c.n_e == 0);
    CHECK(c.F.norm() == 0.0);
    CHECK(c.blocks[0].lambda.real() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("rotation by one radian") {
    auto c = classify_spectrum(SymplecticMatrix(rotation(1.0)));
    CHECK(c.n_e == 1);
    CHECK(c.B.norm() <= 1e-14);
    CHECK(std::abs(c.blocks[0].lambda.imag()) == doctest::Approx(1.0));
    CHECK(c.F(0, 0) == doctest::Approx(c.F(1, 1)));
    CHECK(std::abs(c.F(0, 0)) == doctest::Approx(1.0));
    CHECK(c.reconstruction_error <= 1e-12);
  }
  SUBCASE("negative real pair") {
    auto c = classify_spectrum(SymplecticMatrix(diag2(-2.0, -0.5)));
    CHECK(c.n_hr_minus == 1);
    CHECK(c.blocks[0].lambda.real() == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK((c.F - std::numbers::pi * Mat::Identity(2, 2)).norm() <= 1e-14);
    CHECK(c.reconstruction_error <= 1e-12);
  }
  SUBCASE("unit eigenvalues are refused") {
    try {
      classify_spectrum(SymplecticMatrix::identity(2));
      FAIL("identity classified");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ClassificationAmbiguous);
    }
  }
  SUBCASE("ambiguous band") {
    const double mu = 1.0 + 3e-6;
    try {
      classify_spectrum(SymplecticMatrix(diag2(mu, 1.0 / mu)));
      FAIL("band eigenvalue classified");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ClassificationAmbiguous);
    }
  }
  SUBCASE("repeated elliptic eigenvalue") {
    Mat R = Mat::Zero(4, 4);
    R(0, 0) = R(1, 1) = R(2, 2) = R(3, 3) = std::cos(1.0);
    R(0, 2) = R(1, 3) = -std::sin(1.0);
    R(2, 0) = R(3, 1) = std::sin(1.0);
    try {
      classify_spectrum(SymplecticMatrix(R));
      FAIL("repeated elliptic classified");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Unsupported);
    }
  }
  SUBCASE("complex quadruple and Jordan block") {
    Mat C(2, 2);
    C << 1.0, 1.0, -1.0, 1.0;  // eigenvalues 1 +- i
    Mat S = Mat::Zero(4, 4);
    S.block(0, 2, 2, 2) = C.transpose();
    S.block(2, 0, 2, 2) = C;
    auto c = classify_spectrum(SymplecticMatrix(expm(hamiltonian_matrix(S))));
    CHECK(c.n_hc == 1);
    CHECK(c.reconstruction_error <= 1e-10);

    Mat Cj(2, 2);
    Cj << 0.5, 0.0, 1.0, 0.5;
    S.setZero();
    S.block(0, 2, 2, 2) = Cj.transpose();
    S.block(2, 0, 2, 2) = Cj;
    auto cj = classify_spectrum(SymplecticMatrix(expm(hamiltonian_matrix(S))));
    CHECK(cj.n_hr_plus == 1);
    CHECK(cj.blocks[0].multiplicity == 2);
    CHECK(cj.reconstruction_error <= 1e-8);
  }
}

TEST_CASE("classification invariants on random maps") {
  std::mt19937_64 rng(2024);
  int done = 0;
  for (Eigen::Index m : {1, 2, 3})
    for (int i = 0; i < 30; ++i) {
      const Mat K = random_symplectic(m, rng);
      SpectralClassification c;
      try {
        c = classify_spectrum(SymplecticMatrix(K, 1e-8));
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ClassificationAmbiguous);
        continue;
      }
      ++done;
      CHECK(c.reconstruction_error <= 1e-8);
      CHECK(c.dimension_count() == 2 * m);
      CHECK(hamiltonian_defect(c.B) <= 1e-8);
      CHECK((c.F - c.F.transpose()).norm() <= 1e-12);
      for (const auto& b : c.blocks) {
        CHECK(b.lambda_inverse == -b.lambda);
        CHECK(b.lambda_conjugate == std::conj(b.lambda));
        if (b.kind == BlockKind::Elliptic) CHECK(b.multiplicity == 1);
      }
      const Mat T = c.basis;
      CHECK(symplectic_defect(T) <= 1e-8 * std::max(1.0, T.squaredNorm()));
    }
  CHECK(done > 60);
}

TEST_CASE("nonresonance scan") {
  auto r = nonresonance_check({std::numbers::pi / 2}, 10);
  CHECK(r.kind == ResonanceVerdict::Kind::Resonant);
  CHECK(r.witness == std::vector<int>{2});
  auto i = nonresonance_check({1.0}, 50);
  CHECK(i.kind != ResonanceVerdict::Kind::Resonant);
  auto z = nonresonance_check({1.0, 2.0}, 5);
  CHECK(z.kind == ResonanceVerdict::Kind::Resonant);
  CHECK(z.witness == std::vector<int>{2, -1});
}

TEST_CASE("quadratic Hamiltonians") {
  SUBCASE("x xi from the model map") {
    auto c = classify_spectrum(SymplecticMatrix(diag2(std::exp(1.0), std::exp(-1.0))));
    auto q = build_quadratic_hamiltonian(c);
    Vec x(1), xi(1);
    x << 0.7;
    xi << -1.3;
    CHECK(q.evaluate(x, xi) == doctest::Approx(0.7 * -1.3));
    CHECK((expm(q.q.hamiltonian_matrix()) - expm(c.B)).norm() <= 1e-8);
  }
  SUBCASE("rotation gives the oscillator") {
    auto c = classify_spectrum(SymplecticMatrix(rotation(1.0)));
    auto q = build_quadratic_hamiltonian(c);
    const Mat E = expm(Mat(-standard_form(2) * c.F));
    CHECK((expm(q.q1.hamiltonian_matrix()) - E).norm() <= 1e-8);
    Vec x(1), xi(1);
    x << 0.4;
    xi << 0.9;
    CHECK(std::abs(q.q1(x, xi)) == doctest::Approx(0.5 * (0.16 + 0.81)));
  }
  SUBCASE("complex block 1+i") {
    auto qf = hyperbolic_normal_form({{BlockKind::ComplexHyperbolic, cplx(1.0, 1.0)}});
    Vec x(2), xi(2);
    x << 0.3, -0.8;
    xi << 1.1, 0.5;
    const double expect = (x(0) * xi(0) + x(1) * xi(1)) - (x(0) * xi(1) - x(1) * xi(0));
    CHECK(qf(x, xi) == doctest::Approx(expect));
    const Mat G = normal_form_generator({{BlockKind::ComplexHyperbolic, cplx(1.0, 1.0)}});
    CHECK((expm(qf.hamiltonian_matrix()) - expm(G)).norm() <= 1e-8);
  }
  SUBCASE("random classifications") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
      const Mat K = random_symplectic(2, rng);
      SpectralClassification c;
      try {
        c = classify_spectrum(SymplecticMatrix(K, 1e-8));
      } catch (const Error&) {
        continue;
      }
      auto q = build_quadratic_hamiltonian(c);
      CHECK((expm(q.q.hamiltonian_matrix()) - expm(c.B)).norm() <= 1e-8 * expm(c.B).norm());
      CHECK((expm(q.q1.hamiltonian_matrix()) - expm(Mat(-standard_form(4) * c.F))).norm() <= 1e-8);
      CHECK(symplectic_defect(expm(q.q.hamiltonian_matrix())) <= 1e-10 * std::max(1.0, expm(c.B).squaredNorm()));
    }
  }
}
