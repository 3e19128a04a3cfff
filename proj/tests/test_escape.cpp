#include "semihyp/escape.hpp"
#include "semihyp/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace semihyp;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

QuadraticForm diagonal_q(const std::vector<double>& rates) {
  std::vector<HyperbolicBlockSpec> b;
  for (double r : rates) b.push_back({BlockKind::RealPositive, r});
  return hyperbolic_normal_form(b);
}

}  // namespace

TEST_CASE("escape function values") {
  const EscapeFunction hyp{1, 0};
  const EscapeFunction ell{0, 1};
  CHECK(eval_escape(hyp, v1(0), v1(0)) == cplx(0.0, 0.0));
  CHECK(eval_escape(hyp, v1(1), v1(0)).real() == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(std::abs(eval_escape(ell, v1(1), v1(1))) == 0.0);
  CHECK(eval_escape(ell, v1(2), v1(1)).imag() == doctest::Approx(1.5));
}

TEST_CASE("escape function symmetries and gradient") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 3.0);
  const EscapeFunction ef{2, 1};
  double sup = 0.0;
  for (int i = 0; i < 500; ++i) {
    Vec X(3), Xi(3);
    for (int j = 0; j < 3; ++j) {
      X(j) = n(rng);
      Xi(j) = n(rng);
    }
    const cplx g = ef(X, Xi);
    const cplx swapped = ef(Xi, X);
    CHECK(g.real() == doctest::Approx(-swapped.real()));
    CHECK(g.imag() == doctest::Approx(-swapped.imag()));
    auto [gx, gxi] = ef.gradient(X, Xi);
    for (int j = 0; j < 3; ++j) {
      const double e = 1e-6;
      Vec Xp = X, Xm = X;
      Xp(j) += e;
      Xm(j) -= e;
      const cplx fd = (ef(Xp, Xi) - ef(Xm, Xi)) / (2 * e);
      CHECK(std::abs(fd - gx(j)) <= 1e-6 * (1 + std::abs(gx(j))));
    }
    // only the hyperbolic gradient is bounded; the elliptic part is quadratic
    sup = std::max(sup, gx.head(2).cwiseAbs().maxCoeff());
    sup = std::max(sup, gxi.head(2).cwiseAbs().maxCoeff());
  }
  CHECK(sup <= 1.0 + 1e-12);
}

TEST_CASE("H_q G on model forms") {
  const EscapeFunction ef{1, 0};
  const QuadraticForm q = diagonal_q({1.0});
  CHECK(hamiltonian_action(q, ef, v1(1), v1(0)).real() == doctest::Approx(0.5));
  CHECK(std::abs(hamiltonian_action(q, ef, v1(0), v1(0))) == 0.0);
  for (double x : {-3.0, 0.2, 7.0})
    for (double xi : {-1.0, 0.5, 40.0})
      CHECK(hamiltonian_action(q, ef, v1(x), v1(xi)).real() ==
            doctest::Approx(x * x / (1 + x * x) + xi * xi / (1 + xi * xi)));

  // elliptic oscillator: Re H_q G vanishes
  Mat S = Mat::Identity(2, 2) * 0.7;  // q = (0.7/2)(x^2 + xi^2)
  const QuadraticForm osc(S);
  const EscapeFunction e{0, 1};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) CHECK(std::abs(hamiltonian_action(osc, e, v1(u(rng)), v1(u(rng))).real()) <= 1e-12);
}

TEST_CASE("positivity sampling") {
  PositivityOptions opts;
  opts.samples = 20000;
  SUBCASE("model") {
    auto r = verify_positivity(diagonal_q({1.0}), opts);
    CHECK(r.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two rates") {
    auto r = verify_positivity(diagonal_q({2.0, 3.0}), opts);
    CHECK(r.min_ratio >= 2.0 - 1e-9);
  }
  SUBCASE("complex block") {
    auto r = verify_positivity(hyperbolic_normal_form({{BlockKind::ComplexHyperbolic, cplx(1.0, 5.0)}}), opts);
    CHECK(r.min_ratio > 0.0);
  }
  SUBCASE("Jordan block needs adapted coordinates") {
    auto r = verify_positivity(hyperbolic_normal_form({{BlockKind::RealPositive, 0.2, 3}}), opts);
    CHECK(r.adapted);
    CHECK(r.adapted_symmetric_min > 0.0);
    CHECK(r.min_ratio > 0.0);
    CHECK(symplectic_defect([&] {
            const Eigen::Index n = r.coord_change.rows();
            Mat T = Mat::Zero(2 * n, 2 * n);
            T.topLeftCorner(n, n) = r.coord_change;
            T.bottomRightCorner(n, n) = r.coord_change.inverse().transpose();
            return T;
          }()) <= 1e-10);
  }
  SUBCASE("same seed, same report") {
    auto a = verify_positivity(diagonal_q({2.0, 3.0}), opts);
    auto b = verify_positivity(diagonal_q({2.0, 3.0}), opts);
    CHECK(a.min_ratio == b.min_ratio);
  }
}

TEST_CASE("hyperbolic part of a mixed classification") {
  Mat dS = Mat::Zero(4, 4);
  dS(0, 0) = -2.0;
  dS(2, 2) = -0.5;
  dS(1, 1) = dS(3, 3) = std::cos(1.0);
  dS(1, 3) = std::sin(1.0);
  dS(3, 1) = -std::sin(1.0);
  auto c = classify_spectrum(SymplecticMatrix(dS));
  auto q = hyperbolic_part(c);
  CHECK(q.half_dim() == 1);
  PositivityOptions opts;
  opts.samples = 5000;
  CHECK(verify_positivity(q, opts).min_ratio == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("diagonal normal form") {
  SUBCASE("x xi") {
    auto nf = diagonal_normal_form(diagonal_q({1.0}));
    CHECK(nf.r == std::vector<double>{1.0});
    CHECK(nf.M(0, 0) == 1.0);
  }
  SUBCASE("4 x xi") {
    auto nf = diagonal_normal_form(diagonal_q({4.0}));
    CHECK(nf.r[0] == doctest::Approx(0.5));
  }
  SUBCASE("sorted rates") {
    auto nf = diagonal_normal_form(diagonal_q({1.0, 9.0}));
    REQUIRE(nf.r.size() == 2);
    CHECK(nf.r[0] == doctest::Approx(1.0 / 3.0));
    CHECK(nf.r[1] == doctest::Approx(1.0));
    CHECK(nf.min_eig_M > 0.0);
    CHECK(nf.min_eig_Mprime > 0.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
      Vec x(2), xi(2);
      x << u(rng), u(rng);
      xi << u(rng), u(rng);
      CHECK(normal_form_residual(nf, x, xi) <= 1e-10);
    }
  }
  SUBCASE("non-diagonal input") {
    try {
      diagonal_normal_form(hyperbolic_normal_form({{BlockKind::RealPositive, 1.0, 2}}));
      FAIL("Jordan block accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Unsupported);
    }
  }
}
